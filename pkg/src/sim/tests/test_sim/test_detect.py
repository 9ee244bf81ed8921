from typing import List

import numpy as np
import pytest
from aqwm.dto import AttackConfig, AttackKind, BitStream, SignalFrame, WatermarkParams
from aqwm.sim.detect import (
    DYNAMIC_LSTM_SCHEME,
    DYNAMIC_ORACLE_SCHEME,
    STATIC_SCHEME,
    build_report,
    dynamic_verify,
    mismatch,
    static_verify,
)
from aqwm.sim.exc import InvalidArgumentError, ShapeError
from aqwm.sim.fingerprint import fingerprint_bits
from aqwm.sim.lstm import new_decoder
from aqwm.sim.rng import make_rng
from aqwm.sim.signal import gen_gaussian, split_windows
from aqwm.sim.sswm import embed, gen_pn_key
from aqwm.sim.threat import inject


@pytest.fixture()
def quiet_params() -> WatermarkParams:
    return WatermarkParams(beta=0.5, n=10, n_s=10, sample_rate_hz=1000.0)


@pytest.fixture()
def quiet_windows(quiet_params: WatermarkParams) -> List[SignalFrame]:
    # 1 s of carrier with sigma = 0.25
    return split_windows(gen_gaussian(0.0, 0.25, 1000, quiet_params.sample_rate_hz, 1), quiet_params.window_len)


@pytest.mark.parametrize(
    "expected, extracted, value",
    [
        ([1, -1, 1, -1], [1, -1, 1, -1], 0.0),
        ([1, -1, 1, -1], [-1, 1, -1, 1], 1.0),
        ([1, 1, 1, 1], [1, 1, -1, -1], 0.5),
        ([], [], 0.0),
    ],
)
def test_mismatch(expected, extracted, value):
    assert mismatch(np.array(expected), np.array(extracted)) == value


def test_mismatch_random_streams():
    rng = make_rng(8)
    a = np.where(rng.random(100_000) < 0.5, 1, -1)
    b = np.where(rng.random(100_000) < 0.5, 1, -1)
    assert 0.485 <= mismatch(a, b) <= 0.515


def test_mismatch_bit_streams():
    assert mismatch(BitStream(bits=[1, -1]), BitStream(bits=[1, 1])) == 0.5
    with pytest.raises(ShapeError):
        mismatch(BitStream(bits=[1, -1]), BitStream(bits=[1]))


def test_build_report(quiet_params: WatermarkParams):
    report = build_report(STATIC_SCHEME, quiet_params, 0.25, np.array([0.0, 0.25, 0.3, 0.9]))

    assert report.alarm
    assert report.alarm_window == 2
    assert report.alarm_time_s == pytest.approx(0.3)

    quiet = build_report(STATIC_SCHEME, quiet_params, 0.25, np.array([0.0, 0.25]))
    assert not quiet.alarm
    assert quiet.alarm_time_s is None


def test_static_verify_clean(key, static_bits, carrier_windows):
    # beta * sqrt(n) / sigma = 6
    params = WatermarkParams(beta=6 / np.sqrt(10), n=10, n_s=10, sample_rate_hz=1000.0)
    marked = [embed(y, key, static_bits, params.beta) for y in carrier_windows]

    report = static_verify(marked, key, params, static_bits)

    assert report.scheme == STATIC_SCHEME
    assert len(report.per_window_mismatch) == len(carrier_windows)
    assert not report.alarm


def test_static_verify_injection_alarm(key, static_bits, quiet_params, quiet_windows):
    marked = [embed(y, key, static_bits, quiet_params.beta) for y in quiet_windows]
    attacked = inject(marked, AttackConfig(kind=AttackKind.INJECTION, start_sample=500, injected_std=1.0, seed=3))

    report = static_verify(attacked, key, quiet_params, static_bits, erasure_margin=0.5)

    assert report.alarm_window == 5
    assert report.alarm_time_s == pytest.approx(0.6)
    assert max(report.per_window_mismatch[:5]) <= 0.25


def test_static_verify_threshold_monotone(key, static_bits, params, carrier_windows):
    marked = [embed(y, key, static_bits, params.beta) for y in carrier_windows]
    attacked = inject(marked, AttackConfig(kind=AttackKind.INJECTION, start_sample=2000, seed=5))

    alarms = [static_verify(attacked, key, params, static_bits, threshold=t).alarm_window for t in (0.1, 0.25, 0.5)]
    later = [np.inf if a is None else a for a in alarms]
    assert later == sorted(later)

    assert not static_verify(marked, key, params, static_bits, threshold=0.999).alarm


@pytest.mark.parametrize("threshold", [0.0, 1.0, -0.1, 1.5])
def test_static_verify_invalid_threshold(key, static_bits, params, carrier_windows, threshold):
    with pytest.raises(InvalidArgumentError) as e:
        static_verify(carrier_windows, key, params, static_bits, threshold=threshold)
    assert e.value.field == "threshold"


def test_static_verify_errors(key, static_bits, params, carrier_windows):
    with pytest.raises(InvalidArgumentError):
        static_verify(carrier_windows, key, params, static_bits, erasure_margin=-1.0)
    with pytest.raises(ShapeError):
        static_verify(carrier_windows, gen_pn_key(5, 1), params, static_bits)
    with pytest.raises(ShapeError):
        static_verify([carrier_windows[0].with_samples(np.zeros(50))], key, params, static_bits)


def test_dynamic_verify_clean_and_injected(key, quiet_params, quiet_windows, calibration):
    calib = calibration
    marked = [embed(y, key, fingerprint_bits(y, key, calib, quiet_params.n_s), quiet_params.beta) for y in quiet_windows]

    clean = dynamic_verify(marked, key, quiet_params, calib, erasure_margin=0.5)
    assert clean.scheme == DYNAMIC_ORACLE_SCHEME
    assert not clean.alarm

    attacked = inject(marked, AttackConfig(kind=AttackKind.INJECTION, start_sample=500, injected_std=1.0, seed=3))
    report = dynamic_verify(attacked, key, quiet_params, calib, erasure_margin=0.5)
    assert report.alarm_window == 5
    assert report.alarm_time_s == pytest.approx(0.6)


def test_dynamic_verify_needs_calibration(key, params, carrier_windows):
    with pytest.raises(InvalidArgumentError) as e:
        dynamic_verify(carrier_windows, key, params, None)
    assert e.value.field == "calib"


def test_dynamic_verify_static_stream_mismatches(key, static_bits, params, carrier_windows, calibration):
    marked = [embed(y, key, static_bits, params.beta) for y in carrier_windows]
    report = dynamic_verify(marked, key, params, calibration)
    assert 0.3 <= np.mean(report.per_window_mismatch) <= 0.7


def test_dynamic_verify_with_decoder(key, calibration, params, carrier_windows):
    strong = params.model_copy(update={"beta": 2.0})
    decoder = new_decoder(strong, 1.0, seed=5, hidden_dim=8)
    marked = [embed(y, key, fingerprint_bits(y, key, calibration, strong.n_s), strong.beta) for y in carrier_windows]

    report = dynamic_verify(marked, key, strong, calibration, decoder=decoder)

    assert report.scheme == DYNAMIC_LSTM_SCHEME
    assert not report.alarm
    assert np.mean(report.per_window_mismatch) <= 0.02

    empty = dynamic_verify([], key, strong, calibration, decoder=decoder)
    assert empty.per_window_mismatch == []
