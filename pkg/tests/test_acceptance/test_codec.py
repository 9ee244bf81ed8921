import numpy as np
import pytest
from aqwm.dto import SignalFrame, WatermarkParams
from aqwm.sim.exc import CodecError
from aqwm.sim.harness.codec import decode_frame, encode_frame
from aqwm.sim.rng import make_rng

EXTREMES = np.array([0.0, -0.0, 5e-324, -1.7976931348623157e308, 1e300, 1.0 / 3.0])


def _random_frames(count: int, seed: int):
    rng = make_rng(seed)
    for k in range(count):
        n = int(rng.integers(2, 40))
        n_s = int(rng.integers(1, 12))
        sample_rate_hz = int(rng.integers(1, 10_000_000)) / 1000.0
        params = WatermarkParams(beta=1.0, n=n, n_s=n_s, sample_rate_hz=sample_rate_hz)
        samples = rng.standard_normal(n * n_s) * 10 ** rng.uniform(-6, 6)
        samples[: min(len(samples), len(EXTREMES))] = EXTREMES[: len(samples)]
        rng.shuffle(samples)
        device_id = int(rng.integers(0, 2**32))
        window_index = int(rng.integers(0, 2**63)) * 2 + k % 2
        yield SignalFrame(samples=samples, sample_rate_hz=sample_rate_hz), device_id, window_index, params


def test_round_trip_is_bit_exact():
    for frame, device_id, window_index, params in _random_frames(1000, 81):
        wire = decode_frame(encode_frame(frame, device_id, window_index, params))

        assert wire.frame.samples.tobytes() == frame.samples.tobytes()
        assert (wire.device_id, wire.window_index) == (device_id, window_index)
        assert (wire.n, wire.n_s, wire.sample_rate_hz) == (params.n, params.n_s, params.sample_rate_hz)


def test_every_truncation_is_rejected():
    frame, device_id, window_index, params = next(_random_frames(1, 82))
    data = encode_frame(frame, device_id, window_index, params)

    for length in range(len(data)):
        with pytest.raises(CodecError) as e:
            decode_frame(data[:length])
        assert e.value.field in ("header", "payload")
