import numpy as np
import pytest
from aqwm.dto import TrainConfig, WatermarkParams
from aqwm.sim.fingerprint import calibrate_for_key, features, fingerprint_bits
from aqwm.sim.lstm import (
    cloud_decode,
    decoded_bits_agreement,
    decoder_samples,
    device_encode,
    encoder_sample,
    lstm_train,
    new_decoder,
    new_encoder,
)
from aqwm.sim.signal import gen_gaussian, split_windows, stack_windows
from aqwm.sim.sswm import embed, gen_pn_key, project_out_key

SIGMA = 1.0


def _windows(params: WatermarkParams, count: int, seed: int):
    frame = gen_gaussian(0.0, SIGMA, count * params.window_len, params.sample_rate_hz, seed)
    return split_windows(frame, params.window_len)


def _encoder_mse(encoder, windows, key, calib, params) -> float:
    errors = []
    for y in windows:
        oracle = embed(y, key, fingerprint_bits(y, key, calib, params.n_s), params.beta)
        errors.append(np.mean(((device_encode(encoder, y, key).samples - oracle.samples) / SIGMA) ** 2))
    return float(np.mean(errors))


@pytest.mark.slow
def test_encoder_imitates_the_oracle():
    params = WatermarkParams(beta=0.5, n=25, n_s=25, sample_rate_hz=1000.0)
    key = gen_pn_key(params.n, 91)
    calib = calibrate_for_key(_windows(params, 200, 92), key)
    held_out = _windows(params, 100, 95)

    encoder = new_encoder(params, SIGMA, calib, seed=93, hidden_dim=8, warm_readout=False)
    # an untrained readout emits nothing, scoring beta^2
    baseline = _encoder_mse(encoder, held_out, key, calib, params)
    assert baseline == pytest.approx(params.beta**2)

    dataset = [encoder_sample(y, key, calib, params, SIGMA) for y in _windows(params, 50, 94)]
    report = lstm_train(encoder, dataset, TrainConfig(epochs=100, learning_rate=0.2, seed=93))
    assert report.epoch_losses[0] == pytest.approx(params.beta**2)

    trained = _encoder_mse(encoder, held_out, key, calib, params)
    assert trained <= 0.02
    assert trained <= 0.1 * baseline


@pytest.mark.slow
def test_decoder_agrees_with_the_oracle():
    params = WatermarkParams(beta=0.5, n=25, n_s=5, sample_rate_hz=1000.0)
    key = gen_pn_key(params.n, 96)
    calib = calibrate_for_key(_windows(params, 200, 97), key)

    clean = _windows(params, 1000, 100)
    bits = [fingerprint_bits(y, key, calib, params.n_s) for y in clean]
    marked_windows = [embed(y, key, s, params.beta) for y, s in zip(clean, bits)]
    marked = stack_windows(marked_windows, params.window_len)
    expected = np.stack([s.bits for s in bits])

    # key-gated pair wired in, bit readout starting from zero
    decoder = new_decoder(params, SIGMA, seed=98, hidden_dim=2, warm_readout=False)
    untrained = decoded_bits_agreement(decoder, marked, key, expected)
    assert untrained <= 0.6

    dataset = [pair for y in _windows(params, 50, 99) for pair in decoder_samples(y, key, calib, params, SIGMA)]
    report = lstm_train(decoder, dataset, TrainConfig(epochs=150, learning_rate=0.5, seed=98))
    assert report.final_loss < report.epoch_losses[0]

    assert decoded_bits_agreement(decoder, marked, key, expected) >= 0.99

    spreads = np.asarray(calib.spreads)
    close = []
    for y, w in zip(clean[:200], marked_windows[:200]):
        _, fv = cloud_decode(decoder, w, key)
        close.append(np.all(np.abs(fv.as_array() - features(project_out_key(y, key)).as_array()) <= 0.1 * spreads))
    assert np.mean(close) >= 0.95
