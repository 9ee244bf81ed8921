import numpy as np
import pytest
from aqwm.dto import LstmModel, LstmRole, SchemeMode, TrainConfig
from aqwm.sim.exc import InvalidArgumentError
from aqwm.sim.harness.scenario import run_scenario, scenario_from_dict
from aqwm.sim.harness.training import CALIBRATION_FILE, train_models, training_windows
from aqwm.sim.utils.documents import load_document


@pytest.fixture()
def lstm_manifest() -> dict:
    return {
        "kind": "harness.aqwm.io/scenario",
        "version": "v1",
        "metadata": {"name": "tiny-lstm"},
        "spec": {
            "name": "tiny-lstm",
            "mode": "dynamic_lstm",
            "params": {"beta": 0.5, "n": 4, "n_s": 5, "sample_rate_hz": 100.0},
            "source": {"type": "synthetic", "std": 1.0, "seed": 2},
            "duration_s": 2.0,
            "calibration": {"windows": 20, "seed": 1},
            "encoder_path": "models/encoder.json",
            "decoder_path": "models/decoder.json",
            "power_ratio_windows": [1, 10],
        },
    }


def test_training_windows(lstm_manifest):
    scenario = scenario_from_dict(lstm_manifest)
    windows = training_windows(scenario, 6, seed=0)

    assert len(windows) == 6
    assert all(len(w) == 20 for w in windows)
    assert training_windows(scenario, 6, seed=0) == windows


def test_train_models_and_run(tmp_path, lstm_manifest):
    scenario = scenario_from_dict(lstm_manifest)
    cfg = TrainConfig(epochs=3, learning_rate=0.01, seed=4)

    trained = train_models(scenario, cfg, tmp_path / "unused", windows=5, hidden_dim=4, base_dir=tmp_path)

    assert trained.encoder_path == tmp_path / "models" / "encoder.json"
    assert trained.calibration_path == tmp_path / "unused" / CALIBRATION_FILE
    assert trained.encoder_report.epochs_run == 3
    assert trained.decoder_report.epochs_run == 3

    encoder = load_document(trained.encoder_path, LstmModel).spec
    decoder = load_document(trained.decoder_path, LstmModel).spec
    assert encoder == trained.encoder
    assert encoder.role == LstmRole.ENCODER
    assert encoder.calibration == trained.calibration
    assert decoder.role == LstmRole.DECODER
    assert (decoder.n, decoder.n_s) == (4, 5)

    bundle = run_scenario(scenario, tmp_path)
    assert bundle.mode == SchemeMode.DYNAMIC_LSTM
    assert bundle.detection.scheme == "dynamic_lstm"
    assert len(bundle.detection.per_window_mismatch) == 10


def test_training_windows_hold_out_recording(tmp_path, write_signal_csv, lstm_manifest):
    # the run consumes 200 samples, the next 60 are three held-out windows
    values = np.arange(260, dtype=np.float64)
    lstm_manifest["spec"]["source"] = {"type": "csv", "path": str(write_signal_csv(values))}
    scenario = scenario_from_dict(lstm_manifest)

    windows = training_windows(scenario, 5, seed=0)

    assert len(windows) == 3
    assert windows[0].samples[0] == 200.0
    assert windows[-1].samples[-1] == 259.0


def test_training_windows_recording_too_short(write_signal_csv, lstm_manifest):
    lstm_manifest["spec"]["source"] = {"type": "csv", "path": str(write_signal_csv(np.zeros(210)))}
    scenario = scenario_from_dict(lstm_manifest)

    with pytest.raises(InvalidArgumentError) as e:
        training_windows(scenario, 5, seed=0)
    assert e.value.field == "source.path"


def test_train_models_seeded(tmp_path, lstm_manifest):
    scenario = scenario_from_dict(lstm_manifest)

    def run(seed: int, out: str):
        cfg = TrainConfig(epochs=2, learning_rate=0.01, seed=seed)
        return train_models(scenario, cfg, tmp_path / out, windows=4, hidden_dim=4, base_dir=tmp_path / out)

    first = run(4, "a")
    second = run(4, "b")
    other = run(5, "c")

    assert first.encoder == second.encoder
    assert first.decoder == second.decoder
    assert first.encoder_report == second.encoder_report
    assert first.encoder != other.encoder
    assert first.decoder != other.decoder
