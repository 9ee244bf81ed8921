import logging
import math
from pathlib import Path
from typing import List, NamedTuple, Optional, Union

from aqwm.dto import FeatureCalibration, LstmModel, Scenario, SignalFrame, SyntheticSource, TrainConfig, TrainReport

from ..exc import InvalidArgumentError
from ..lstm import DEFAULT_HIDDEN, decoder_samples, encoder_sample, lstm_train, new_decoder, new_encoder
from ..rng import derive_seed
from ..signal import concat_windows, gen_gaussian, load_csv, split_windows, stats
from ..utils.documents import save_document
from .scenario import resolve_path, scenario_calibration, scenario_key

LOG = logging.getLogger(__name__)

# sub-seed labels
_TRAIN_CARRIER, _DECODER_INIT = 11, 12

ENCODER_FILE = "encoder.json"
DECODER_FILE = "decoder.json"
CALIBRATION_FILE = "calibration.json"


class TrainedModels(NamedTuple):
    encoder: LstmModel
    decoder: LstmModel
    calibration: FeatureCalibration
    encoder_report: TrainReport
    decoder_report: TrainReport
    encoder_path: Path
    decoder_path: Path
    calibration_path: Path


def training_windows(
    scenario: Scenario, windows: int, seed: int, base_dir: Optional[Path] = None
) -> List[SignalFrame]:
    """Clean carrier windows for the oracle datasets

    Synthetic sources draw a fresh carrier from the training seed. Recordings are held out from evaluation: the
    windows come from the part of the file past the ``scenario.sample_count`` samples a run consumes.

    Raises:
        InvalidArgumentError: the recording holds no whole window past the evaluated stream
    """
    params = scenario.params
    source = scenario.source
    if isinstance(source, SyntheticSource):
        frame = gen_gaussian(
            source.mean,
            source.std,
            windows * params.window_len,
            params.sample_rate_hz,
            derive_seed(seed, _TRAIN_CARRIER),
        )
        return split_windows(frame, params.window_len)

    recording = load_csv(resolve_path(source.path, base_dir), params.sample_rate_hz)
    held_out = (len(recording) - scenario.sample_count) // params.window_len
    if held_out < 1:
        raise InvalidArgumentError(
            f"recording holds {len(recording)} samples, training needs at least one {params.window_len}-sample "
            f"window past the {scenario.sample_count} evaluated samples",
            field="source.path",
        )
    if held_out < windows:
        LOG.warning("recording leaves %d held-out training windows, %d requested", held_out, windows)
    count = min(held_out, windows)
    start = scenario.sample_count
    tail = recording.with_samples(recording.samples[start : start + count * params.window_len])
    return split_windows(tail, params.window_len)


def train_models(
    scenario: Scenario,
    cfg: TrainConfig,
    out_dir: Union[str, Path],
    windows: int = 100,
    hidden_dim: int = DEFAULT_HIDDEN,
    base_dir: Optional[Union[str, Path]] = None,
) -> TrainedModels:
    """Train the device encoder and cloud decoder of a scenario on oracle targets

    The calibration is rebuilt from the scenario exactly as :func:`run_scenario` builds it, so the written models
    and calibration match what a dynamic_lstm run of the same scenario verifies against.

    Args:
        scenario: Scenario providing key, geometry, source and calibration settings
        cfg: Optimiser settings, shared by both networks
        out_dir: Where models and calibration are written unless the scenario names model paths
        windows: Number of training windows
        hidden_dim: Hidden units of both networks
        base_dir: Directory relative scenario paths are resolved against

    Returns:
        The trained models, their loss histories and the written file paths
    """
    out_dir = Path(out_dir)
    base_dir = Path(base_dir) if base_dir is not None else None
    params = scenario.params
    key = scenario_key(scenario)
    calib = scenario_calibration(scenario, key, base_dir)

    carriers = training_windows(scenario, windows, cfg.seed, base_dir)
    scale = math.sqrt(stats(concat_windows(carriers)).variance) or 1.0
    LOG.info("training on %d windows, signal scale %.4g", len(carriers), scale)

    encoder = new_encoder(params, scale, calib, cfg.seed, hidden_dim)
    encoder_report = lstm_train(encoder, [encoder_sample(y, key, calib, params, scale) for y in carriers], cfg)

    decoder = new_decoder(params, scale, derive_seed(cfg.seed, _DECODER_INIT), hidden_dim)
    dataset = [pair for y in carriers for pair in decoder_samples(y, key, calib, params, scale)]
    decoder_report = lstm_train(decoder, dataset, cfg)

    encoder_path = resolve_path(scenario.encoder_path, base_dir) if scenario.encoder_path else out_dir / ENCODER_FILE
    decoder_path = resolve_path(scenario.decoder_path, base_dir) if scenario.decoder_path else out_dir / DECODER_FILE
    calibration_path = out_dir / CALIBRATION_FILE

    save_document(encoder_path, encoder, f"{scenario.name}-encoder", "device encoder")
    save_document(decoder_path, decoder, f"{scenario.name}-decoder", "cloud decoder")
    save_document(calibration_path, calib, f"{scenario.name}-calibration", "fingerprint calibration")
    return TrainedModels(
        encoder=encoder,
        decoder=decoder,
        calibration=calib,
        encoder_report=encoder_report,
        decoder_report=decoder_report,
        encoder_path=encoder_path,
        decoder_path=decoder_path,
        calibration_path=calibration_path,
    )
