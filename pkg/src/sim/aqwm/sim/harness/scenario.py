"""End-to-end scenario: device watermarking, attack, transport and cloud verification."""

import logging
import math
import time
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from aqwm.dto import (
    BerPoint,
    BitStream,
    CsvSource,
    DetectionReport,
    FeatureCalibration,
    LstmModel,
    MetricsBundle,
    PnKey,
    PowerRatioPoint,
    Scenario,
    SchemeMode,
    SignalFrame,
    SyntheticSource,
)
from pydantic import ValidationError

from ..detect import dynamic_verify, static_verify
from ..exc import InvalidArgumentError, SignalIOError
from ..fingerprint import calibrate_for_key, fingerprint_bits
from ..lstm import cloud_decode_bits, device_encode
from ..rng import derive_seed
from ..signal import gen_gaussian, load_csv, split_windows, stack_windows, stats
from ..sswm import correlate, embed, gen_bit_stream, gen_pn_key, hard_bits, theoretical_ber
from ..threat import accumulate, attack_stream, power_ratio
from ..utils.documents import load_document, parse_document, validation_error_field
from .codec import transport

LOG = logging.getLogger(__name__)

# sub-seed label of the calibration carrier
_CALIBRATION = 7


def resolve_path(path: str, base_dir: Optional[Path]) -> Path:
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return p


def load_source(scenario: Scenario, base_dir: Optional[Path] = None) -> SignalFrame:
    """The carrier stream of a scenario, exactly ``scenario.sample_count`` samples long"""
    params = scenario.params
    source = scenario.source
    if isinstance(source, SyntheticSource):
        return gen_gaussian(source.mean, source.std, scenario.sample_count, params.sample_rate_hz, source.seed)

    frame = load_csv(resolve_path(source.path, base_dir), params.sample_rate_hz)
    if len(frame) < scenario.sample_count:
        raise InvalidArgumentError(
            f"recording holds {len(frame)} samples, the scenario needs {scenario.sample_count}", field="source.path"
        )
    return frame.with_samples(frame.samples[: scenario.sample_count])


def scenario_key(scenario: Scenario) -> PnKey:
    return gen_pn_key(scenario.params.n, scenario.key_seed)


def scenario_bits(scenario: Scenario) -> BitStream:
    """The static bit stream, explicit or seeded"""
    if scenario.static_bits is not None:
        return BitStream(bits=scenario.static_bits)
    return gen_bit_stream(scenario.params.n_s, scenario.bits_seed)


def calibration_windows(scenario: Scenario, base_dir: Optional[Path] = None) -> List[SignalFrame]:
    """Clean windows the fingerprint calibration is built from

    Synthetic sources draw a separate carrier from the calibration seed; recordings use their own leading windows.
    """
    params = scenario.params
    settings = scenario.calibration
    source = scenario.source
    if isinstance(source, CsvSource):
        windows = split_windows(load_source(scenario, base_dir), params.window_len)
        return windows[: settings.windows]
    frame = gen_gaussian(
        source.mean,
        source.std,
        settings.windows * params.window_len,
        params.sample_rate_hz,
        derive_seed(settings.seed, _CALIBRATION),
    )
    return split_windows(frame, params.window_len)


def scenario_calibration(scenario: Scenario, key: PnKey, base_dir: Optional[Path] = None) -> FeatureCalibration:
    return calibrate_for_key(calibration_windows(scenario, base_dir), key, scenario.calibration.bits_per_feature)


def _load_model(path: str, base_dir: Optional[Path]) -> LstmModel:
    resolved = resolve_path(path, base_dir)
    if not resolved.exists():
        raise SignalIOError(f"model file not found: {resolved}")
    return load_document(resolved, LstmModel).spec


def _device(
    scenario: Scenario,
    windows: List[SignalFrame],
    key: PnKey,
    calib: Optional[FeatureCalibration],
    encoder: Optional[LstmModel],
) -> Tuple[List[SignalFrame], np.ndarray]:
    """Watermarked windows and the reference bits of every window"""
    params = scenario.params
    if scenario.mode == SchemeMode.STATIC:
        bits = scenario_bits(scenario)
        return [embed(y, key, bits, params.beta) for y in windows], np.tile(bits.bits, (len(windows), 1))

    reference = [fingerprint_bits(y, key, calib, params.n_s) for y in windows]
    if scenario.mode == SchemeMode.DYNAMIC_ORACLE:
        marked = [embed(y, key, s, params.beta) for y, s in zip(windows, reference)]
    else:
        marked = [device_encode(encoder, y, key) for y in windows]
    return marked, np.stack([s.bits for s in reference])


def _transport(scenario: Scenario, windows: List[SignalFrame]) -> List[SignalFrame]:
    return [transport(w, scenario.device_id, k, scenario.params) for k, w in enumerate(windows)]


def _ber_point(
    scenario: Scenario,
    clean: np.ndarray,
    carrier: SignalFrame,
    reference: np.ndarray,
    key: PnKey,
    decoder: Optional[LstmModel],
) -> List[BerPoint]:
    params = scenario.params
    sigma = math.sqrt(stats(carrier).variance)
    if clean.shape[0] == 0 or sigma == 0:
        return []
    if decoder is not None:
        extracted = cloud_decode_bits(decoder, clean, key)
    else:
        extracted = hard_bits(correlate(clean, key, params.n_s, params.beta))
    errors = int(np.count_nonzero(extracted != reference[: clean.shape[0]]))
    return [
        BerPoint(
            beta_over_sigma=params.beta / sigma,
            n=params.n,
            empirical_ber=errors / extracted.size,
            theoretical_ber=theoretical_ber(params.beta, sigma, params.n),
            bits=int(extracted.size),
        )
    ]


def _power_ratio_curve(scenario: Scenario, marked: List[SignalFrame]) -> List[PowerRatioPoint]:
    curve = []
    for m in sorted(set(scenario.power_ratio_windows)):
        if m > len(marked):
            LOG.warning("skipping power ratio at m=%d, only %d windows in the stream", m, len(marked))
            continue
        curve.append(PowerRatioPoint(m=m, ratio=power_ratio(accumulate(marked[:m]))))
    return curve


def verify(
    scenario: Scenario,
    received: List[SignalFrame],
    key: PnKey,
    calib: Optional[FeatureCalibration] = None,
    decoder: Optional[LstmModel] = None,
) -> DetectionReport:
    """Run the cloud verifier matching the scenario mode"""
    params = scenario.params
    if scenario.mode == SchemeMode.STATIC:
        return static_verify(
            received, key, params, scenario_bits(scenario), scenario.threshold, scenario.erasure_margin
        )
    return dynamic_verify(
        received,
        key,
        params,
        calib,
        decoder if scenario.mode == SchemeMode.DYNAMIC_LSTM else None,
        scenario.threshold,
        scenario.erasure_margin,
    )


def run_scenario(scenario: Scenario, base_dir: Optional[Union[str, Path]] = None) -> MetricsBundle:
    """Run one device-to-cloud experiment

    Args:
        scenario: The experiment
        base_dir: Directory relative paths of the scenario (recording, models) are resolved against

    Returns:
        Metrics of the run; everything except ``runtime_s`` is a pure function of the scenario

    Raises:
        InvalidArgumentError: the scenario does not fit its data
        SignalIOError: the recording or a model file is missing
    """
    started = time.perf_counter()
    base_dir = Path(base_dir) if base_dir is not None else None
    params = scenario.params
    LOG.info(
        "scenario %s: %s mode, %d windows of %d samples, attack %s",
        scenario.name,
        scenario.mode.value,
        scenario.window_count,
        params.window_len,
        scenario.attack.kind.value if scenario.attack else "none",
    )

    encoder = decoder = None
    if scenario.mode == SchemeMode.DYNAMIC_LSTM:
        encoder = _load_model(scenario.encoder_path, base_dir)
        decoder = _load_model(scenario.decoder_path, base_dir)

    carrier = load_source(scenario, base_dir)
    windows = split_windows(carrier, params.window_len)
    key = scenario_key(scenario)
    calib = None if scenario.mode == SchemeMode.STATIC else scenario_calibration(scenario, key, base_dir)

    marked, reference = _device(scenario, windows, key, calib, encoder)
    attacked = attack_stream(marked, scenario.attack, params)
    received = _transport(scenario, attacked) if scenario.transport else attacked
    report = verify(scenario, received, key, calib, decoder)

    clean_windows = len(received)
    if scenario.attack is not None:
        clean_windows = min(clean_windows, scenario.attack.start_sample // params.window_len)
    clean = stack_windows(received[:clean_windows], params.window_len)

    bundle = MetricsBundle(
        scenario=scenario.name,
        mode=scenario.mode,
        ber_points=_ber_point(scenario, clean, carrier, reference, key, decoder),
        detection=report,
        power_ratio_curve=_power_ratio_curve(scenario, marked),
        runtime_s=time.perf_counter() - started,
    )
    LOG.info(
        "scenario %s done in %.3f s, alarm %s",
        scenario.name,
        bundle.runtime_s,
        f"at {report.alarm_time_s} s" if report.alarm else "not raised",
    )
    return bundle


def load_scenario(path: Union[str, Path]) -> Scenario:
    return load_document(path, Scenario).spec


def scenario_from_dict(manifest: dict) -> Scenario:
    """Scenario from an already parsed document manifest"""
    return parse_document(manifest, Scenario).spec


PARAM_FIELDS = ("beta", "n", "n_s", "sample_rate_hz")


def override_scenario(scenario: Scenario, **overrides) -> Scenario:
    """Re-validated copy of a scenario with some fields replaced

    ``None`` values are ignored. Watermark geometry fields (``beta``, ``n``, ``n_s``, ``sample_rate_hz``) are applied
    to ``scenario.params``, everything else to the scenario itself.

    Raises:
        InvalidArgumentError: an unknown field, or a combination the scenario rules reject
    """
    overrides = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(overrides) - set(PARAM_FIELDS) - set(Scenario.model_fields)
    if unknown:
        raise InvalidArgumentError(f"unknown scenario fields {sorted(unknown)}", field=sorted(unknown)[0])
    if not overrides:
        return scenario
    params = {k: overrides.pop(k) for k in PARAM_FIELDS if k in overrides}
    data = scenario.model_dump()
    data.update(overrides)
    data["params"] = {**data["params"], **params}
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise InvalidArgumentError(str(e), field=validation_error_field(e)) from e
