"""Cloud-side verification of received windows.

Both verifiers compare, window by window, the bits extracted from the received samples with the bits the cloud
expects: the shared static stream, or the fingerprint bits recomputed from the received window itself. The first
window whose mismatch fraction exceeds the threshold raises the alarm, at the time that window has been fully
received.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np
from aqwm.dto import (
    BitStream,
    DetectionReport,
    FeatureCalibration,
    LstmModel,
    PnKey,
    SignalFrame,
    WatermarkParams,
    alarm_time,
)

from .exc import InvalidArgumentError, ShapeError
from .fingerprint import fingerprint_bits
from .lstm import cloud_decode_bits
from .signal import stack_windows
from .sswm import correlate, hard_bits

LOG = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.25

STATIC_SCHEME = "static"
DYNAMIC_ORACLE_SCHEME = "dynamic_oracle"
DYNAMIC_LSTM_SCHEME = "dynamic_lstm"


def _bits(value: Union[BitStream, np.ndarray, Sequence[int]]) -> np.ndarray:
    return value.bits if isinstance(value, BitStream) else np.asarray(value)


def mismatch(expected: Union[BitStream, np.ndarray], extracted: Union[BitStream, np.ndarray]) -> float:
    """Fraction of positions where two bit streams differ"""
    a, b = _bits(expected), _bits(extracted)
    if a.shape != b.shape:
        raise ShapeError(f"bit streams differ in length: {a.shape[-1]} != {b.shape[-1]}")
    if a.size == 0:
        return 0.0
    return float(np.mean(a != b))


def _check_threshold(threshold: float) -> None:
    if not 0 < threshold < 1:
        raise InvalidArgumentError(f"must lie in (0, 1), got {threshold}", field="threshold")


def _check_margin(margin: float) -> None:
    if not margin >= 0:
        raise InvalidArgumentError(f"must not be negative, got {margin}", field="erasure_margin")


def build_report(scheme: str, params: WatermarkParams, threshold: float, per_window: np.ndarray) -> DetectionReport:
    """Report with the alarm set on the first window above ``threshold``"""
    per_window = [float(m) for m in per_window]
    above = [k for k, m in enumerate(per_window) if m > threshold]
    alarm_window = above[0] if above else None
    report = DetectionReport(
        scheme=scheme,
        params=params,
        threshold=threshold,
        per_window_mismatch=per_window,
        alarm_window=alarm_window,
        alarm_time_s=alarm_time(alarm_window, params) if alarm_window is not None else None,
    )
    for k, m in enumerate(per_window):
        LOG.debug("%s window %d mismatch %.3f", scheme, k, m)
    if report.alarm:
        LOG.info("%s verifier raised the alarm at window %d (t = %.6g s)", scheme, alarm_window, report.alarm_time_s)
    return report


def _mismatch_rows(expected: np.ndarray, soft: np.ndarray, margin: float) -> np.ndarray:
    wrong = (hard_bits(soft) != expected) | (np.abs(soft) < margin)
    return wrong.mean(axis=1) if wrong.size else np.zeros(wrong.shape[0])


def static_verify(
    stream: Sequence[SignalFrame],
    key: PnKey,
    params: WatermarkParams,
    s_ref: BitStream,
    threshold: float = DEFAULT_THRESHOLD,
    erasure_margin: float = 0.0,
) -> DetectionReport:
    """Compare every window's correlator bits with the shared static stream

    Args:
        stream: Received windows of n * n_s samples each
        key: The shared key
        params: Scheme parameters
        s_ref: The static bit stream
        threshold: Alarm threshold on the per-window mismatch fraction
        erasure_margin: Soft bits with a smaller magnitude count as mismatches

    Returns:
        The detection report
    """
    _check_threshold(threshold)
    _check_margin(erasure_margin)
    if key.n != params.n or s_ref.n_s != params.n_s:
        raise ShapeError(f"key and bit stream must have n = {params.n} and n_s = {params.n_s} entries")
    windows = stack_windows(stream, params.window_len)
    soft = correlate(windows, key, params.n_s, params.beta)
    return build_report(STATIC_SCHEME, params, threshold, _mismatch_rows(s_ref.bits[None, :], soft, erasure_margin))


def dynamic_verify(
    stream: Sequence[SignalFrame],
    key: PnKey,
    params: WatermarkParams,
    calib: Optional[FeatureCalibration],
    decoder: Optional[LstmModel] = None,
    threshold: float = DEFAULT_THRESHOLD,
    erasure_margin: float = 0.0,
) -> DetectionReport:
    """Compare every window's extracted bits with its own recomputed fingerprint bits

    Without a decoder the bits come from the correlator; with one, from the trained cloud decoder, which yields
    hard bits only, so ``erasure_margin`` then has no effect.

    Raises:
        InvalidArgumentError: no calibration was given, or the threshold is out of range
        ShapeError: a window is not n * n_s samples long
    """
    if calib is None:
        raise InvalidArgumentError("dynamic verification needs a fingerprint calibration", field="calib")
    _check_threshold(threshold)
    _check_margin(erasure_margin)
    if key.n != params.n:
        raise ShapeError(f"key has {key.n} chips, expected n = {params.n}")
    windows = stack_windows(stream, params.window_len)
    expected = np.array([fingerprint_bits(w, key, calib, params.n_s).bits for w in stream]).reshape(-1, params.n_s)

    if decoder is None:
        soft = correlate(windows, key, params.n_s, params.beta)
        per_window = _mismatch_rows(expected, soft, erasure_margin)
        return build_report(DYNAMIC_ORACLE_SCHEME, params, threshold, per_window)

    if len(windows) == 0:
        return build_report(DYNAMIC_LSTM_SCHEME, params, threshold, np.zeros(0))
    extracted = cloud_decode_bits(decoder, windows, key)
    per_window = (extracted != expected).mean(axis=1)
    return build_report(DYNAMIC_LSTM_SCHEME, params, threshold, per_window)
