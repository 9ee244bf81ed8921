"""Stochastic fingerprint features and their quantization into bit streams."""

import logging
from typing import Sequence

import numpy as np
from aqwm.dto import FEATURE_ORDER, BitStream, FeatureCalibration, FeatureVector, PnKey, SignalFrame
from scipy.signal import welch

from .exc import InvalidArgumentError
from .sswm import project_out_key

MIN_FRAME_LEN = 8
MIN_CALIBRATION_FRAMES = 10
SPREAD_FLOOR = 1e-9
POWER_FLOOR = 1e-30


def spectral_flatness(x: np.ndarray) -> float:
    """Geometric over arithmetic mean of the averaged power spectrum, DC excluded

    The spectrum is a Welch estimate (Hann window, segments of ``max(8, N // 8)`` samples, half overlap); a single
    periodogram of white noise has flatness near exp(-0.577) rather than 1.
    """
    nperseg = max(MIN_FRAME_LEN, x.shape[0] // 8)
    _, psd = welch(x, nperseg=min(nperseg, x.shape[0]), detrend="constant")
    power = np.maximum(psd[1:], POWER_FLOOR)
    arithmetic = float(np.mean(power))
    geometric = float(np.exp(np.mean(np.log(power))))
    return float(min(max(geometric / arithmetic, 0.0), 1.0))


def features(frame: SignalFrame) -> FeatureVector:
    """Spectral flatness, mean, variance, skewness and kurtosis of a frame"""
    x = frame.samples
    if x.shape[0] < MIN_FRAME_LEN:
        raise InvalidArgumentError(f"frame needs at least {MIN_FRAME_LEN} samples, got {x.shape[0]}", field="frame")

    if np.ptp(x) == 0:
        # constant frame, all energy sits in the excluded DC bin
        return FeatureVector(spectral_flatness=0.0, mean=float(x[0]), variance=0.0, skewness=0.0, kurtosis=0.0)

    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d**2))
    if m2 == 0:
        return FeatureVector(spectral_flatness=0.0, mean=mean, variance=0.0, skewness=0.0, kurtosis=0.0)
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    return FeatureVector(
        spectral_flatness=spectral_flatness(x),
        mean=mean,
        variance=float(np.var(x)),
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
    )


def calibrate(frames: Sequence[SignalFrame], bits_per_feature: int = 1) -> FeatureCalibration:
    """Per-feature median, interquartile range and equiprobable thresholds over clean frames"""
    if len(frames) < MIN_CALIBRATION_FRAMES:
        raise InvalidArgumentError(
            f"need at least {MIN_CALIBRATION_FRAMES} calibration frames, got {len(frames)}", field="frames"
        )
    if bits_per_feature < 1:
        raise InvalidArgumentError(f"must be positive, got {bits_per_feature}", field="bits_per_feature")

    table = np.stack([features(f).as_array() for f in frames])
    centers = np.median(table, axis=0)
    q75, q25 = np.percentile(table, [75, 25], axis=0)
    spreads = q75 - q25
    if np.any(spreads < SPREAD_FLOOR):
        floored = [name for name, s in zip(FEATURE_ORDER, spreads) if s < SPREAD_FLOOR]
        logging.warning("calibration spread floored at %g for %s", SPREAD_FLOOR, ", ".join(floored))
    spreads = np.maximum(spreads, SPREAD_FLOOR)

    levels = np.arange(1, bits_per_feature + 1) / (bits_per_feature + 1)
    thresholds = np.quantile(table, levels, axis=0).T
    # a single cut is the median itself
    if bits_per_feature == 1:
        thresholds = centers[:, None]
    thresholds = np.maximum.accumulate(thresholds, axis=1)

    return FeatureCalibration(
        centers=centers.tolist(),
        spreads=spreads.tolist(),
        thresholds=thresholds.tolist(),
        bits_per_feature=bits_per_feature,
    )


def calibrate_for_key(frames: Sequence[SignalFrame], key: PnKey, bits_per_feature: int = 1) -> FeatureCalibration:
    """Calibration on key-projected frames, the variant used by the dynamic scheme"""
    return calibrate([project_out_key(f, key) for f in frames], bits_per_feature)


def quantize(fv: FeatureVector, calib: FeatureCalibration, n_s: int) -> BitStream:
    """Threshold every feature and repeat the code cyclically to ``n_s`` bits"""
    if n_s < 1:
        raise InvalidArgumentError(f"must be positive, got {n_s}", field="n_s")
    values = fv.as_array()
    cuts = np.asarray(calib.thresholds, dtype=np.float64)
    code = np.where(values[:, None] > cuts, 1, -1).ravel()
    return BitStream(bits=np.resize(code, n_s))


def fingerprint_bits(frame: SignalFrame, key: PnKey, calib: FeatureCalibration, n_s: int) -> BitStream:
    """Dynamic bit stream of a window

    Features are taken on the key-projected window, so the device (on y) and the cloud (on the watermarked w)
    derive the same bits.
    """
    return quantize(features(project_out_key(frame, key)), calib, n_s)
