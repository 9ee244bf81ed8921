"""Monte Carlo experiments: correlator BER grid, static against dynamic extraction, power-ratio curves."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from aqwm.dto import (
    BerPoint,
    FeatureCalibration,
    MetricsBundle,
    PnKey,
    PowerRatioPoint,
    SchemeBerPoint,
    SchemeMode,
    SignalFrame,
    WatermarkParams,
)

from ..exc import InvalidArgumentError
from ..fingerprint import calibrate_for_key, fingerprint_bits
from ..rng import derive_seed, make_rng
from ..signal import gen_gaussian, split_windows
from ..sswm import correlate, embed, gen_bit_stream, gen_pn_key, hard_bits, spread, theoretical_ber
from ..threat import accumulate, power_ratio

LOG = logging.getLogger(__name__)

# samples drawn per Monte Carlo chunk
_CHUNK_SAMPLES = 1 << 20

# labels of the derived seeds
_KEY, _BITS, _CARRIER, _CALIBRATION = 1, 2, 3, 4


def _ber_point(n: int, beta_over_sigma: float, trials: int, seed: int) -> BerPoint:
    """One grid point: ``trials`` single-bit windows on a unit-variance carrier"""
    key = gen_pn_key(n, derive_seed(seed, _KEY))
    chips = key.chips.astype(np.float64)
    rng = make_rng(derive_seed(seed, _CARRIER))
    rows = max(1, _CHUNK_SAMPLES // n)
    errors = 0
    done = 0
    while done < trials:
        k = min(rows, trials - done)
        bits = np.where(rng.random(k) < 0.5, 1, -1)
        carrier = rng.standard_normal((k, n))
        soft = correlate(carrier + beta_over_sigma * bits[:, None] * chips[None, :], chips, 1, beta_over_sigma)
        errors += int(np.count_nonzero(hard_bits(soft[:, 0]) != bits))
        done += k
    return BerPoint(
        beta_over_sigma=beta_over_sigma,
        n=n,
        empirical_ber=errors / trials,
        theoretical_ber=theoretical_ber(beta_over_sigma, 1.0, n),
        bits=trials,
    )


def ber_sweep(
    n_values: Iterable[int],
    beta_over_sigma_values: Iterable[float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> MetricsBundle:
    """Empirical against closed-form correlator BER over an (n, beta/sigma) grid

    Every grid point draws from its own sub-seed, so the result does not depend on ``workers``.

    Args:
        n_values: Chips per bit
        beta_over_sigma_values: Watermark amplitude relative to the carrier deviation
        trials: Bits per grid point
        seed: Parent seed
        workers: Threads evaluating grid points concurrently

    Returns:
        A metrics bundle holding one BER point per grid point, n-major
    """
    n_values = sorted(set(int(n) for n in n_values))
    betas = sorted(set(float(b) for b in beta_over_sigma_values))
    if not n_values or not betas:
        raise InvalidArgumentError("the sweep grid is empty", field="n_values")
    if min(n_values) < 1:
        raise InvalidArgumentError("chips per bit must be positive", field="n_values")
    if min(betas) <= 0:
        raise InvalidArgumentError("amplitudes must be positive", field="beta_over_sigma_values")
    if trials < 1:
        raise InvalidArgumentError(f"must be positive, got {trials}", field="trials")
    if workers < 1:
        raise InvalidArgumentError(f"must be positive, got {workers}", field="workers")

    grid: List[Tuple[int, float, int]] = [
        (n, b, derive_seed(seed, i, j)) for i, n in enumerate(n_values) for j, b in enumerate(betas)
    ]
    LOG.info("BER sweep over %d grid points, %d trials each, %d worker(s)", len(grid), trials, workers)
    started = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda g: _ber_point(g[0], g[1], trials, g[2]), grid))
    else:
        points = [_ber_point(n, b, trials, s) for n, b, s in grid]
    for p in points:
        LOG.debug(
            "n=%d beta/sigma=%g empirical %.6g theory %.6g", p.n, p.beta_over_sigma, p.empirical_ber, p.theoretical_ber
        )
    return MetricsBundle(ber_points=points, runtime_s=time.perf_counter() - started)


def _carrier_windows(params: WatermarkParams, count: int, sigma: float, seed: int) -> List[SignalFrame]:
    frame = gen_gaussian(0.0, sigma, count * params.window_len, params.sample_rate_hz, seed)
    return split_windows(frame, params.window_len)


def dynamic_calibration(
    params: WatermarkParams, key: PnKey, sigma: float, seed: int, windows: int = 200, bits_per_feature: int = 1
) -> FeatureCalibration:
    """Key-projected calibration on clean carrier windows"""
    return calibrate_for_key(_carrier_windows(params, windows, sigma, seed), key, bits_per_feature)


def scheme_ber_comparison(
    beta_over_sigma_values: Iterable[float],
    n: int,
    n_s: int,
    windows: int,
    seed: int,
    calibration_windows: int = 200,
) -> List[SchemeBerPoint]:
    """Extraction error of the static and the dynamic (fingerprint) scheme on shared carriers and key"""
    if windows < 1:
        raise InvalidArgumentError(f"must be positive, got {windows}", field="windows")
    key = gen_pn_key(n, derive_seed(seed, _KEY))
    geometry = WatermarkParams(beta=1.0, n=n, n_s=n_s, sample_rate_hz=1.0)
    carriers = _carrier_windows(geometry, windows, 1.0, derive_seed(seed, _CARRIER))
    calib = dynamic_calibration(geometry, key, 1.0, derive_seed(seed, _CALIBRATION), calibration_windows)
    static_bits = gen_bit_stream(n_s, derive_seed(seed, _BITS))
    dynamic_bits = np.stack([fingerprint_bits(y, key, calib, n_s).bits for y in carriers])
    stacked = np.stack([y.samples for y in carriers])

    points = []
    for beta in sorted(set(float(b) for b in beta_over_sigma_values)):
        static_w = stacked + beta * spread(key, static_bits)[None, :]
        static_err = np.mean(hard_bits(correlate(static_w, key, n_s, beta)) != static_bits.bits[None, :])
        patterns = (dynamic_bits[:, :, None] * key.chips[None, None, :]).reshape(windows, -1)
        dynamic_w = stacked + beta * patterns
        # the cloud recomputes the expected bits from what it received
        expected = np.stack(
            [fingerprint_bits(y.with_samples(w), key, calib, n_s).bits for y, w in zip(carriers, dynamic_w)]
        )
        dynamic_err = np.mean(hard_bits(correlate(dynamic_w, key, n_s, beta)) != expected)
        points.append(
            SchemeBerPoint(
                beta_over_sigma=beta,
                n=n,
                static_ber=float(static_err),
                dynamic_ber=float(dynamic_err),
                bits=windows * n_s,
            )
        )
        LOG.info("beta/sigma=%g static BER %.4g dynamic BER %.4g", beta, static_err, dynamic_err)
    return points


def power_ratio_curve(
    scheme: Union[SchemeMode, str],
    m_values: Iterable[int],
    params: WatermarkParams,
    seed: int,
    sigma: float = 1.0,
    calib: Optional[FeatureCalibration] = None,
    key: Optional[PnKey] = None,
) -> List[PowerRatioPoint]:
    """Key-power ratio an eavesdropper sees after accumulating m watermarked windows

    Args:
        scheme: ``static`` embeds one bit stream in every window; the dynamic modes embed fingerprint bits
        m_values: Accumulation sizes
        params: Scheme parameters
        seed: Parent seed of key, bits, carrier and calibration
        sigma: Carrier standard deviation
        calib: Fingerprint calibration of the dynamic scheme, built from fresh carrier windows when missing
        key: The shared key, drawn from ``seed`` when missing

    Returns:
        One point per accumulation size, in increasing m
    """
    scheme = SchemeMode(scheme)
    m_values = sorted(set(int(m) for m in m_values))
    if not m_values or m_values[0] < 1:
        raise InvalidArgumentError("accumulation sizes must be positive", field="m_values")
    key = key if key is not None else gen_pn_key(params.n, derive_seed(seed, _KEY))
    carriers = _carrier_windows(params, m_values[-1], sigma, derive_seed(seed, _CARRIER))

    if scheme == SchemeMode.STATIC:
        bits = gen_bit_stream(params.n_s, derive_seed(seed, _BITS))
        marked = [embed(y, key, bits, params.beta) for y in carriers]
    else:
        if calib is None:
            calib = dynamic_calibration(params, key, sigma, derive_seed(seed, _CALIBRATION))
        marked = [embed(y, key, fingerprint_bits(y, key, calib, params.n_s), params.beta) for y in carriers]

    curve = [PowerRatioPoint(m=m, ratio=power_ratio(accumulate(marked[:m]))) for m in m_values]
    LOG.info("%s power ratio: %s", scheme.value, ", ".join(f"m={p.m}: {p.ratio:.3g}" for p in curve))
    return curve


def metrics_to_frame(bundle: MetricsBundle) -> pd.DataFrame:
    """Long-format table of every metric in a bundle, one row per point"""
    rows = []
    for p in bundle.ber_points:
        rows.append({"metric": "ber", **p.model_dump()})
    for p in bundle.scheme_ber_points:
        rows.append({"metric": "scheme_ber", **p.model_dump()})
    for p in bundle.power_ratio_curve:
        rows.append({"metric": "power_ratio", **p.model_dump()})
    if bundle.detection is not None:
        for k, value in enumerate(bundle.detection.per_window_mismatch):
            rows.append({"metric": "mismatch", "window": k, "mismatch": value})
    columns = [
        "metric",
        "beta_over_sigma",
        "n",
        "empirical_ber",
        "theoretical_ber",
        "static_ber",
        "dynamic_ber",
        "bits",
        "m",
        "ratio",
        "window",
        "mismatch",
    ]
    return pd.DataFrame(rows, columns=columns)


def write_metrics_csv(bundle: MetricsBundle, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics_to_frame(bundle).to_csv(path, index=False)
    logging.info("wrote metrics CSV to %s", path)
    return path
