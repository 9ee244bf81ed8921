"""Static spread-spectrum watermarking.

A window of ``n * n_s`` samples carries ``n_s`` bits. Bit ``i`` is spread over the ``i``-th span of ``n``
samples with the shared key ``p``::

    w = y + beta * s[i] * p

and recovered by correlating the span with the key, ``value = <w, p> / (beta * n)``, whose sign is the bit.
"""

import logging
import math
from typing import List, Union

import numpy as np
from aqwm.dto import BitStream, PlannerMode, PnKey, ProductStats, SignalFrame, SoftBit, WatermarkParams
from scipy.special import erfc

from .exc import InfeasibleParametersError, InvalidArgumentError, ShapeError
from .rng import make_rng

LOG = logging.getLogger(__name__)

# tolerance for floor(delay_s * sample_rate_hz / n) on products like 0.625 * 1000
_FLOOR_EPS = 1e-9


def _check_positive(name: str, value: float) -> float:
    if not math.isfinite(value) or value <= 0:
        raise InvalidArgumentError(f"must be positive, got {value}", field=name)
    return float(value)


def _chips(key: Union[PnKey, np.ndarray]) -> np.ndarray:
    return key.chips if isinstance(key, PnKey) else np.asarray(key)


def gen_pn_key(n: int, seed: int) -> PnKey:
    """Random +1/-1 key of ``n`` chips"""
    if n < 2:
        raise InvalidArgumentError(f"key needs at least 2 chips, got {n}", field="n")
    rng = make_rng(seed)
    chips = np.where(rng.random(n) < 0.5, 1, -1)
    return PnKey(chips=chips, seed=seed)


def gen_bit_stream(n_s: int, seed: int) -> BitStream:
    """Random +1/-1 bit stream, the static scheme's shared secret"""
    if n_s < 1:
        raise InvalidArgumentError(f"must be positive, got {n_s}", field="n_s")
    rng = make_rng(seed)
    return BitStream(bits=np.where(rng.random(n_s) < 0.5, 1, -1))


def spread(key: PnKey, bits: BitStream) -> np.ndarray:
    """Full-window chip pattern ``s[i] * p[t]``"""
    return np.outer(bits.bits, key.chips).ravel().astype(np.float64)


def embed(frame: SignalFrame, key: PnKey, bits: BitStream, beta: float) -> SignalFrame:
    """Add the watermark ``beta * s[i] * p`` to every bit span of one window"""
    _check_positive("beta", beta)
    if len(frame) != key.n * bits.n_s:
        raise ShapeError(f"frame has {len(frame)} samples, expected n * n_s = {key.n} * {bits.n_s}")
    return frame.with_samples(frame.samples + beta * spread(key, bits))


def strip(frame: SignalFrame, key: PnKey, bits: BitStream, beta: float) -> SignalFrame:
    """Remove a known watermark"""
    return embed(frame, key, BitStream(bits=-bits.bits), beta)


def correlate(samples: np.ndarray, key: Union[PnKey, np.ndarray], n_s: int, beta: float) -> np.ndarray:
    """Soft values of stacked windows

    Args:
        samples: (windows, n * n_s) or (n * n_s,) samples
        key: Key or its chips
        n_s: Bits per window
        beta: Watermark amplitude

    Returns:
        (windows, n_s) or (n_s,) soft values
    """
    _check_positive("beta", beta)
    chips = _chips(key).astype(np.float64)
    n = chips.shape[0]
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[-1] != n * n_s:
        raise ShapeError(f"window has {samples.shape[-1]} samples, expected n * n_s = {n} * {n_s}")
    spans = samples.reshape(samples.shape[:-1] + (n_s, n))
    return (spans @ chips) / (beta * n)


def hard_bits(values: np.ndarray) -> np.ndarray:
    """Sign decision, a zero soft value resolves to +1"""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


def extract(frame: SignalFrame, key: PnKey, n_s: int, beta: float) -> List[SoftBit]:
    """Correlate every bit span of one window with the key"""
    if n_s < 1:
        raise InvalidArgumentError(f"must be positive, got {n_s}", field="n_s")
    values = correlate(frame.samples, key, n_s, beta)
    return [SoftBit.from_value(float(v)) for v in values]


def extract_bits(frame: SignalFrame, key: PnKey, n_s: int, beta: float) -> BitStream:
    return BitStream(bits=hard_bits(correlate(frame.samples, key, n_s, beta)))


def project_out_key(frame: SignalFrame, key: PnKey) -> SignalFrame:
    """Remove from every bit span its component along the key

    ``r = w - (<w, p> / n) * p`` per span. Embedding only adds multiples of ``p`` to the spans, so the result is
    the same for the watermarked and the original window.
    """
    n = key.n
    if len(frame) % n != 0:
        raise ShapeError(f"frame of {len(frame)} samples is not a whole number of {n}-chip spans")
    chips = key.chips.astype(np.float64)
    spans = frame.samples.reshape(-1, n)
    coeff = (spans @ chips) / n
    return frame.with_samples((spans - coeff[:, None] * chips[None, :]).ravel())


def theoretical_ber(beta: float, sigma: float, n: int) -> float:
    """Bit error probability of the correlator on a Gaussian carrier, ``erfc(beta sqrt(n) / (sigma sqrt(2))) / 2``"""
    _check_positive("sigma", sigma)
    _check_positive("beta", beta)
    if n < 1:
        raise InvalidArgumentError(f"must be positive, got {n}", field="n")
    return float(0.5 * erfc(beta * math.sqrt(n) / (sigma * math.sqrt(2.0))))


def _attacker_arg(beta, n, product: ProductStats, sigma: float):
    noise = math.sqrt(2.0 * (product.variance + 2.0 * sigma**2))
    return (1.0 + product.mean / (beta**2 * n**2)) * beta**2 * n * np.sqrt(n) / noise


def attacker_ber(beta: float, n: int, product: ProductStats, sigma: float) -> float:
    """Error probability of an attacker extracting bits by correlating two recorded windows"""
    _check_positive("beta", beta)
    _check_positive("sigma", sigma)
    if n < 1:
        raise InvalidArgumentError(f"must be positive, got {n}", field="n")
    if product.variance + 2.0 * sigma**2 <= 0:
        raise InvalidArgumentError("variances must be positive", field="product.variance")
    return float(0.5 * erfc(_attacker_arg(beta, n, product, sigma)))


def max_bits_per_window(delay_s: float, sample_rate_hz: float, n: int) -> int:
    """Largest n_s whose window fits in the detection delay, ``floor(d * f_s / n)``"""
    _check_positive("delay_s", delay_s)
    _check_positive("sample_rate_hz", sample_rate_hz)
    if n < 1:
        raise InvalidArgumentError(f"must be positive, got {n}", field="n")
    return int(math.floor(delay_s * sample_rate_hz / n + _FLOOR_EPS))


def plan_params(
    sigma: float,
    product: ProductStats,
    p_bar: float,
    p_under: float,
    delay_s: float,
    sample_rate_hz: float,
    mode: PlannerMode = PlannerMode.CONFUSION,
    beta_points: int = 400,
) -> WatermarkParams:
    """Smallest watermark meeting the error, attack and delay constraints

    Scans n = 2 .. floor(delay_s * f_s) and a logarithmic beta grid over [sigma / 100, 10 sigma]. The first n with
    a feasible beta wins, and within it the smallest beta.

    Args:
        sigma: Carrier standard deviation
        product: Statistics of the product of two carrier realisations
        p_bar: Upper bound on the legitimate bit error rate
        p_under: Attack tolerance, see ``mode``
        delay_s: Detection delay budget, one window must fit in it
        sample_rate_hz: Sampling frequency
        mode: ``strict`` requires attacker_ber >= 1 - p_under, ``confusion`` requires attacker_ber >= 0.5 - p_under
        beta_points: Size of the beta grid

    Returns:
        Planned parameters

    Raises:
        InfeasibleParametersError: no grid point satisfies the constraints
    """
    _check_positive("sigma", sigma)
    _check_positive("delay_s", delay_s)
    _check_positive("sample_rate_hz", sample_rate_hz)
    if not 0 < p_bar < 0.5:
        raise InvalidArgumentError(f"must lie in (0, 0.5), got {p_bar}", field="p_bar")
    if not 0 < p_under < 1:
        raise InvalidArgumentError(f"must lie in (0, 1), got {p_under}", field="p_under")
    if delay_s * sample_rate_hz < 4 - _FLOOR_EPS:
        raise InvalidArgumentError("delay_s * sample_rate_hz must be at least 4", field="delay_s")
    if beta_points < 2:
        raise InvalidArgumentError(f"must be at least 2, got {beta_points}", field="beta_points")
    if product.variance + 2.0 * sigma**2 <= 0:
        raise InvalidArgumentError("variances must be positive", field="product.variance")

    mode = PlannerMode(mode)
    target = 1.0 - p_under if mode == PlannerMode.STRICT else 0.5 - p_under
    n_max = int(math.floor(delay_s * sample_rate_hz + _FLOOR_EPS))
    betas = np.geomspace(sigma / 100.0, 10.0 * sigma, beta_points)
    LOG.debug("planner grid: n in [2, %d], %d beta points", n_max, beta_points)

    own_met = attacker_met = False
    for start in range(2, n_max + 1, 1024):
        ns = np.arange(start, min(start + 1024, n_max + 1), dtype=np.float64)[:, None]
        own = 0.5 * erfc(betas[None, :] * np.sqrt(ns) / (sigma * math.sqrt(2.0)))
        att = 0.5 * erfc(_attacker_arg(betas[None, :], ns, product, sigma))
        own_ok = own <= p_bar
        att_ok = att >= target
        own_met |= bool(own_ok.any())
        attacker_met |= bool(att_ok.any())
        feasible = own_ok & att_ok
        if feasible.any():
            row = int(np.argmax(feasible.any(axis=1)))
            col = int(np.argmax(feasible[row]))
            n = int(ns[row, 0])
            n_s = max_bits_per_window(delay_s, sample_rate_hz, n)
            if n_s < 1:
                raise InfeasibleParametersError(f"no room for a bit with n = {n}", constraint="delay")
            params = WatermarkParams(beta=float(betas[col]), n=n, n_s=n_s, sample_rate_hz=sample_rate_hz)
            LOG.info("planned beta=%.6g n=%d n_s=%d (%s mode)", params.beta, params.n, params.n_s, mode.value)
            return params

    if not own_met:
        constraint = "bit_error"
    elif not attacker_met:
        constraint = "attacker_error"
    else:
        constraint = "joint"
    raise InfeasibleParametersError(
        f"no (beta, n) with n <= {n_max} meets p_bar={p_bar}, p_under={p_under} in {mode.value} mode",
        constraint=constraint,
    )
