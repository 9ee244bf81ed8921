"""Adversaries: data injection and the accumulation eavesdropper.

An eavesdropper who records ``m`` windows and sums them sees ``sum(y_k) + beta * sum(s_k (x) p)``. Under the static
scheme the watermark term grows like ``m`` while the carrier grows like ``sqrt(m)``, so the chip pattern emerges
from the sum; under the dynamic scheme the per-window bits decorrelate and it does not.
"""

import logging
from typing import List, Optional, Sequence, Union

import numpy as np
from aqwm.dto import (
    AccumulatedObservation,
    AttackConfig,
    AttackKind,
    BitStream,
    KeyEstimate,
    PnKey,
    SignalFrame,
    WatermarkParams,
)

from .exc import InvalidArgumentError, ShapeError
from .rng import make_rng
from .signal import stack_windows
from .sswm import embed, hard_bits

LOG = logging.getLogger(__name__)


def _start_window(cfg: AttackConfig, window_len: int) -> int:
    if cfg.start_sample % window_len != 0:
        raise InvalidArgumentError(
            f"{cfg.start_sample} is not a multiple of the window length {window_len}", field="start_sample"
        )
    return cfg.start_sample // window_len


def _cover(rng: np.random.Generator, cfg: AttackConfig, like: SignalFrame) -> SignalFrame:
    return like.with_samples(cfg.injected_mean + cfg.injected_std * rng.standard_normal(len(like)))


def inject(stream: Sequence[SignalFrame], cfg: AttackConfig) -> List[SignalFrame]:
    """Replace every window from ``cfg.start_sample`` on with seeded Gaussian samples"""
    if cfg.kind != AttackKind.INJECTION:
        raise InvalidArgumentError(f"expected an injection attack, got {cfg.kind.value}", field="kind")
    stream = list(stream)
    if not stream:
        return stream
    start = _start_window(cfg, len(stream[0]))
    rng = make_rng(cfg.seed)
    attacked = stream[:start] + [_cover(rng, cfg, w) for w in stream[start:]]
    if start < len(stream):
        LOG.info("injection from window %d, %d windows replaced", start, len(stream) - start)
    return attacked


def accumulate(windows: Sequence[SignalFrame], aligned: bool = True, seed: int = 0) -> AccumulatedObservation:
    """Element-wise sum of recorded windows

    Args:
        windows: The recorded windows, all of one length
        aligned: Whether the eavesdropper is synchronised to the window boundaries; when not, every window is
            circularly shifted by a seeded random offset before summing
        seed: Seed of the offsets of an unsynchronised eavesdropper

    Returns:
        The accumulated observation
    """
    if not windows:
        raise InvalidArgumentError("need at least one window", field="windows")
    stacked = stack_windows(windows, len(windows[0]))
    if not aligned:
        rng = make_rng(seed)
        offsets = rng.integers(0, stacked.shape[1], stacked.shape[0])
        stacked = np.stack([np.roll(row, int(k)) for row, k in zip(stacked, offsets)])
    return AccumulatedObservation(
        sum_samples=stacked.sum(axis=0),
        windows_summed=stacked.shape[0],
        mean_window_variance=float(np.mean(np.var(stacked, axis=1))),
    )


def power_ratio(acc: AccumulatedObservation) -> float:
    """Key-to-carrier power proxy ``m * kappa / sigma2`` of an accumulated window

    With ``v`` the mean per-window variance and ``P`` the variance of the sum, the coherent per-sample power is
    ``kappa = max(P - m v, 0) / (m (m - 1))`` and the carrier variance ``sigma2 = v - kappa``. A static watermark
    gives about ``m beta^2 / sigma^2``, a dynamic one about 0.
    """
    m = acc.windows_summed
    v = acc.mean_window_variance
    if v == 0 or m == 1:
        return 0.0
    total = float(np.var(acc.sum_samples))
    kappa = max(total - m * v, 0.0) / (m * (m - 1))
    sigma2 = max(v - kappa, 1e-12 * v)
    return float(m * kappa / sigma2)


def estimate_key(acc: AccumulatedObservation, n: int, n_s: int) -> KeyEstimate:
    """Sign-sum estimate of the key from an accumulated window

    Every bit span of the sum is the key times an unknown bit sign. The spans are aligned to the strongest one before
    they are folded, so the folded key comes out up to one global sign, the same ambiguity (p, s) ~ (-p, -s) the
    legitimate pair has.
    """
    if acc.sum_samples.shape[0] != n * n_s:
        raise ShapeError(f"accumulated window has {acc.sum_samples.shape[0]} samples, expected n * n_s = {n * n_s}")
    spans = acc.sum_samples.reshape(n_s, n)
    reference = spans[int(np.argmax(np.sum(spans * spans, axis=1)))]
    folded = hard_bits(hard_bits(spans @ reference).astype(np.float64) @ spans)
    pattern = hard_bits(acc.sum_samples)
    ratio = power_ratio(acc)
    LOG.debug("key estimate from %d windows, power ratio %.4g", acc.windows_summed, ratio)
    return KeyEstimate(chips=PnKey(chips=folded), pattern=PnKey(chips=pattern), power_ratio=ratio)


def estimate_bits(acc: AccumulatedObservation, key: PnKey, n_s: int) -> BitStream:
    """The static bit stream as seen through an estimated key"""
    if acc.sum_samples.shape[0] != key.n * n_s:
        raise ShapeError(f"accumulated window has {acc.sum_samples.shape[0]} samples, expected {key.n * n_s}")
    spans = acc.sum_samples.reshape(n_s, key.n)
    return BitStream(bits=hard_bits(spans @ key.chips.astype(np.float64)))


def forge(
    cover: SignalFrame, key_estimate: Union[PnKey, np.ndarray], bits_estimate: BitStream, beta: float
) -> SignalFrame:
    """Counterfeit a legitimate window by embedding estimated bits with an estimated key

    A zero ``beta`` returns the cover itself.
    """
    key = key_estimate if isinstance(key_estimate, PnKey) else PnKey(chips=key_estimate)
    if beta < 0:
        raise InvalidArgumentError(f"must not be negative, got {beta}", field="beta")
    if len(cover) != key.n * bits_estimate.n_s:
        raise ShapeError(f"cover has {len(cover)} samples, expected n * n_s = {key.n} * {bits_estimate.n_s}")
    if beta == 0:
        return cover
    return embed(cover, key, bits_estimate, beta)


def eavesdrop_forge(
    stream: Sequence[SignalFrame], cfg: AttackConfig, params: WatermarkParams, aligned: bool = True
) -> List[SignalFrame]:
    """Record, accumulate and forge

    The ``eavesdrop_windows`` windows just before ``start_sample`` are accumulated; every window from
    ``start_sample`` on is replaced by a fresh seeded Gaussian cover carrying the estimated full-window chip pattern.
    """
    if cfg.kind != AttackKind.EAVESDROP_FORGE:
        raise InvalidArgumentError(f"expected an eavesdrop_forge attack, got {cfg.kind.value}", field="kind")
    stream = list(stream)
    start = _start_window(cfg, params.window_len)
    recorded = stream[max(0, start - cfg.eavesdrop_windows) : start]
    if not recorded:
        raise InvalidArgumentError("no window recorded before the attack starts", field="start_sample")
    if len(recorded) < cfg.eavesdrop_windows:
        LOG.warning("only %d of %d eavesdropped windows available", len(recorded), cfg.eavesdrop_windows)

    estimate = estimate_key(accumulate(recorded, aligned=aligned, seed=cfg.seed), params.n, params.n_s)
    beta = cfg.forge_beta if cfg.forge_beta is not None else params.beta
    rng = make_rng(cfg.seed)
    single = BitStream(bits=[1])
    forged = [forge(_cover(rng, cfg, w), estimate.pattern, single, beta) for w in stream[start:]]
    if forged:
        LOG.info(
            "forging %d windows from window %d after accumulating %d (power ratio %.4g)",
            len(forged),
            start,
            len(recorded),
            estimate.power_ratio,
        )
    return stream[:start] + forged


def chip_agreement(
    estimate: Union[PnKey, np.ndarray], truth: Union[PnKey, np.ndarray], up_to_sign: bool = True
) -> float:
    """Fraction of chips on which an estimate matches the true key

    With ``up_to_sign`` a negated estimate counts as a full match.
    """
    a = estimate.chips if isinstance(estimate, PnKey) else np.asarray(estimate)
    b = truth.chips if isinstance(truth, PnKey) else np.asarray(truth)
    if a.shape != b.shape:
        raise ShapeError(f"key lengths differ: {a.shape[0]} != {b.shape[0]}")
    agreement = float(np.mean(a == b))
    return max(agreement, 1.0 - agreement) if up_to_sign else agreement


def attack_stream(
    stream: Sequence[SignalFrame], cfg: Optional[AttackConfig], params: WatermarkParams
) -> List[SignalFrame]:
    """Apply whichever attack ``cfg`` describes, or none"""
    if cfg is None:
        return list(stream)
    if cfg.kind == AttackKind.INJECTION:
        return inject(stream, cfg)
    return eavesdrop_forge(stream, cfg, params)
