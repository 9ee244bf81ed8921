"""Signal frames: synthetic generation, CSV ingestion and windowed statistics."""

import logging
import math
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd
from aqwm.dto import ProductStats, SignalFrame, SignalStats

from .exc import InvalidArgumentError, ParseError, ShapeError, SignalIOError
from .rng import make_rng


def _check_rate(sample_rate_hz: float) -> float:
    if not math.isfinite(sample_rate_hz) or sample_rate_hz <= 0:
        raise InvalidArgumentError(f"must be positive, got {sample_rate_hz}", field="sample_rate_hz")
    return float(sample_rate_hz)


def gen_gaussian(mean: float, std_dev: float, length: int, sample_rate_hz: float, seed: int) -> SignalFrame:
    """Frame of i.i.d. Gaussian samples

    Args:
        mean: Distribution mean
        std_dev: Distribution standard deviation, zero gives a constant frame
        length: Number of samples
        sample_rate_hz: Sampling frequency of the frame
        seed: Generator seed; a longer frame on the same seed extends a shorter one

    Returns:
        The generated frame
    """
    if length < 1:
        raise InvalidArgumentError(f"must be positive, got {length}", field="length")
    if not math.isfinite(std_dev) or std_dev < 0:
        raise InvalidArgumentError(f"must be non-negative, got {std_dev}", field="std_dev")
    if not math.isfinite(mean):
        raise InvalidArgumentError(f"must be finite, got {mean}", field="mean")
    _check_rate(sample_rate_hz)

    rng = make_rng(seed)
    samples = mean + std_dev * rng.standard_normal(length)
    return SignalFrame(samples=samples, sample_rate_hz=sample_rate_hz)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path: Union[str, Path], sample_rate_hz: float) -> SignalFrame:
    """Read a single-column CSV recording

    Blank lines are skipped. A first row that is not a number at all is treated as a header and skipped; ``nan`` or
    ``inf`` there are data and get rejected like anywhere else. Reported rows are line numbers in the file.

    Raises:
        SignalIOError: the file does not exist or is not UTF-8 text
        ParseError: a data row is not a finite decimal number
        InvalidArgumentError: the file holds no data rows
    """
    _check_rate(sample_rate_hz)
    path = Path(path)
    try:
        df = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=False, encoding="utf-8")
    except FileNotFoundError as e:
        raise SignalIOError(f"signal file not found: {path}") from e
    except UnicodeDecodeError as e:
        raise SignalIOError(f"{path} is not UTF-8 text: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise InvalidArgumentError(f"{path} contains no data", field="path") from e
    except pd.errors.ParserError as e:
        raise ParseError(f"{path} is not a single-column file: {e}", row=0) from e

    if df.shape[1] != 1:
        raise ParseError(f"{path} has {df.shape[1]} columns, expected 1", row=1)

    raw = df[0].str.strip()
    # the index still counts blank lines
    raw = raw[raw.notna() & (raw != "")]
    if len(raw) and not _is_number(raw.iloc[0]):
        logging.warning("skipping header row %r in %s", raw.iloc[0], path)
        raw = raw.iloc[1:]
    if raw.empty:
        raise InvalidArgumentError(f"{path} contains no data rows", field="path")

    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        idx = int(np.argmax(bad))
        raise ParseError(f"not a finite number: {raw.iloc[idx]!r}", row=int(raw.index[idx]) + 1)

    return SignalFrame(samples=values, sample_rate_hz=sample_rate_hz)


def stats(frame: SignalFrame) -> SignalStats:
    """Mean and population variance"""
    x = frame.samples
    return SignalStats(mean=float(np.mean(x)), variance=float(np.var(x)), count=len(frame))


def pooled_stats(a: SignalStats, b: SignalStats) -> SignalStats:
    """Statistics of the concatenation of two summarized frames"""
    count = a.count + b.count
    mean = (a.count * a.mean + b.count * b.mean) / count
    delta = b.mean - a.mean
    m2 = a.count * a.variance + b.count * b.variance + delta * delta * a.count * b.count / count
    return SignalStats(mean=mean, variance=max(m2 / count, 0.0), count=count)


def product_stats(a: SignalFrame, b: SignalFrame) -> ProductStats:
    """Mean and population variance of the element-wise product of two realisations"""
    if len(a) != len(b):
        raise ShapeError(f"frames differ in length: {len(a)} != {len(b)}")
    prod = a.samples * b.samples
    return ProductStats(mean=float(np.mean(prod)), variance=float(np.var(prod)))


def split_windows(frame: SignalFrame, window_len: int) -> List[SignalFrame]:
    """Cut a frame into consecutive windows of exactly ``window_len`` samples"""
    if window_len < 1:
        raise InvalidArgumentError(f"must be positive, got {window_len}", field="window_len")
    if len(frame) % window_len != 0:
        raise ShapeError(f"frame of {len(frame)} samples is not a whole number of {window_len}-sample windows")
    rows = frame.samples.reshape(-1, window_len)
    return [frame.with_samples(row) for row in rows]


def concat_windows(windows: Sequence[SignalFrame]) -> SignalFrame:
    if not windows:
        raise InvalidArgumentError("no windows to concatenate", field="windows")
    rates = {w.sample_rate_hz for w in windows}
    if len(rates) != 1:
        raise ShapeError(f"windows have different sample rates: {sorted(rates)}")
    return windows[0].with_samples(np.concatenate([w.samples for w in windows]))


def stack_windows(windows: Sequence[SignalFrame], window_len: int) -> np.ndarray:
    """(windows, window_len) view of a window sequence"""
    for k, w in enumerate(windows):
        if len(w) != window_len:
            raise ShapeError(f"window {k} has {len(w)} samples, expected {window_len}")
    if not windows:
        return np.empty((0, window_len))
    return np.stack([w.samples for w in windows])
