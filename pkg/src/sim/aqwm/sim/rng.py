"""Seeded random generation.

Every random draw in the simulator goes through :func:`make_rng`, a ``numpy.random.Generator`` on the PCG64
bit generator. Draws are sequential, so a longer request on the same seed extends a shorter one
(``standard_normal(2k)[:k] == standard_normal(k)``). Sub-seeds for independent trials are derived with
``numpy.random.SeedSequence`` from the parent seed and integer labels.
"""

import numpy as np

from .exc import InvalidArgumentError

GENERATOR_NAME = "numpy.random.PCG64"


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InvalidArgumentError(f"seed must be a non-negative integer, got {seed!r}", field="seed")
    return int(seed)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(_check_seed(seed)))


def derive_seed(seed: int, *labels: int) -> int:
    """Deterministic sub-seed for the trial identified by ``labels``"""
    entropy = [_check_seed(seed)] + [_check_seed(label) for label in labels]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])
