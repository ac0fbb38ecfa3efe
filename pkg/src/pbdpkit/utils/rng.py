"""Seeded random streams and replicate statistics.

Every stochastic routine takes an explicit ``numpy.random.Generator``. Replicates
get their own child streams through ``Generator.spawn`` so that replicate ``i``
depends only on the parent stream and ``i``, never on execution order.
"""

import math
from collections.abc import Iterable, Sequence

import numpy as np

MAX_SEED = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    """Build the master generator for a run.

    Args:
        seed: Unsigned 64-bit seed

    Returns:
        PCG64-backed generator

    Raises:
        ValueError: If the seed is outside [0, 2**64 - 1]
    """
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"Seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.default_rng(seed)


def spawn_streams(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Derive ``count`` independent child generators from ``rng``."""
    if count < 0:
        raise ValueError(f"Stream count must be nonnegative, got {count}")
    return rng.spawn(count)


def mean_stderr(values: Iterable[float]) -> tuple[float, float]:
    """Sample mean and standard error with compensated summation.

    Returns (mean, 0.0) for a single value and raises on an empty input.
    """
    data = [float(v) for v in values]
    count = len(data)
    if count == 0:
        raise ValueError("Cannot average an empty sample")
    mean = math.fsum(data) / count
    if count == 1:
        return mean, 0.0
    variance = math.fsum((v - mean) ** 2 for v in data) / (count - 1)
    return mean, math.sqrt(variance / count)


def proportion_stderr(hits: int, trials: int) -> tuple[float, float]:
    """Binomial proportion estimate and its standard error."""
    if trials <= 0:
        raise ValueError(f"Trials must be positive, got {trials}")
    phat = hits / trials
    return phat, math.sqrt(max(phat * (1.0 - phat), 0.0) / trials)


def bootstrap_stderr(estimates: Sequence[float]) -> float:
    """Standard deviation of a list of bootstrap replicates."""
    if len(estimates) < 2:
        return 0.0
    return float(np.std(np.asarray(estimates, dtype=float), ddof=1))
