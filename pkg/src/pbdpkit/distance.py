"""The d2 distance between point process laws.

d2 is the Wasserstein distance between laws on configurations with ground metric
d1. It is estimated from samples (optimal matching between two equal-size
samples), computed exactly between small enumerated laws (transportation
problem), or bounded for two PBDPs by TV of the count laws plus W1 of the
placement measures.
"""

import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from pbdpkit.carrier import (
    CarrierSpace,
    PointPattern,
    UnitInterval,
    d1,
    solve_assignment,
    solve_transport,
    w1_measures,
)
from pbdpkit.chain import tv_distance
from pbdpkit.models import PointProcessModel
from pbdpkit.pbdp import PbdpSpec
from pbdpkit.utils.rng import bootstrap_stderr

logger = logging.getLogger(__name__)

MAX_CONFIGURATIONS = 10_000
ENUMERATION_MAX_SITES = 4
ENUMERATION_MAX_CAP = 10
ENUMERATION_TAIL_TOL = 1e-9
DEFAULT_BOOTSTRAP = 200

Sampler = Callable[[np.random.Generator], PointPattern]
D2Method = Literal["empirical-OT", "exact-enumeration", "coupling-bound"]


@dataclass(frozen=True)
class D2Estimate:
    """A d2 value with its provenance.

    Attributes:
        value: Estimated or exact distance, in [0, 1]
        stderr: Standard error (0 for exact values and bounds)
        n_samples: Samples per side, or configurations enumerated
        method: How the value was obtained
        seed: Master seed behind a sampled estimate
    """

    value: float
    stderr: float
    n_samples: int
    method: D2Method
    seed: int | None = None

    def __post_init__(self) -> None:
        if not -1e-12 <= self.value <= 1.0 + 1e-12:
            raise ValueError(f"d2 value {self.value!r} outside [0, 1]")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")

    def to_row(self) -> dict[str, object]:
        return {
            "method": self.method,
            "value": self.value,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": "" if self.seed is None else self.seed,
        }


@dataclass(frozen=True)
class ConfigurationLaw:
    """An explicit distribution over finitely many configurations.

    Repeated configurations are merged; probabilities may sum to slightly less
    than one when the law was truncated.
    """

    atoms: tuple[tuple[PointPattern, float], ...]

    def __post_init__(self) -> None:
        merged: dict[PointPattern, list[float]] = defaultdict(list)
        for pattern, prob in self.atoms:
            if prob < 0:
                raise ValueError(f"Negative probability {prob!r} for {pattern}")
            merged[pattern].append(float(prob))
        atoms = tuple((pattern, math.fsum(ps)) for pattern, ps in merged.items())
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def of(cls, pairs: Iterable[tuple[PointPattern, float]]) -> "ConfigurationLaw":
        return cls(atoms=tuple(pairs))

    @classmethod
    def point_mass(cls, pattern: PointPattern) -> "ConfigurationLaw":
        return cls(atoms=((pattern, 1.0),))

    def merge(self, other: "ConfigurationLaw", weight: float = 0.5) -> "ConfigurationLaw":
        """Mixture ``weight * self + (1 - weight) * other``."""
        if not 0.0 <= weight <= 1.0:
            raise ValueError(f"Mixture weight must lie in [0, 1], got {weight}")
        return ConfigurationLaw.of(
            [(p, weight * q) for p, q in self.atoms]
            + [(p, (1 - weight) * q) for p, q in other.atoms]
        )

    @cached_property
    def total(self) -> float:
        return math.fsum(prob for _, prob in self.atoms)

    @property
    def size(self) -> int:
        return len(self.atoms)

    @property
    def patterns(self) -> list[PointPattern]:
        return [pattern for pattern, _ in self.atoms]

    @property
    def probs(self) -> np.ndarray:
        return np.asarray([prob for _, prob in self.atoms], dtype=float)

    def probability(self, pattern: PointPattern) -> float:
        return math.fsum(prob for p, prob in self.atoms if p == pattern)


def model_law(model: PointProcessModel) -> ConfigurationLaw:
    """Exact law of a model small enough to enumerate.

    Raises:
        ValueError: If the model has no enumerable law
    """
    law = model.exact_law()
    if law is None:
        raise ValueError(f"The {model.name} model with {model.site_count} sites is not enumerable")
    return ConfigurationLaw.of(law)


def enumerate_pbdp(spec: PbdpSpec, count_cap: int) -> ConfigurationLaw:
    """All configurations with at most ``count_cap`` points and their PBDP probabilities.

    P(count vector c) = pi(|c|) * multinomial(|c|; c) * prod nu_i^c_i.

    Raises:
        ValueError: If nu has too many atoms, the cap is too large, or the count
            law beyond the cap exceeds ENUMERATION_TAIL_TOL
    """
    if len(spec.nu.atoms) > ENUMERATION_MAX_SITES:
        raise ValueError(f"Enumeration supports at most {ENUMERATION_MAX_SITES} atoms of nu")
    if not 0 <= count_cap <= ENUMERATION_MAX_CAP:
        raise ValueError(f"count_cap must lie in [0, {ENUMERATION_MAX_CAP}], got {count_cap}")
    dist = spec.distribution
    tail = dist.survival(count_cap + 1) + dist.tail_bound
    if tail > ENUMERATION_TAIL_TOL:
        raise ValueError(f"count_cap={count_cap} leaves count mass {tail:.3e} unenumerated")

    points = spec.nu.points
    weights = spec.nu.weights
    atoms: list[tuple[PointPattern, float]] = []
    for total in range(count_cap + 1):
        p_total = dist.pmf(total)
        if p_total == 0:
            continue
        for combo in itertools.combinations_with_replacement(range(points.size), total):
            counts = np.bincount(np.asarray(combo, dtype=int), minlength=points.size)
            log_multinomial = math.lgamma(total + 1) - math.fsum(
                math.lgamma(c + 1) for c in counts
            )
            prob = p_total * math.exp(log_multinomial) * float(np.prod(weights**counts))
            atoms.append((PointPattern(points=tuple(points[list(combo)])), prob))
    return ConfigurationLaw.of(atoms)


def d1_matrix(
    space: CarrierSpace, left: Sequence[PointPattern], right: Sequence[PointPattern]
) -> np.ndarray:
    """Pairwise d1 between two lists of configurations."""
    cost = np.ones((len(left), len(right)))
    left_sizes = np.array([p.size for p in left], dtype=int)
    right_sizes = np.array([p.size for p in right], dtype=int)
    for size in np.intersect1d(left_sizes, right_sizes):
        rows = np.flatnonzero(left_sizes == size)
        cols = np.flatnonzero(right_sizes == size)
        if size == 0:
            cost[np.ix_(rows, cols)] = 0.0
        elif isinstance(space, UnitInterval):
            # Sorted storage makes the optimal matching positional.
            a = np.array([left[i].points for i in rows])
            b = np.array([right[j].points for j in cols])
            cost[np.ix_(rows, cols)] = np.abs(a[:, None, :] - b[None, :, :]).mean(axis=2)
        else:
            for i in rows:
                for j in cols:
                    cost[i, j] = d1(space, left[i], right[j])
    return cost


def empirical_d2(
    space: CarrierSpace,
    sampler1: Sampler,
    sampler2: Sampler,
    n_samples: int,
    rng: np.random.Generator,
    *,
    rng2: np.random.Generator | None = None,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int | None = None,
) -> D2Estimate:
    """W1 under d1 between n-sample empirical laws of two samplers.

    Both sides draw ``n_samples`` configurations, so the optimal coupling of the
    two empirical measures is an assignment. The estimator is biased upward and
    consistent. Its standard error comes from optimal matchings between random
    halves of the two samples, scaled by sqrt(1/2).

    Args:
        space: Carrier space of both samplers
        sampler1: Draws a configuration from the first law
        sampler2: Draws a configuration from the second law
        n_samples: Samples per side, at least 2
        rng: Stream for the first side (and the second, when ``rng2`` is None)
        rng2: Separate stream for the second side
        n_bootstrap: Number of half-sample resamples
        seed: Master seed, recorded in the estimate

    Returns:
        D2Estimate with method "empirical-OT"
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be at least 2, got {n_samples}")
    if rng2 is None:
        rng, rng2 = rng.spawn(2)
    first = [sampler1(rng) for _ in range(n_samples)]
    second = [sampler2(rng2) for _ in range(n_samples)]
    cost = d1_matrix(space, first, second)
    value = solve_assignment(cost, tie_break=False).cost / n_samples

    stderr = 0.0
    if n_bootstrap > 1:
        resampler = rng.spawn(1)[0]
        half = n_samples // 2
        halves = []
        for _ in range(n_bootstrap):
            rows = resampler.choice(n_samples, size=half, replace=False)
            cols = resampler.choice(n_samples, size=half, replace=False)
            halves.append(solve_assignment(cost[np.ix_(rows, cols)], tie_break=False).cost / half)
        stderr = bootstrap_stderr(halves) * math.sqrt(0.5)
    logger.debug(f"Empirical d2={value:.6g} +- {stderr:.3g} from {n_samples} samples per side")
    return D2Estimate(
        value=min(value, 1.0), stderr=stderr, n_samples=n_samples, method="empirical-OT", seed=seed
    )


def exact_d2_small(
    space: CarrierSpace, law1: ConfigurationLaw, law2: ConfigurationLaw
) -> D2Estimate:
    """Exact d2 between two enumerated laws by a transportation problem with cost d1.

    Truncated laws are renormalized first.

    Raises:
        ValueError: If either law has more than MAX_CONFIGURATIONS configurations
    """
    for law in (law1, law2):
        if law.size > MAX_CONFIGURATIONS:
            raise ValueError(
                f"Enumeration of {law.size} configurations exceeds {MAX_CONFIGURATIONS}"
            )
    cost = d1_matrix(space, law1.patterns, law2.patterns)
    plan = solve_transport(law1.probs / law1.total, law2.probs / law2.total, cost)
    return D2Estimate(
        value=min(max(plan.cost, 0.0), 1.0),
        stderr=0.0,
        n_samples=law1.size + law2.size,
        method="exact-enumeration",
    )


def coupling_bound(spec1: PbdpSpec, spec2: PbdpSpec) -> float:
    """Upper bound on d2 between two PBDPs: TV of the count laws plus W1 of nu1, nu2.

    Raises:
        ValueError: If the two processes live on different spaces
    """
    if spec1.space != spec2.space:
        raise ValueError("Both PBDPs must live on the same carrier space")
    tv = tv_distance(spec1.distribution, spec2.distribution)
    w1 = w1_measures(spec1.space, spec1.nu, spec2.nu)
    return tv + w1
