"""Independent Bernoulli indicators at the sites i/n of the unit interval."""

import itertools
import math
from collections.abc import Sequence

import numpy as np

from pbdpkit.carrier import DiscreteMeasure, PointPattern, UnitInterval
from pbdpkit.models.base import ExactLaw, MomentSummary, PointProcessModel

EXACT_LAW_MAX_SITES = 16


class BernoulliModel(PointProcessModel):
    """Xi = sum_i I_i delta_{i/n} with independent I_i ~ Bernoulli(p_i).

    Attributes:
        p: Success probability per site, site j sitting at (j + 1)/n
    """

    name = "bernoulli"
    supports_pair_palm = True
    independent_scattering = True

    def __init__(self, p: Sequence[float]) -> None:
        probs = np.asarray(p, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("Bernoulli model needs at least one success probability")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("Bernoulli probabilities must lie in [0, 1]")
        n = probs.size
        super().__init__(UnitInterval(), ((j + 1) / n for j in range(n)))
        probs.setflags(write=False)
        self.p = probs

    @classmethod
    def equal(cls, n: int, p: float) -> "BernoulliModel":
        return cls(np.full(n, p))

    @property
    def n(self) -> int:
        return int(self.p.size)

    @property
    def is_equal_p(self) -> bool:
        return bool(np.all(self.p == self.p[0]))

    def sample(self, rng: np.random.Generator) -> PointPattern:
        hits = rng.random(self.n) < self.p
        return PointPattern(points=tuple(self._site_array[hits]))

    def moments(self, rng: np.random.Generator | None = None) -> MomentSummary:
        p = self.p
        return MomentSummary.from_cumulants(
            k1=math.fsum(p),
            k2=math.fsum(p * (1 - p)),
            k3=math.fsum(p * (1 - p) * (1 - 2 * p)),
        )

    def mean_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_arrays(self.sites, self.p.tolist())

    def second_factorial_site_marginal(self, site: int) -> tuple[float, float]:
        """p_i (|lambda| - p_i)."""
        self._check_site(site)
        p_i = float(self.p[site])
        return p_i * (math.fsum(self.p) - p_i), 0.0

    def sample_palm(self, site: int, rng: np.random.Generator) -> PointPattern:
        """Independence makes the reduced Palm process Xi without the indicator at the site."""
        self._check_site(site)
        if self.p[site] <= 0:
            raise ValueError(f"Site {site} has zero intensity")
        hits = rng.random(self.n) < self.p
        hits[site] = False
        return PointPattern(points=tuple(self._site_array[hits]))

    def sample_pair_palm(self, first: int, second: int, rng: np.random.Generator) -> PointPattern:
        """Second-order reduced Palm process: both indicators removed."""
        self._check_site(first)
        self._check_site(second)
        if first == second:
            raise ValueError("Pair Palm sites must differ")
        hits = rng.random(self.n) < self.p
        hits[[first, second]] = False
        return PointPattern(points=tuple(self._site_array[hits]))

    def neighbourhoods(self, site: int) -> tuple[frozenset[int], frozenset[int]]:
        self._check_site(site)
        return frozenset({site}), frozenset({site})

    def pair_neighbourhoods(
        self, first: int, second: int
    ) -> tuple[frozenset[int], frozenset[int]]:
        """Type-II neighbourhoods A_xy = B_xy = {x, y}."""
        self._check_site(first)
        self._check_site(second)
        pair = frozenset({first, second})
        return pair, pair

    def pair_intensity(self, first: int, second: int) -> float:
        """lambda^[2]({x} x {y}) = p_x p_y for distinct sites."""
        return 0.0 if first == second else float(self.p[first] * self.p[second])

    def reference_fit(self) -> dict[str, float] | None:
        """beta = lambda_2 / (|lambda|^2 - lambda_2 - 2|lambda|lambda_2 + 2 lambda_3).

        With equal p this is 1/((n - 1)(1 - 2p)) and a = np(1 - p)/(1 - 2p).
        """
        total = math.fsum(self.p)
        lam2 = math.fsum(self.p**2)
        lam3 = math.fsum(self.p**3)
        denominator = total**2 - lam2 - 2 * total * lam2 + 2 * lam3
        if denominator == 0:
            return None
        beta = lam2 / denominator
        fit = {"a": total + beta * (total**2 - lam2), "b": 0.0, "beta": beta}
        if self.is_equal_p and self.n > 1 and self.p[0] != 0.5:
            p = float(self.p[0])
            fit["beta_equal_p"] = 1.0 / ((self.n - 1) * (1 - 2 * p))
            fit["a_equal_p"] = self.n * p * (1 - p) / (1 - 2 * p)
        return fit

    def exact_law(self) -> ExactLaw | None:
        """All 2^n indicator outcomes, for n up to EXACT_LAW_MAX_SITES."""
        if self.n > EXACT_LAW_MAX_SITES:
            return None
        law: ExactLaw = []
        for outcome in itertools.product((False, True), repeat=self.n):
            hits = np.asarray(outcome)
            prob = float(np.prod(np.where(hits, self.p, 1 - self.p)))
            law.append((PointPattern(points=tuple(self._site_array[hits])), prob))
        return law

    def describe(self) -> dict[str, object]:
        return {**super().describe(), "n": self.n, "p_mean": float(self.p.mean())}
