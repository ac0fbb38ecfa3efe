"""k-runs of successes on a circle of n Bernoulli(p) trials."""

import math
from collections import defaultdict

import numpy as np

from pbdpkit.carrier import Circle, DiscreteMeasure, PointPattern
from pbdpkit.models.base import ExactLaw, MomentSummary, PointProcessModel
from pbdpkit.utils.rng import make_rng

EXACT_LAW_MAX_SITES = 16
DEFAULT_MOMENT_REPS = 20_000
MOMENT_BATCH = 2_000


class RunsModel(PointProcessModel):
    """Xi = sum_i X_i delta_{i/n} with X_i = I_i I_{i+1} ... I_{i+k-1}, indices mod n.

    The third moment of |Xi| has no closed form here and is simulated.

    Attributes:
        n: Number of trials (and sites)
        k: Run length
        p: Success probability of each trial
        moment_reps: Samples behind the simulated third moment
        moment_seed: Seed used for that simulation when no generator is passed
    """

    name = "runs"

    def __init__(
        self,
        n: int,
        k: int,
        p: float,
        moment_reps: int = DEFAULT_MOMENT_REPS,
        moment_seed: int = 0,
    ) -> None:
        if k < 2:
            raise ValueError(f"Run length must be at least 2, got {k}")
        if n < 2 * k:
            raise ValueError(f"Runs model needs n >= 2k, got n={n}, k={k}")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Success probability must lie in [0, 1], got {p}")
        if moment_reps < 2:
            raise ValueError("moment_reps must be at least 2")
        super().__init__(Circle(), ((j + 1) / n for j in range(n)))
        self.n = n
        self.k = k
        self.p = float(p)
        self.moment_reps = moment_reps
        self.moment_seed = moment_seed

    def _runs(self, trials: np.ndarray) -> np.ndarray:
        """Run indicators X from trial indicators I along the last axis."""
        runs = trials.copy()
        for shift in range(1, self.k):
            runs &= np.roll(trials, -shift, axis=-1)
        return runs

    def _pattern(self, runs: np.ndarray) -> PointPattern:
        return PointPattern(points=tuple(self._site_array[runs]))

    def sample(self, rng: np.random.Generator) -> PointPattern:
        return self._pattern(self._runs(rng.random(self.n) < self.p))

    @property
    def total_mean(self) -> float:
        return self.n * self.p**self.k

    @property
    def variance(self) -> float:
        """n p^k/(1 - p) (1 + p - (2k + 1)p^k + (2k - 1)p^(k+1)), summed as covariances."""
        p, k = self.p, self.k
        overlap = math.fsum(p ** (k + d) - p ** (2 * k) for d in range(1, k))
        return self.n * (p**k - p ** (2 * k) + 2 * overlap)

    @property
    def dispersion_margin(self) -> float:
        """2 + (2k - 1)p^k - (2k + 1)p^(k-1); nonnegative iff Var |Xi| >= E|Xi|."""
        p, k = self.p, self.k
        return 2 + (2 * k - 1) * p**k - (2 * k + 1) * p ** (k - 1)

    @property
    def is_overdispersed(self) -> bool:
        return self.dispersion_margin >= 0

    def moments(self, rng: np.random.Generator | None = None) -> MomentSummary:
        seed = None
        if rng is None:
            seed = self.moment_seed
            rng = make_rng(seed)
        k1, k2 = self.total_mean, self.variance
        k3, k3_stderr = self._simulate_third_central(rng)
        return MomentSummary.from_cumulants(
            k1=k1,
            k2=k2,
            k3=k3,
            third_moment_stderr=k3_stderr,
            estimated=("third_moment",),
            moment_seed=seed,
        )

    def _simulate_third_central(self, rng: np.random.Generator) -> tuple[float, float]:
        # Centered on the exact mean, so this is unbiased for E(|Xi| - |lambda|)^3.
        cubes = []
        remaining = self.moment_reps
        while remaining:
            batch = min(remaining, MOMENT_BATCH)
            counts = self._runs(rng.random((batch, self.n)) < self.p).sum(axis=1)
            cubes.append((counts - self.total_mean) ** 3)
            remaining -= batch
        values = np.concatenate(cubes)
        estimate = math.fsum(values) / values.size
        stderr = float(np.std(values, ddof=1) / math.sqrt(values.size))
        return estimate, stderr

    def mean_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_arrays(self.sites, [self.p**self.k] * self.n)

    def second_factorial_site_marginal(self, site: int) -> tuple[float, float]:
        """p^k [2 sum_{d=1}^{k-1} p^d + (n - 2k + 1) p^k]."""
        self._check_site(site)
        p, k = self.p, self.k
        near = 2 * math.fsum(p**d for d in range(1, k))
        return p**k * (near + (self.n - 2 * k + 1) * p**k), 0.0

    def sample_palm(self, site: int, rng: np.random.Generator) -> PointPattern:
        """Force the k trials of the run starting at the site, then drop that run's point."""
        self._check_site(site)
        if self.p == 0:
            raise ValueError(f"Site {site} has zero intensity")
        trials = rng.random(self.n) < self.p
        trials[(site + np.arange(self.k)) % self.n] = True
        runs = self._runs(trials)
        runs[site] = False
        return self._pattern(runs)

    def _window(self, site: int, radius: int) -> frozenset[int]:
        return frozenset(int(i) % self.n for i in range(site - radius, site + radius + 1))

    def neighbourhoods(self, site: int) -> tuple[frozenset[int], frozenset[int]]:
        """A = {|j - i| <= k - 1}, B = {|j - i| <= 2k - 2}, cyclically."""
        self._check_site(site)
        return self._window(site, self.k - 1), self._window(site, 2 * self.k - 2)

    def reference_fit(self) -> dict[str, float] | None:
        p, k = self.p, self.k
        denominator = 1 + p - (2 * k + 1) * p**k + (2 * k - 1) * p ** (k + 1)
        if p >= 1 or denominator <= 0 or not self.is_overdispersed:
            return None
        return {
            "a": (1 - p) * self.total_mean / denominator,
            "b": p * (2 - (2 * k + 1) * p ** (k - 1) + (2 * k - 1) * p**k) / denominator,
            "beta": 0.0,
        }

    def exact_law(self) -> ExactLaw | None:
        if self.n > EXACT_LAW_MAX_SITES:
            return None
        outcomes = ((np.arange(2**self.n)[:, None] >> np.arange(self.n)) & 1).astype(bool)
        successes = outcomes.sum(axis=1)
        probs = self.p**successes * (1 - self.p) ** (self.n - successes)
        law: dict[PointPattern, float] = defaultdict(float)
        for runs, prob in zip(self._runs(outcomes), probs, strict=True):
            law[self._pattern(runs)] += float(prob)
        return [(pattern, prob) for pattern, prob in law.items() if prob > 0]

    def describe(self) -> dict[str, object]:
        return {**super().describe(), "n": self.n, "k": self.k, "p": self.p}
