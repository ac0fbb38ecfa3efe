"""Compound Poisson process CP(mu_1, mu_2, ...) with clusters stacked at one location."""

import math
from collections.abc import Sequence

import numpy as np

from pbdpkit.carrier import CarrierSpace, DiscreteMeasure, PointPattern
from pbdpkit.models.base import MomentSummary, PointProcessModel


class CompoundPoissonModel(PointProcessModel):
    """Xi = sum_i i X_i with independent Poisson processes X_i of intensity mu_i.

    A cluster of size i puts i points at a single location, so patterns repeat points.

    Attributes:
        mus: Cluster intensities; ``mus[i - 1]`` is mu_i
    """

    name = "cp"
    independent_scattering = True

    def __init__(self, space: CarrierSpace, mus: Sequence[DiscreteMeasure]) -> None:
        if not mus or all(mu.total == 0 for mu in mus):
            raise ValueError("Compound Poisson model needs at least one nonzero cluster intensity")
        sites = sorted({point for mu in mus for point, weight in mu.atoms if weight > 0})
        super().__init__(space, sites)
        self.mus = tuple(mus)
        # Per-site cluster intensities: rows are cluster sizes, columns are sites.
        self._rates = np.array(
            [[mu.weight_at(site) for site in self.sites] for mu in self.mus], dtype=float
        )
        self._sizes = np.arange(1, len(self.mus) + 1, dtype=float)

    def cumulant(self, order: int) -> float:
        """sum_i i^order |mu_i|."""
        return math.fsum(i**order * mu.total for i, mu in enumerate(self.mus, start=1))

    def sample(self, rng: np.random.Generator) -> PointPattern:
        clusters = rng.poisson(self._rates)
        multiplicity = (clusters * self._sizes[:, None]).sum(axis=0).astype(int)
        return PointPattern(points=tuple(np.repeat(self._site_array, multiplicity)))

    def moments(self, rng: np.random.Generator | None = None) -> MomentSummary:
        return MomentSummary.from_cumulants(
            k1=self.cumulant(1), k2=self.cumulant(2), k3=self.cumulant(3)
        )

    def mean_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_arrays(self.sites, (self._sizes @ self._rates).tolist())

    def second_factorial_site_marginal(self, site: int) -> tuple[float, float]:
        """sum_i i^2 mu_i({x}) - lambda({x}) + lambda({x}) |lambda|."""
        self._check_site(site)
        rates = self._rates[:, site]
        intensity = float(self._sizes @ rates)
        value = float(self._sizes**2 @ rates) - intensity + intensity * self.cumulant(1)
        return value, 0.0

    def sample_palm(self, site: int, rng: np.random.Generator) -> PointPattern:
        """Xi plus J - 1 extra copies of the site, P(J = j) proportional to j mu_j({x})."""
        self._check_site(site)
        weights = self._sizes * self._rates[:, site]
        if weights.sum() <= 0:
            raise ValueError(f"Site {site} has zero intensity")
        size = int(rng.choice(self._sizes, p=weights / weights.sum()))
        return self.sample(rng).add(*([self.sites[site]] * (size - 1)))

    def neighbourhoods(self, site: int) -> tuple[frozenset[int], frozenset[int]]:
        self._check_site(site)
        return frozenset({site}), frozenset({site})

    def reference_fit(self) -> dict[str, float] | None:
        """b = sum i(i - 1)|mu_i| / sum i^2 |mu_i| and a = |lambda|^2 / sum i^2 |mu_i|."""
        second = self.cumulant(2)
        return {
            "a": self.cumulant(1) ** 2 / second,
            "b": (second - self.cumulant(1)) / second,
            "beta": 0.0,
        }

    def describe(self) -> dict[str, object]:
        return {
            **super().describe(),
            "cluster_sizes": len(self.mus),
            "cluster_masses": [mu.total for mu in self.mus],
        }
