"""Base class for the locally dependent point processes being approximated.

A model lives on a finite list of sites of a carrier space. Besides sampling it
exposes what the fitting formulas and error bounds consume: exact (or flagged Monte
Carlo) moments of the total count, the mean measure, second factorial marginals,
reduced Palm samples and the dependence neighbourhoods of each site.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable
from functools import cached_property
from typing import Any, ClassVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from pbdpkit.carrier import CarrierSpace, DiscreteMeasure, PointPattern
from pbdpkit.utils.rng import mean_stderr, spawn_streams

logger = logging.getLogger(__name__)

MOMENT_IDENTITY_RTOL = 1e-9

ExactLaw = list[tuple[PointPattern, float]]


class MomentSummary(BaseModel):
    """Moments of the total count |Xi|.

    Attributes:
        total_mean: E|Xi| = |lambda|
        variance: Var |Xi|
        second_moment: E|Xi|^2
        third_moment: E|Xi|^3
        second_factorial_total: E|Xi|(|Xi| - 1)
        third_moment_stderr: Standard error when the third moment is simulated
        estimated: Names of the fields obtained by Monte Carlo
        moment_seed: Seed of the simulation behind estimated fields
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    total_mean: float = Field(..., ge=0.0)
    variance: float = Field(..., ge=0.0)
    second_moment: float = Field(..., ge=0.0)
    third_moment: float = Field(..., ge=0.0)
    second_factorial_total: float
    third_moment_stderr: float = Field(default=0.0, ge=0.0)
    estimated: tuple[str, ...] = ()
    moment_seed: int | None = None

    @model_validator(mode="after")
    def check_identities(self) -> "MomentSummary":
        """variance = E|Xi|^2 - mean^2 and factorial total = E|Xi|^2 - mean."""
        scale = max(1.0, self.second_moment)
        gap = abs(self.variance - (self.second_moment - self.total_mean**2))
        if gap > MOMENT_IDENTITY_RTOL * scale:
            raise ValueError("variance must equal second_moment - total_mean**2")
        if abs(self.second_factorial_total - (self.second_moment - self.total_mean)) > (
            MOMENT_IDENTITY_RTOL * scale
        ):
            raise ValueError("second_factorial_total must equal second_moment - total_mean")
        return self

    @classmethod
    def from_cumulants(
        cls, k1: float, k2: float, k3: float, **extra: Any
    ) -> "MomentSummary":
        """Raw moments from the first three cumulants of |Xi|."""
        second = k2 + k1**2
        return cls(
            total_mean=k1,
            variance=k2,
            second_moment=second,
            third_moment=k3 + 3 * k2 * k1 + k1**3,
            second_factorial_total=second - k1,
            **extra,
        )

    @property
    def third_central_moment(self) -> float:
        m = self.total_mean
        return self.third_moment - 3 * m * self.second_moment + 2 * m**3

    @property
    def is_overdispersed(self) -> bool:
        return self.variance >= self.total_mean


class PointProcessModel(ABC):
    """A point process on finitely many sites of a carrier space.

    Sites are addressed by their position in ``sites`` (0-based).

    Attributes:
        space: Carrier space of the sites
        sites: Site locations
    """

    name: ClassVar[str]
    supports_pair_palm: ClassVar[bool] = False
    # Counts in disjoint site sets are independent (Poisson and Bernoulli processes).
    independent_scattering: ClassVar[bool] = False

    def __init__(self, space: CarrierSpace, sites: Iterable[float]) -> None:
        self.space = space
        self.sites: tuple[float, ...] = tuple(float(s) for s in sites)
        space.check(self.sites)

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> PointPattern:
        """Draw one configuration."""

    @abstractmethod
    def moments(self, rng: np.random.Generator | None = None) -> MomentSummary:
        """Moments of the total count; ``rng`` only feeds simulated fields."""

    @abstractmethod
    def mean_measure(self) -> DiscreteMeasure:
        """lambda as an atomic measure on the sites."""

    @abstractmethod
    def second_factorial_site_marginal(self, site: int) -> tuple[float, float]:
        """Mass of the y-integral of lambda^[2](dx, dy) at a site, with its standard error."""

    @abstractmethod
    def sample_palm(self, site: int, rng: np.random.Generator) -> PointPattern:
        """Draw from the reduced Palm distribution at a site."""

    @abstractmethod
    def neighbourhoods(self, site: int) -> tuple[frozenset[int], frozenset[int]]:
        """Type-I neighbourhoods (A, B) of a site, with site in A and A inside B."""

    def reference_fit(self) -> dict[str, float] | None:
        """Model-specific closed-form fitted parameters, when known."""
        return None

    def exact_law(self) -> ExactLaw | None:
        """Enumerated law of the process, when it is small enough."""
        return None

    def describe(self) -> dict[str, Any]:
        return {"model": self.name, "sites": len(self.sites), "space": self.space.kind}

    @property
    def site_count(self) -> int:
        return len(self.sites)

    @cached_property
    def _site_lookup(self) -> dict[float, int]:
        return {location: index for index, location in enumerate(self.sites)}

    @cached_property
    def _site_array(self) -> np.ndarray:
        return np.asarray(self.sites, dtype=float)

    def site_index(self, point: float) -> int:
        try:
            return self._site_lookup[float(point)]
        except KeyError:
            raise ValueError(f"Point {point} is not a site of the {self.name} model") from None

    def _check_site(self, site: int) -> None:
        if not 0 <= site < self.site_count:
            raise ValueError(f"Site {site} out of range for {self.site_count} sites")

    def site_counts(self, pattern: PointPattern) -> np.ndarray:
        """Xi({x}) for every site, as an integer vector indexed like ``sites``."""
        indices = [self.site_index(point) for point in pattern.points]
        return np.bincount(np.asarray(indices, dtype=int), minlength=self.site_count)

    def count_in(self, pattern: PointPattern, sites: Iterable[int]) -> int:
        """Xi(S) for a set S of site indices."""
        locations = self._site_array[sorted(set(sites))]
        return int(np.count_nonzero(np.isin(pattern.as_array(), locations)))

    def restrict_outside(self, pattern: PointPattern, sites: Iterable[int]) -> PointPattern:
        """Xi restricted to the complement of a set of site indices."""
        locations = self._site_array[sorted(set(sites))]
        arr = pattern.as_array()
        return PointPattern(points=tuple(arr[~np.isin(arr, locations)]))

    @cached_property
    def _intensities(self) -> np.ndarray:
        intensities = np.zeros(self.site_count)
        for point, weight in self.mean_measure().atoms:
            intensities[self.site_index(point)] += weight
        return intensities

    def site_intensity(self, site: int) -> float:
        """lambda({x}) at a site."""
        self._check_site(site)
        return float(self._intensities[site])

    def second_factorial_marginals(self) -> DiscreteMeasure:
        """All site marginals of lambda^[2] as one measure."""
        return DiscreteMeasure.from_arrays(
            self.sites,
            [self.second_factorial_site_marginal(i)[0] for i in range(self.site_count)],
        )

    def estimate_second_factorial_marginal(
        self, site: int, reps: int, rng: np.random.Generator
    ) -> tuple[float, float]:
        """Monte Carlo E[Xi({x}) (|Xi| - 1)] with its standard error."""
        self._check_site(site)
        location = self.sites[site]
        values = []
        for stream in spawn_streams(rng, reps):
            pattern = self.sample(stream)
            values.append(pattern.count_at(location) * (pattern.size - 1))
        return mean_stderr(values)
