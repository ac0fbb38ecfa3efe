"""Palm suite: the reduced Palm samplers against the Campbell-Mecke identity.

With f(x, xi) = |xi| the identity reads E[Xi({x})(|Xi| - 1)] = lambda({x}) E|Xi_x|,
so every model's exact second factorial marginal is compared with simulated Palm
sizes, and with a direct simulation of the left-hand side. With f(x, xi) = xi(B) for a
grid of site subsets B, the Palm mean of Xi_x(B) is compared with a direct simulation
of E[Xi({x})(Xi(B) - 1{x in B})].
"""

import math

import numpy as np

from pbdpkit.carrier import DiscreteMeasure, UnitInterval
from pbdpkit.checks.base import Check, CheckResult, SuiteContext, z_score
from pbdpkit.models import BernoulliModel, CompoundPoissonModel, PointProcessModel, RunsModel
from pbdpkit.utils.rng import mean_stderr, spawn_streams

SUITE = "palm"
SITES_PER_MODEL = 3


def default_models() -> list[PointProcessModel]:
    """Small instances of every model, used when no model is configured."""
    return [
        BernoulliModel([0.1, 0.2, 0.3, 0.15, 0.25, 0.05, 0.4, 0.2]),
        RunsModel(n=20, k=2, p=0.4, moment_reps=2_000),
        CompoundPoissonModel(
            UnitInterval(),
            [
                DiscreteMeasure.from_arrays([0.2, 0.5, 0.8], [1.0, 0.5, 2.0]),
                DiscreteMeasure.from_arrays([0.5, 0.8], [0.4, 0.3]),
                DiscreteMeasure.from_arrays([0.2], [0.2]),
            ],
        ),
    ]


def spread_sites(model: PointProcessModel, count: int = SITES_PER_MODEL) -> list[int]:
    """Up to ``count`` evenly spread sites with positive intensity."""
    positive = [i for i in range(model.site_count) if model.site_intensity(i) > 0]
    if len(positive) <= count:
        return positive
    picks = np.linspace(0, len(positive) - 1, count).round().astype(int)
    return [positive[i] for i in sorted(set(picks.tolist()))]


def set_grid(model: PointProcessModel, site: int) -> list[tuple[str, frozenset[int]]]:
    """Labelled site subsets B used with f(x, xi) = xi(B).

    Two sub-intervals of the sites, the even sites and the outer neighbourhood of
    ``site``. Empty subsets are dropped.
    """
    n = model.site_count
    third = max(1, n // 3)
    _, outer = model.neighbourhoods(site)
    grid = [
        ("first third", frozenset(range(third))),
        ("last third", frozenset(range(n - third, n))),
        ("even sites", frozenset(range(0, n, 2))),
        ("neighbourhood", outer),
    ]
    return [(label, subset) for label, subset in grid if subset]


class PalmSetIdentityCheck(Check):
    """lambda({x}) E Xi_x(B) against a direct simulation of E[Xi({x})(Xi(B) - 1{x in B})]."""

    def __init__(
        self,
        model: PointProcessModel,
        site: int,
        label: str,
        subset: frozenset[int],
        reps: int,
        rng: np.random.Generator,
        sigmas: float,
    ) -> None:
        super().__init__(f"palm identity {model.name} site {site} on {label}", SUITE)
        self.model = model
        self.site = site
        self.subset = subset
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas

    def _direct_term(self, stream: np.random.Generator) -> float:
        pattern = self.model.sample(stream)
        at_site = int(self.model.site_counts(pattern)[self.site])
        return at_site * (self.model.count_in(pattern, self.subset) - (self.site in self.subset))

    def evaluate(self) -> CheckResult:
        palm_rng, direct_rng = spawn_streams(self.rng, 2)
        intensity = self.model.site_intensity(self.site)
        mean, palm_se = mean_stderr(
            self.model.count_in(self.model.sample_palm(self.site, stream), self.subset)
            for stream in spawn_streams(palm_rng, self.reps)
        )
        direct, direct_se = mean_stderr(
            self._direct_term(stream) for stream in spawn_streams(direct_rng, self.reps)
        )
        estimate = intensity * mean
        z = z_score(estimate, math.hypot(intensity * palm_se, direct_se), direct)
        return self.result(
            z <= self.sigmas,
            z,
            self.sigmas,
            detail=f"palm side {estimate:.6g} vs direct {direct:.6g}",
            estimate=estimate,
            expected=direct,
            sites=sorted(self.subset),
        )


class PalmIdentityCheck(Check):
    """lambda({x}) E|Xi_x| from Palm samples against the exact marginal at a site."""

    def __init__(
        self,
        model: PointProcessModel,
        site: int,
        reps: int,
        rng: np.random.Generator,
        sigmas: float,
    ) -> None:
        super().__init__(f"palm identity {model.name} site {site}", SUITE)
        self.model = model
        self.site = site
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas

    def evaluate(self) -> CheckResult:
        intensity = self.model.site_intensity(self.site)
        expected, expected_se = self.model.second_factorial_site_marginal(self.site)
        mean, stderr = mean_stderr(
            self.model.sample_palm(self.site, stream).size
            for stream in spawn_streams(self.rng, self.reps)
        )
        estimate = intensity * mean
        z = z_score(estimate, math.hypot(intensity * stderr, expected_se), expected)
        return self.result(
            z <= self.sigmas,
            z,
            self.sigmas,
            detail=f"palm side {estimate:.6g} vs marginal {expected:.6g}",
            estimate=estimate,
            expected=expected,
        )


class FactorialMarginalCheck(Check):
    """Simulated E[Xi({x})(|Xi| - 1)] against the exact marginal at a site."""

    def __init__(
        self,
        model: PointProcessModel,
        site: int,
        reps: int,
        rng: np.random.Generator,
        sigmas: float,
    ) -> None:
        super().__init__(f"factorial marginal {model.name} site {site}", SUITE)
        self.model = model
        self.site = site
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas

    def evaluate(self) -> CheckResult:
        expected, _ = self.model.second_factorial_site_marginal(self.site)
        estimate, stderr = self.model.estimate_second_factorial_marginal(
            self.site, self.reps, self.rng
        )
        z = z_score(estimate, stderr, expected)
        return self.result(z <= self.sigmas, z, self.sigmas, estimate=estimate, expected=expected)


class RunsPalmNeighbourhoodCheck(Check):
    """E Xi_x(A_x) <= (2k - 2)p for k-runs, up to the tolerance."""

    def __init__(
        self, model: RunsModel, reps: int, rng: np.random.Generator, sigmas: float
    ) -> None:
        super().__init__(f"runs palm neighbourhood (k={model.k}, p={model.p})", SUITE)
        self.model = model
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas

    def evaluate(self) -> CheckResult:
        inner, _ = self.model.neighbourhoods(0)
        mean, stderr = mean_stderr(
            self.model.count_in(self.model.sample_palm(0, stream), inner)
            for stream in spawn_streams(self.rng, self.reps)
        )
        bound = (2 * self.model.k - 2) * self.model.p
        return self.result(
            mean <= bound + self.sigmas * stderr, mean, bound, stderr=stderr
        )


def build_suite(context: SuiteContext) -> list[Check]:
    models = [context.model] if context.model is not None else default_models()
    checks: list[Check] = []
    for model in models:
        sites = spread_sites(model)
        streams = spawn_streams(context.rng, 3 * len(sites) + 1)
        for i, site in enumerate(sites):
            identity, marginal, by_set = streams[3 * i : 3 * i + 3]
            checks.append(PalmIdentityCheck(model, site, context.reps, identity, context.sigmas))
            checks.append(
                FactorialMarginalCheck(model, site, context.reps, marginal, context.sigmas)
            )
            subsets = set_grid(model, site)
            for (label, subset), stream in zip(
                subsets, spawn_streams(by_set, len(subsets)), strict=True
            ):
                checks.append(
                    PalmSetIdentityCheck(
                        model, site, label, subset, context.reps, stream, context.sigmas
                    )
                )
        if isinstance(model, RunsModel):
            checks.append(
                RunsPalmNeighbourhoodCheck(model, context.reps, streams[-1], context.sigmas)
            )
    return checks
