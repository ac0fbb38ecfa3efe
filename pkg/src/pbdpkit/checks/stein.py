"""Stein suite: coupled first differences, surviving fractions and ergodic occupation."""

import numpy as np

from pbdpkit.carrier import DiscreteMeasure, PointPattern, UnitInterval
from pbdpkit.chain import BirthDeathParams, stein_c_bound, tv_distance
from pbdpkit.checks.base import Check, CheckResult, SuiteContext
from pbdpkit.pbdp import (
    D1Distance,
    PbdpSpec,
    estimate_first_difference,
    occupation_distribution,
    simulate_system,
    survival_ratio_curve,
)
from pbdpkit.utils.rng import spawn_streams

SUITE = "stein"
ETA_SIZES = range(0, 9)
TEST_FUNCTIONS = 10
SURVIVAL_TIMES = (0.1, 0.5, 1.0, 2.0, 3.0)
OCCUPATION_HORIZON = 1e5
OCCUPATION_TV_TOL = 0.02

NU = DiscreteMeasure.from_arrays([0.1, 0.4, 0.6, 0.9], [0.4, 0.3, 0.2, 0.1])

SPEC_GRID: tuple[PbdpSpec, ...] = tuple(
    PbdpSpec(params=params, nu=NU, space=UnitInterval())
    for params in (
        BirthDeathParams(a=1.0),
        BirthDeathParams(a=4.0, b=0.3),
        BirthDeathParams(a=2.0, beta=0.1),
        BirthDeathParams(a=8.0),
        BirthDeathParams(a=3.0, b=0.2, beta=0.05),
    )
)


def _random_pattern(spec: PbdpSpec, size: int, rng: np.random.Generator) -> PointPattern:
    return PointPattern(points=tuple(spec.draw_locations(size, rng)))


class FirstDifferenceCheck(Check):
    """|h_f(eta + delta_x) - h_f(eta + delta_y)| <= C_|eta| for f = d1(., reference)."""

    def __init__(self, spec: PbdpSpec, reps: int, rng: np.random.Generator, sigmas: float) -> None:
        super().__init__(f"first differences {spec.params!r}", SUITE)
        self.spec = spec
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas

    def evaluate(self) -> CheckResult:
        x, y = float(self.spec.nu.points[0]), float(self.spec.nu.points[-1])
        worst = -np.inf
        cases = 0
        for size in ETA_SIZES:
            bound = stein_c_bound(self.spec.params, size)
            for stream in spawn_streams(self.rng, TEST_FUNCTIONS):
                eta = _random_pattern(self.spec, size, stream)
                reference = _random_pattern(self.spec, int(stream.integers(0, 6)), stream)
                f = D1Distance(self.spec.space, reference)
                mean, stderr = estimate_first_difference(
                    self.spec, eta, x, y, f, self.reps, stream
                )
                # Positive excess means the bound is exceeded beyond the tolerance.
                worst = max(worst, abs(mean) - bound - self.sigmas * stderr)
                cases += 1
        detail = f"largest |difference| - C_n - tolerance over {cases} cases"
        return self.result(worst <= 0.0, worst, 0.0, detail=detail, cases=cases)


class SurvivalCurveCheck(Check):
    """Surviving initial fraction never above its bound, up to the tolerance."""

    def __init__(self, spec: PbdpSpec, reps: int, rng: np.random.Generator, sigmas: float) -> None:
        super().__init__(f"surviving fraction {spec.params!r}", SUITE)
        self.spec = spec
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas

    def evaluate(self) -> CheckResult:
        eta = _random_pattern(self.spec, 5, self.rng)
        curve = survival_ratio_curve(self.spec, eta, SURVIVAL_TIMES, self.reps, self.rng)
        worst = max(p.estimate - p.bound - self.sigmas * p.stderr for p in curve)
        return self.result(
            worst <= 0.0,
            worst,
            0.0,
            detail="largest estimate - bound - tolerance",
            curve=[p._asdict() for p in curve],
        )


class OccupationCheck(Check):
    """Time-averaged size law of one long run against the stationary law."""

    def __init__(self, spec: PbdpSpec, rng: np.random.Generator) -> None:
        super().__init__(f"ergodic occupation {spec.params!r}", SUITE)
        self.spec = spec
        self.rng = rng

    def evaluate(self) -> CheckResult:
        horizon = OCCUPATION_HORIZON / (self.spec.params.a + 1.0)
        trajectory = simulate_system(self.spec, PointPattern(), horizon, self.rng)
        tv = tv_distance(occupation_distribution(trajectory), self.spec.distribution)
        return self.result(
            tv <= OCCUPATION_TV_TOL, tv, OCCUPATION_TV_TOL, events=len(trajectory.events)
        )


def build_suite(context: SuiteContext) -> list[Check]:
    checks: list[Check] = []
    for spec, stream in zip(SPEC_GRID, spawn_streams(context.rng, len(SPEC_GRID)), strict=True):
        first, survival, occupation = spawn_streams(stream, 3)
        checks.append(FirstDifferenceCheck(spec, context.reps, first, context.sigmas))
        checks.append(SurvivalCurveCheck(spec, context.reps, survival, context.sigmas))
        checks.append(OccupationCheck(spec, occupation))
    return checks
