"""Chain suite: stationary law, hitting times and initial-death counts."""

import math

import numpy as np
from scipy import stats

from pbdpkit.chain import (
    MIN_PROBABILITY,
    BirthDeathParams,
    hitting_up,
    k_minus,
    k_plus,
    rates,
    ratio_chain_violations,
    stationary,
    xia_bounds_check,
)
from pbdpkit.checks.base import Check, CheckResult, SuiteContext, z_score
from pbdpkit.pbdp import simulate_initial_deaths, simulate_size_passage
from pbdpkit.utils.rng import mean_stderr, spawn_streams

SUITE = "chain"
REDUCTION_TOL = 1e-12
DETAILED_BALANCE_RTOL = 1e-12
INITIAL_DEATH_M_MAX = 100
MC_K_MAX = 10

PARAMETER_GRID: tuple[BirthDeathParams, ...] = tuple(
    BirthDeathParams(a=a, b=b, beta=beta)
    for a in (0.5, 2.0, 8.0, 20.0)
    for b, beta in ((0.0, 0.0), (0.5, 0.0), (0.0, 0.05), (0.3, 0.01), (0.0, 1.0))
)

MC_GRID: tuple[BirthDeathParams, ...] = (
    BirthDeathParams(a=2.0),
    BirthDeathParams(a=3.0, b=0.4),
    BirthDeathParams(a=5.0, beta=0.2),
    BirthDeathParams(a=1.0, b=0.2, beta=0.05),
    BirthDeathParams(a=4.0, beta=1.0),
)


class ReductionCheck(Check):
    """stationary() against a closed-form count law on 0..k_max in sup-norm."""

    def __init__(self, name: str, params: BirthDeathParams, reference: np.ndarray) -> None:
        super().__init__(name, SUITE)
        self.params = params
        self.reference = reference

    def evaluate(self) -> CheckResult:
        dist = stationary(self.params)
        ks = range(self.reference.size)
        gap = max(abs(dist.pmf(k) - float(self.reference[k])) for k in ks)
        return self.result(
            gap <= REDUCTION_TOL, gap, REDUCTION_TOL, params=self.params.model_dump()
        )


def poisson_reduction(a: float = 2.0, k_max: int = 50) -> ReductionCheck:
    reference = stats.poisson.pmf(np.arange(k_max + 1), a)
    return ReductionCheck(f"poisson reduction (a={a})", BirthDeathParams(a=a), reference)


def negative_binomial_reduction(a: float = 1.0, b: float = 0.5, k_max: int = 50) -> ReductionCheck:
    """With beta = 0 the law is negative binomial with a/b successes and success chance 1 - b."""
    reference = stats.nbinom.pmf(np.arange(k_max + 1), a / b, 1.0 - b)
    return ReductionCheck(
        f"negative binomial reduction (a={a}, b={b})", BirthDeathParams(a=a, b=b), reference
    )


class DetailedBalanceCheck(Check):
    """pi_k alpha_k = pi_{k+1} beta_{k+1} and the cdf/survival ratio chain on a grid."""

    def __init__(self, grid: tuple[BirthDeathParams, ...] = PARAMETER_GRID) -> None:
        super().__init__("detailed balance and ratio chain", SUITE)
        self.grid = grid

    def evaluate(self) -> CheckResult:
        worst = 0.0
        ratio_violations = 0
        for params in self.grid:
            dist = stationary(params)
            for k in range(dist.max_count):
                if dist.pmf(k + 1) < MIN_PROBABILITY:
                    break
                alpha, _ = rates(params, k)
                _, death = rates(params, k + 1)
                up, down = dist.pmf(k) * alpha, dist.pmf(k + 1) * death
                worst = max(worst, abs(up - down) / max(up, down))
            ratio_violations += len(ratio_chain_violations(params, dist))
        return self.result(
            worst <= DETAILED_BALANCE_RTOL and ratio_violations == 0,
            worst,
            DETAILED_BALANCE_RTOL,
            detail=f"{ratio_violations} ratio-chain violations over {len(self.grid)} triples",
            ratio_violations=ratio_violations,
        )


class InitialDeathBoundsCheck(Check):
    """Upper and lower initial-death inequalities for every m up to m_max."""

    def __init__(
        self, grid: tuple[BirthDeathParams, ...] = PARAMETER_GRID, m_max: int = INITIAL_DEATH_M_MAX
    ) -> None:
        super().__init__("initial-death inequalities", SUITE)
        self.grid = grid
        self.m_max = m_max

    def evaluate(self) -> CheckResult:
        violations = [v for params in self.grid for v in xia_bounds_check(params, self.m_max)]
        return self.result(
            not violations,
            len(violations),
            0,
            detail=f"m <= {self.m_max} over {len(self.grid)} triples",
            violations=violations[:10],
        )


class HittingTimeCheck(Check):
    """E tau_k^+ = F(k)/(alpha_k pi_k) against simulated first passages."""

    def __init__(
        self,
        params: BirthDeathParams,
        reps: int,
        rng: np.random.Generator,
        sigmas: float,
        k_max: int = MC_K_MAX,
    ) -> None:
        super().__init__(f"hitting times {params!r}", SUITE)
        self.params = params
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas
        self.k_max = k_max

    def evaluate(self) -> CheckResult:
        dist = stationary(self.params)
        worst = 0.0
        for k, stream in enumerate(spawn_streams(self.rng, self.k_max + 1)):
            expected = hitting_up(self.params, dist, k)
            estimate, stderr = mean_stderr(
                simulate_size_passage(self.params, k, k + 1, child)
                for child in spawn_streams(stream, self.reps)
            )
            worst = max(worst, z_score(estimate, stderr, expected))
        return self.result(worst <= self.sigmas, worst, self.sigmas, detail="largest z-score")


class InitialDeathCountCheck(Check):
    """k_plus against particle simulations; the k_minus bracket must cover the simulated mean."""

    def __init__(
        self,
        params: BirthDeathParams,
        reps: int,
        rng: np.random.Generator,
        sigmas: float,
        m_max: int = MC_K_MAX,
    ) -> None:
        super().__init__(f"initial-death counts {params!r}", SUITE)
        self.params = params
        self.reps = reps
        self.rng = rng
        self.sigmas = sigmas
        self.m_max = m_max

    def evaluate(self) -> CheckResult:
        worst = 0.0
        streams = spawn_streams(self.rng, 2 * (self.m_max + 1))
        for m in range(self.m_max + 1):
            up = [
                simulate_initial_deaths(self.params, m, "up", s)
                for s in spawn_streams(streams[2 * m], self.reps)
            ]
            estimate, stderr = mean_stderr(up)
            worst = max(worst, z_score(estimate, stderr, k_plus(self.params, m)))
            if m == 0:
                continue
            down = [
                simulate_initial_deaths(self.params, m, "down", s)
                for s in spawn_streams(streams[2 * m + 1], self.reps)
            ]
            estimate, stderr = mean_stderr(down)
            low, high = k_minus(self.params, m, horizon=m + 64, tol=1e-10)
            gap = max(low - estimate, estimate - high, 0.0)
            worst = max(worst, gap / stderr if stderr > 0 else (0.0 if gap == 0 else math.inf))
        return self.result(worst <= self.sigmas, worst, self.sigmas, detail="largest z-score")


def build_suite(context: SuiteContext) -> list[Check]:
    checks: list[Check] = [
        poisson_reduction(),
        negative_binomial_reduction(),
        DetailedBalanceCheck(),
        InitialDeathBoundsCheck(),
    ]
    streams = spawn_streams(context.rng, 2 * len(MC_GRID))
    for i, params in enumerate(MC_GRID):
        checks.append(HittingTimeCheck(params, context.reps, streams[2 * i], context.sigmas))
        checks.append(
            InitialDeathCountCheck(params, context.reps, streams[2 * i + 1], context.sigmas)
        )
    return checks
