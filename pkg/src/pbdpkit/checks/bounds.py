"""Bounds suite: r-bar against enumeration, bound validity and bound-shape trends."""

import numpy as np

from pbdpkit.bounds import (
    assemble_theorem_bound,
    bernoulli_kappa,
    bound_shape,
    default_partition,
    rbar,
    rbar_exact,
)
from pbdpkit.carrier import PartitionScheme
from pbdpkit.checks.base import Check, CheckResult, SuiteContext
from pbdpkit.distance import enumerate_pbdp, exact_d2_small, model_law
from pbdpkit.fitting import fit_model
from pbdpkit.models import BernoulliModel, RunsModel
from pbdpkit.utils.rng import spawn_streams

SUITE = "bounds"
RBAR_MIN_REPS = 20_000
ENUMERATION_CAP = 10
KAPPA_REFERENCE = 1.0 / (2.0 * np.sqrt(24.5))

TINY_BERNOULLI: tuple[tuple[float, ...], ...] = (
    (0.2, 0.2, 0.2),
    (0.1, 0.3, 0.2, 0.25),
    (0.3, 0.3, 0.3, 0.3),
    (0.05, 0.4, 0.15),
)
SHAPE_SIZES = (8, 32, 128, 512, 2048)
RUNS_SHAPE_SIZES = (200, 400, 1_000, 4_000)


class RbarEnumerationCheck(Check):
    """Simulated r-bar against the value computed from the enumerated law."""

    def __init__(
        self,
        model: BernoulliModel,
        site: int,
        u: float,
        reps: int,
        rng: np.random.Generator,
        sigmas: float,
    ) -> None:
        super().__init__(f"rbar vs enumeration (n={model.n}, site {site})", SUITE)
        self.model = model
        self.site = site
        self.u = u
        self.reps = max(reps, RBAR_MIN_REPS)
        self.rng = rng
        self.sigmas = sigmas

    def evaluate(self) -> CheckResult:
        a = fit_model(self.model).params.a
        scheme = default_partition(self.model)
        exact = rbar_exact(self.model, self.site, scheme, self.u, a)
        estimate, stderr = rbar(self.model, self.site, scheme, self.u, a, self.reps, self.rng)
        gap = abs(estimate - exact)
        allowed = self.sigmas * stderr
        return self.result(
            gap <= allowed, gap, allowed, estimate=estimate, exact=exact, stderr=stderr
        )


class BoundValidityCheck(Check):
    """The assembled bound (order terms excluded) dominates the exact d2 on tiny instances."""

    def __init__(
        self, instances: tuple[tuple[float, ...], ...] = TINY_BERNOULLI, u: float = 2.0
    ) -> None:
        super().__init__("bound dominates exact d2", SUITE)
        self.instances = instances
        self.u = u

    def evaluate(self) -> CheckResult:
        worst = -np.inf
        rows = []
        for probs in self.instances:
            model = BernoulliModel(probs)
            fit = fit_model(model)
            report = assemble_theorem_bound(model, fit, u=self.u, exact=True)
            d2 = exact_d2_small(
                model.space, model_law(model), enumerate_pbdp(fit.spec, ENUMERATION_CAP)
            ).value
            worst = max(worst, d2 - report.total())
            rows.append({"p": list(probs), "d2": d2, "bound": report.total()})
        return self.result(worst <= 1e-9, worst, 0.0, detail="largest d2 - bound", instances=rows)


class KappaCheck(Check):
    """kappa for p = 0.5 on one cell of 100 sites equals 1/(2 sqrt(24.5))."""

    def __init__(self) -> None:
        super().__init__("bernoulli kappa reference", SUITE)

    def evaluate(self) -> CheckResult:
        model = BernoulliModel.equal(100, 0.5)
        scheme = PartitionScheme.single_cell(model.space, model.sites)
        kappa = bernoulli_kappa(model.p, scheme)
        return self.result(abs(kappa - KAPPA_REFERENCE) <= 1e-12, kappa, KAPPA_REFERENCE)


class ShapeTrendCheck(Check):
    """Bound shapes decrease in n at fixed p."""

    def __init__(self) -> None:
        super().__init__("bound shape decreasing in n", SUITE)

    def evaluate(self) -> CheckResult:
        bernoulli = []
        for n in SHAPE_SIZES:
            model = BernoulliModel.equal(n, 0.2)
            bernoulli.append(bound_shape(model, fit_model(model)))
        runs = []
        for n in RUNS_SHAPE_SIZES:
            model = RunsModel(n=n, k=2, p=0.3, moment_reps=200)
            runs.append(bound_shape(model, fit_model(model)))
        steps = np.diff(bernoulli).tolist() + np.diff(runs).tolist()
        worst = max(steps)
        return self.result(worst < 0, worst, 0.0, bernoulli=bernoulli, runs=runs)


def build_suite(context: SuiteContext) -> list[Check]:
    model = BernoulliModel.equal(10, 0.2)
    streams = spawn_streams(context.rng, 2)
    return [
        RbarEnumerationCheck(model, 0, context.u, context.reps, streams[0], context.sigmas),
        RbarEnumerationCheck(model, 5, context.u, context.reps, streams[1], context.sigmas),
        BoundValidityCheck(u=context.u),
        KappaCheck(),
        ShapeTrendCheck(),
    ]
