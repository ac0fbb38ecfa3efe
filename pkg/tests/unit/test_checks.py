"""Unit tests for the invariant check framework and cheap suite checks."""

import math

import numpy as np
import pytest

from pbdpkit.chain import BirthDeathParams
from pbdpkit.checks import Check, CheckResult, SuiteContext, SuiteRegistry, register_builtin_suites
from pbdpkit.checks.base import z_score
from pbdpkit.checks.bounds import RBAR_MIN_REPS, KappaCheck, RbarEnumerationCheck
from pbdpkit.checks.chain import (
    DETAILED_BALANCE_RTOL,
    MC_GRID,
    MC_K_MAX,
    DetailedBalanceCheck,
    negative_binomial_reduction,
    poisson_reduction,
)
from pbdpkit.checks.palm import PalmSetIdentityCheck, set_grid, spread_sites
from pbdpkit.checks.stein import ETA_SIZES, SPEC_GRID, TEST_FUNCTIONS, FirstDifferenceCheck
from pbdpkit.models import BernoulliModel, RunsModel


class ConstantCheck(Check):
    """Check returning a fixed outcome."""

    def __init__(self, success: bool) -> None:
        super().__init__("constant", "test")
        self.success = success

    def evaluate(self) -> CheckResult:
        return self.result(self.success, 1.0, 2.0, detail="fixed", extra=3)


class FailingCheck(Check):
    """Check whose evaluation raises."""

    def __init__(self) -> None:
        super().__init__("failing", "test")

    def evaluate(self) -> CheckResult:
        raise RuntimeError("boom")


class TestCheck:
    """Tests for Check.run()."""

    def test_result_fields(self) -> None:
        """Test that run() fills in timing and keeps metadata."""
        result = ConstantCheck(True).run()

        assert result["success"] is True
        assert result["observed"] == 1.0
        assert result["required"] == 2.0
        assert result["metadata"] == {"extra": 3}
        assert result["duration"] >= 0.0
        assert result["timestamp"] > 0.0

    def test_exception_becomes_failure(self) -> None:
        """Test that exceptions are converted to failed results."""
        result = FailingCheck().run()

        assert result["success"] is False
        assert result["detail"] == "RuntimeError: boom"
        assert math.isnan(result["observed"])


class TestZScore:
    """Tests for z_score."""

    def test_scaled_gap(self) -> None:
        """Test the gap in standard errors."""
        assert z_score(1.3, 0.1, 1.0) == pytest.approx(3.0)

    def test_zero_stderr(self) -> None:
        """Test exact agreement and disagreement without a standard error."""
        assert z_score(1.0, 0.0, 1.0) == 0.0
        assert z_score(1.5, 0.0, 1.0) == math.inf


class TestSuiteRegistry:
    """Tests for SuiteRegistry."""

    def teardown_method(self) -> None:
        SuiteRegistry.clear()
        register_builtin_suites()

    def test_builtin_suites(self) -> None:
        """Test that the four built-in suites are registered."""
        assert SuiteRegistry.list_types() == ["bounds", "chain", "palm", "stein"]

    def test_unknown_suite(self) -> None:
        """Test that unknown suites raise ValueError listing the available ones."""
        with pytest.raises(ValueError, match="Available suites: bounds, chain"):
            SuiteRegistry.get("nope")

    def test_register_custom(self) -> None:
        """Test registering and building a custom suite."""
        SuiteRegistry.register("custom", lambda context: [ConstantCheck(True)])

        checks = SuiteRegistry.get("custom")(SuiteContext(rng=np.random.default_rng(0)))

        assert SuiteRegistry.is_registered("custom")
        assert [check.name for check in checks] == ["constant"]

    def test_chain_suite_builds(self) -> None:
        """Test that the chain suite builds its checks without running them."""
        checks = SuiteRegistry.get("chain")(SuiteContext(rng=np.random.default_rng(0), reps=10))

        assert len(checks) == 4 + 2 * len(MC_GRID)
        assert len(MC_GRID) == 5
        assert {check.suite for check in checks} == {"chain"}


class TestCheapChecks:
    """Tests running the exact (non-Monte Carlo) checks."""

    def test_reductions(self) -> None:
        """Test the Poisson and negative binomial reductions."""
        assert poisson_reduction().run()["success"]
        assert negative_binomial_reduction().run()["success"]

    def test_detailed_balance(self) -> None:
        """Test detailed balance on a small grid."""
        grid = (BirthDeathParams(a=2.0, b=0.3, beta=0.01), BirthDeathParams(a=0.5, beta=1.0))

        result = DetailedBalanceCheck(grid).run()

        assert result["success"], result["detail"]

    def test_detailed_balance_full_grid(self) -> None:
        """Test detailed balance to 1e-12 over the whole default parameter grid."""
        result = DetailedBalanceCheck().run()

        assert DETAILED_BALANCE_RTOL == 1e-12
        assert result["success"], result["detail"]

    def test_monte_carlo_grid(self) -> None:
        """Test that the simulated chain checks cover five triples up to k = 10."""
        checks = SuiteRegistry.get("chain")(SuiteContext(rng=np.random.default_rng(0), reps=10))
        hitting = [check for check in checks if check.name.startswith("hitting times")]

        assert MC_K_MAX == 10
        assert len(hitting) == 5
        assert all(check.k_max == 10 for check in hitting)
        assert any(params.b > 0 and params.beta > 0 for params in MC_GRID)

    def test_kappa(self) -> None:
        """Test the kappa reference value."""
        assert KappaCheck().run()["success"]

    def test_rbar_replicate_floor(self) -> None:
        """Test that the r-bar check never runs on fewer than the minimum replicates."""
        check = RbarEnumerationCheck(
            BernoulliModel.equal(10, 0.2), 0, 2.0, 10, np.random.default_rng(0), 3.0
        )

        assert check.reps == RBAR_MIN_REPS

    @pytest.mark.slow
    def test_rbar_within_sigmas(self) -> None:
        """Test that the allowed gap is exactly sigmas standard errors."""
        check = RbarEnumerationCheck(
            BernoulliModel.equal(10, 0.2), 0, 2.0, RBAR_MIN_REPS, np.random.default_rng(4), 3.0
        )

        result = check.run()

        assert result["required"] == pytest.approx(3.0 * result["metadata"]["stderr"])


class TestSteinSuite:
    """Tests for the Stein suite grid."""

    def test_suite_builds(self) -> None:
        """Test three checks for each of the five triples."""
        checks = SuiteRegistry.get("stein")(SuiteContext(rng=np.random.default_rng(0), reps=10))

        assert len(SPEC_GRID) == 5
        assert len(checks) == 3 * len(SPEC_GRID)
        assert list(ETA_SIZES) == list(range(9))
        assert TEST_FUNCTIONS == 10

    @pytest.mark.slow
    def test_first_differences_cover_grid(self) -> None:
        """Test that every configuration size is paired with every test function."""
        check = FirstDifferenceCheck(SPEC_GRID[0], 50, np.random.default_rng(3), 3.0)

        result = check.run()

        assert result["metadata"]["cases"] == 90
        assert result["success"], result["detail"]


class TestPalmSuite:
    """Tests for the Palm suite and its subset grid."""

    def test_set_grid_runs(self) -> None:
        """Test the sub-intervals, the even sites and the cyclic neighbourhood."""
        model = RunsModel(n=20, k=2, p=0.4, moment_reps=20)

        grid = dict(set_grid(model, 0))

        assert grid["first third"] == frozenset(range(6))
        assert grid["last third"] == frozenset(range(14, 20))
        assert grid["even sites"] == frozenset(range(0, 20, 2))
        assert grid["neighbourhood"] == frozenset({18, 19, 0, 1, 2})

    def test_suite_builds_set_checks(self) -> None:
        """Test one subset check per site and subset, next to the size checks."""
        model = BernoulliModel([0.1, 0.2, 0.3, 0.15, 0.25, 0.05, 0.4, 0.2, 0.3])
        context = SuiteContext(rng=np.random.default_rng(0), reps=10, model=model)

        checks = SuiteRegistry.get("palm")(context)
        set_checks = [check for check in checks if isinstance(check, PalmSetIdentityCheck)]

        sites = spread_sites(model)
        assert len(set_checks) == sum(len(set_grid(model, site)) for site in sites)
        assert len(checks) == 2 * len(sites) + len(set_checks)

    @pytest.mark.slow
    def test_set_identity_bernoulli(self) -> None:
        """Test lambda({x}) E Xi_x(B) = p_x (p_0 + p_2) for independent sites."""
        model = BernoulliModel([0.1, 0.2, 0.3, 0.15, 0.25, 0.05])
        check = PalmSetIdentityCheck(
            model, 1, "first half", frozenset({0, 1, 2}), 20_000, np.random.default_rng(8), 3.0
        )

        result = check.run()

        assert result["success"], result["detail"]
        assert result["metadata"]["estimate"] == pytest.approx(0.2 * (0.1 + 0.3), abs=0.005)
