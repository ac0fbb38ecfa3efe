"""Unit tests for the birth-death chain numerics."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from pbdpkit.chain import (
    BirthDeathParams,
    CountDistribution,
    TruncationError,
    hitting_down,
    hitting_up,
    k_minus,
    k_plus,
    rates,
    ratio_chain_violations,
    stationary,
    stein_c_bound,
    stein_c_integral_bound,
    stein_d2_bound,
    survival_bound,
    tv_distance,
    xia_bounds_check,
)


class TestBirthDeathParams:
    """Tests for BirthDeathParams validation and rates."""

    def test_rates(self) -> None:
        """Test alpha_k = a + bk and beta_k = k + beta k(k-1)."""
        params = BirthDeathParams(a=1.0, b=0.5, beta=0.1)

        alpha, death = rates(params, 3)

        assert alpha == pytest.approx(2.5)
        assert death == pytest.approx(3.6)

    def test_zero_state_has_no_deaths(self) -> None:
        """Test that the empty state cannot lose a particle."""
        assert rates(BirthDeathParams(a=2.0, beta=3.0), 0) == (2.0, 0.0)

    def test_negative_state_rejected(self) -> None:
        """Test that negative states raise ValueError."""
        with pytest.raises(ValueError, match="nonnegative"):
            rates(BirthDeathParams(a=1.0), -1)

    @pytest.mark.parametrize(
        "kwargs",
        [{"a": 0.0}, {"a": -1.0}, {"a": 1.0, "b": 1.0}, {"a": 1.0, "beta": -0.1}],
    )
    def test_invalid_parameters(self, kwargs: dict[str, float]) -> None:
        """Test that out-of-range parameters fail validation."""
        with pytest.raises(ValidationError):
            BirthDeathParams(**kwargs)

    def test_params_are_frozen(self) -> None:
        """Test that parameters cannot be mutated."""
        params = BirthDeathParams(a=1.0)

        with pytest.raises(ValidationError):
            params.a = 2.0  # type: ignore[misc]


class TestStationary:
    """Tests for the stationary law."""

    def test_poisson_reduction(self) -> None:
        """Test that b = beta = 0 gives the Poisson law."""
        dist = stationary(BirthDeathParams(a=2.0))
        reference = stats.poisson.pmf(np.arange(40), 2.0)

        assert max(abs(dist.pmf(k) - reference[k]) for k in range(40)) < 1e-12
        assert dist.mean() == pytest.approx(2.0, rel=1e-10)
        assert dist.variance() == pytest.approx(2.0, rel=1e-9)

    def test_negative_binomial_reduction(self) -> None:
        """Test that beta = 0 gives the negative binomial law with a/b successes."""
        dist = stationary(BirthDeathParams(a=1.0, b=0.5))
        reference = stats.nbinom.pmf(np.arange(40), 2.0, 0.5)

        assert max(abs(dist.pmf(k) - reference[k]) for k in range(40)) < 1e-12

    def test_detailed_balance(self) -> None:
        """Test pi_k alpha_k = pi_{k+1} beta_{k+1}."""
        params = BirthDeathParams(a=5.0, b=0.3, beta=0.05)
        dist = stationary(params)

        for k in range(20):
            alpha, _ = rates(params, k)
            _, death = rates(params, k + 1)
            assert dist.pmf(k) * alpha == pytest.approx(dist.pmf(k + 1) * death, rel=1e-12)

    def test_detailed_balance_long_support(self) -> None:
        """Test neighbour balance to 1e-12 across a wide support."""
        params = BirthDeathParams(a=20.0, b=0.5)
        dist = stationary(params)

        for k in range(dist.max_count):
            if dist.pmf(k + 1) < 1e-250:
                break
            alpha, _ = rates(params, k)
            _, death = rates(params, k + 1)
            assert dist.pmf(k) * alpha == pytest.approx(dist.pmf(k + 1) * death, rel=1e-12)

    def test_tail_bound_within_tolerance(self) -> None:
        """Test that the reported tail bound respects the tolerance."""
        dist = stationary(BirthDeathParams(a=20.0, beta=0.01), tol=1e-10)

        assert dist.tail_bound <= 1e-10
        assert float(np.sum(dist.probs)) == pytest.approx(1.0)

    def test_truncation_cap(self) -> None:
        """Test that a support beyond max_states raises TruncationError."""
        with pytest.raises(TruncationError):
            stationary(BirthDeathParams(a=100.0), max_states=10)

    def test_invalid_tolerance(self) -> None:
        """Test that tol outside (0, 1) raises ValueError."""
        with pytest.raises(ValueError, match="tol"):
            stationary(BirthDeathParams(a=1.0), tol=0.0)

    def test_ratio_chain_holds(self) -> None:
        """Test the cdf and survival ratio inequalities on several triples."""
        for params in (
            BirthDeathParams(a=0.5),
            BirthDeathParams(a=8.0, b=0.5),
            BirthDeathParams(a=20.0, beta=1.0),
        ):
            assert ratio_chain_violations(params, stationary(params)) == []


class TestCountDistribution:
    """Tests for CountDistribution helpers."""

    def test_point_mass(self) -> None:
        """Test a law concentrated on one count."""
        dist = CountDistribution.point_mass(3)

        assert dist.pmf(3) == 1.0
        assert dist.mean() == 3.0
        assert dist.variance() == 0.0
        assert dist.cdf(2) == 0.0
        assert dist.survival(3) == 1.0

    def test_out_of_range_counts(self) -> None:
        """Test pmf, cdf and survival outside the stored support."""
        dist = CountDistribution(probs=np.array([0.25, 0.75]))

        assert dist.pmf(-1) == 0.0
        assert dist.pmf(5) == 0.0
        assert dist.cdf(10) == pytest.approx(1.0)
        assert dist.survival(0) == pytest.approx(1.0)
        assert dist.survival(7) == 0.0

    def test_negative_probability_rejected(self) -> None:
        """Test that negative entries raise ValueError."""
        with pytest.raises(ValueError):
            CountDistribution(probs=np.array([0.5, -0.1, 0.6]))

    def test_tv_distance(self) -> None:
        """Test total variation between two Poisson laws."""
        p = stationary(BirthDeathParams(a=1.0))
        q = stationary(BirthDeathParams(a=2.0))
        ks = np.arange(60)
        expected = 0.5 * np.sum(np.abs(stats.poisson.pmf(ks, 1.0) - stats.poisson.pmf(ks, 2.0)))

        assert tv_distance(p, q) == pytest.approx(expected, abs=1e-10)
        assert tv_distance(p, p) < 1e-12


class TestHittingTimes:
    """Tests for expected hitting times."""

    def test_hitting_up_from_empty(self) -> None:
        """Test that leaving 0 upwards takes 1/a on average."""
        params = BirthDeathParams(a=3.0, b=0.2, beta=0.1)

        assert hitting_up(params, stationary(params), 0) == pytest.approx(1.0 / 3.0)

    def test_hitting_down_poisson(self) -> None:
        """Test E tau_1^- = F-bar(1) / (beta_1 pi_1) for the Poisson chain."""
        params = BirthDeathParams(a=2.0)
        expected = (1.0 - math.exp(-2.0)) / (2.0 * math.exp(-2.0))

        assert hitting_down(params, stationary(params), 1) == pytest.approx(expected, rel=1e-9)

    def test_hitting_down_needs_positive_state(self) -> None:
        """Test that a downward passage from 0 is rejected."""
        params = BirthDeathParams(a=2.0)

        with pytest.raises(ValueError):
            hitting_down(params, stationary(params), 0)

    def test_state_outside_support(self) -> None:
        """Test that states beyond the stored support are rejected."""
        params = BirthDeathParams(a=1.0)
        dist = stationary(params)

        with pytest.raises(ValueError, match="outside the support"):
            hitting_up(params, dist, dist.max_count + 5)


class TestInitialDeaths:
    """Tests for k_plus, k_minus and the initial-death inequalities."""

    def test_k_plus_base_cases(self) -> None:
        """Test E K_0^+ = 0 and E K_1^+ = 1/(alpha_1 + 1) for b = beta = 0."""
        params = BirthDeathParams(a=2.0)

        assert k_plus(params, 0) == 0.0
        assert k_plus(params, 1) == pytest.approx(1.0 / 3.0)

    def test_k_plus_rejects_negative(self) -> None:
        """Test that negative m raises ValueError."""
        with pytest.raises(ValueError):
            k_plus(BirthDeathParams(a=1.0), -1)

    def test_k_minus_bracket(self) -> None:
        """Test that the bracket is ordered and lies in [1, m]."""
        params = BirthDeathParams(a=2.0, b=0.3, beta=0.2)

        for m in (1, 3, 10):
            low, high = k_minus(params, m, horizon=m + 64, tol=1e-10)
            assert 1.0 <= low <= high <= m
            assert high - low <= 1e-10

    def test_k_minus_of_one(self) -> None:
        """Test that a single initial particle is always the one that dies."""
        low, high = k_minus(BirthDeathParams(a=4.0), 1, horizon=40)

        assert low == pytest.approx(1.0)
        assert high == pytest.approx(1.0)

    def test_k_minus_arguments(self) -> None:
        """Test that m < 1 and horizons not above m are rejected."""
        params = BirthDeathParams(a=1.0)

        with pytest.raises(ValueError):
            k_minus(params, 0, horizon=10)
        with pytest.raises(ValueError):
            k_minus(params, 5, horizon=5)

    @pytest.mark.parametrize(
        "params",
        [
            BirthDeathParams(a=0.5),
            BirthDeathParams(a=8.0, b=0.5),
            BirthDeathParams(a=20.0, beta=0.05),
            BirthDeathParams(a=2.0, b=0.3, beta=0.01),
        ],
    )
    def test_initial_death_inequalities(self, params: BirthDeathParams) -> None:
        """Test that both inequalities hold for m up to 60."""
        assert xia_bounds_check(params, 60) == []


class TestSteinBounds:
    """Tests for the Stein-factor bounds."""

    def test_c_bound_poisson(self) -> None:
        """Test C_0 with b = 0: min(1, 1/2 + 1/a)."""
        assert stein_c_bound(BirthDeathParams(a=4.0), 0) == pytest.approx(0.75)

    def test_c_bound_uses_rate_term(self) -> None:
        """Test that 1/((a ^ b)(n+1)) wins for large a and b."""
        params = BirthDeathParams(a=1.0, b=0.9)

        assert stein_c_bound(params, 9) == pytest.approx(1.0 / 9.0)

    def test_c_bound_middle_term(self) -> None:
        """Test that 1/(2(n+1)) + 1/a wins when it is smallest."""
        assert stein_c_bound(BirthDeathParams(a=4.0, b=0.5), 3) == pytest.approx(0.375)

    def test_integral_bound_is_sharper(self) -> None:
        """Test that the integral form never exceeds the middle term."""
        for a in (0.5, 2.0, 8.0, 50.0):
            params = BirthDeathParams(a=a)
            for n in range(0, 30):
                middle = 1.0 / (2 * (n + 1)) + 1.0 / a
                assert stein_c_integral_bound(params, n) <= middle + 1e-12

    def test_integral_bound_at_equality(self) -> None:
        """Test the value 1/(n+1) when a = 2(n+1)."""
        assert stein_c_integral_bound(BirthDeathParams(a=8.0), 3) == pytest.approx(0.25)

    def test_d2_bound(self) -> None:
        """Test 2/(n+1) + 5/a."""
        assert stein_d2_bound(BirthDeathParams(a=5.0), 1) == pytest.approx(2.0)

    def test_survival_bound(self) -> None:
        """Test both branches of the surviving-fraction bound."""
        params = BirthDeathParams(a=2.0)

        assert survival_bound(params, 1, 0.0) == pytest.approx(1.0)
        assert survival_bound(params, 1, math.log(2.0)) == pytest.approx(0.5)
        with_births = BirthDeathParams(a=2.0, b=0.5)
        assert survival_bound(with_births, 100, 1.0) == pytest.approx(math.exp(-0.5))

    def test_bounds_reject_negative_n(self) -> None:
        """Test argument validation of the Stein bounds."""
        params = BirthDeathParams(a=1.0)

        with pytest.raises(ValueError):
            stein_c_bound(params, -1)
        with pytest.raises(ValueError):
            stein_d2_bound(params, -1)
        with pytest.raises(ValueError):
            survival_bound(params, 0, 1.0)
