"""Unit tests for the locally dependent point process models."""

import math

import numpy as np
import pytest

from pbdpkit.carrier import DiscreteMeasure, PointPattern, UnitInterval
from pbdpkit.config.schema import BernoulliConfig, CompoundPoissonConfig, RunsConfig
from pbdpkit.models import BernoulliModel, CompoundPoissonModel, RunsModel, build_model


def law_marginal(law: list[tuple[PointPattern, float]], location: float) -> float:
    """E[Xi({x})(|Xi| - 1)] from an enumerated law."""
    return math.fsum(prob * p.count_at(location) * (p.size - 1) for p, prob in law)


def make_cp() -> CompoundPoissonModel:
    return CompoundPoissonModel(
        UnitInterval(),
        [
            DiscreteMeasure.from_arrays([0.2, 0.6], [1.5, 0.5]),
            DiscreteMeasure.from_arrays([0.6], [0.25]),
        ],
    )


class TestBernoulliModel:
    """Tests for BernoulliModel."""

    def test_sites(self) -> None:
        """Test that site j sits at (j + 1)/n."""
        model = BernoulliModel.equal(4, 0.3)

        assert model.sites == (0.25, 0.5, 0.75, 1.0)
        assert model.site_intensity(2) == pytest.approx(0.3)

    def test_invalid_probabilities(self) -> None:
        """Test that probabilities outside [0, 1] and empty lists are rejected."""
        with pytest.raises(ValueError):
            BernoulliModel([0.5, 1.2])
        with pytest.raises(ValueError):
            BernoulliModel([])

    def test_moments(self) -> None:
        """Test mean and variance of the total count."""
        moments = BernoulliModel([0.1, 0.2, 0.3]).moments()

        assert moments.total_mean == pytest.approx(0.6)
        assert moments.variance == pytest.approx(0.09 + 0.16 + 0.21)
        assert not moments.is_overdispersed

    def test_exact_law_is_probability(self) -> None:
        """Test that the enumerated law sums to one and has the right mean."""
        model = BernoulliModel([0.1, 0.4, 0.25])
        law = model.exact_law()

        assert law is not None
        assert math.fsum(prob for _, prob in law) == pytest.approx(1.0)
        assert math.fsum(prob * p.size for p, prob in law) == pytest.approx(0.75)

    def test_exact_law_size_limit(self) -> None:
        """Test that large models are not enumerated."""
        assert BernoulliModel.equal(17, 0.1).exact_law() is None

    def test_second_factorial_marginal(self) -> None:
        """Test p_i (|lambda| - p_i) against the enumerated law."""
        model = BernoulliModel([0.1, 0.4, 0.25])
        law = model.exact_law()
        assert law is not None

        value, stderr = model.second_factorial_site_marginal(1)

        assert value == pytest.approx(0.4 * 0.35)
        assert value == pytest.approx(law_marginal(law, model.sites[1]))
        assert stderr == 0.0

    def test_palm_drops_the_site(self) -> None:
        """Test that reduced Palm samples never contain the conditioning site."""
        model = BernoulliModel.equal(5, 0.9)
        rng = np.random.default_rng(0)

        for _ in range(20):
            assert model.sites[2] not in model.sample_palm(2, rng).points
        pair = model.sample_pair_palm(0, 4, rng)
        assert model.sites[0] not in pair.points
        assert model.sites[4] not in pair.points

    def test_palm_zero_intensity(self) -> None:
        """Test that Palm sampling at a zero-probability site fails."""
        with pytest.raises(ValueError, match="zero intensity"):
            BernoulliModel([0.0, 0.5]).sample_palm(0, np.random.default_rng(0))

    def test_pair_palm_needs_distinct_sites(self) -> None:
        """Test that a pair Palm draw at one site is rejected."""
        with pytest.raises(ValueError, match="differ"):
            BernoulliModel.equal(3, 0.5).sample_pair_palm(1, 1, np.random.default_rng(0))

    def test_neighbourhoods(self) -> None:
        """Test A = B = {x} and A_xy = B_xy = {x, y}."""
        model = BernoulliModel.equal(3, 0.2)

        assert model.neighbourhoods(1) == (frozenset({1}), frozenset({1}))
        assert model.pair_neighbourhoods(0, 2) == (frozenset({0, 2}), frozenset({0, 2}))
        assert model.pair_intensity(0, 2) == pytest.approx(0.04)
        assert model.pair_intensity(1, 1) == 0.0

    def test_site_out_of_range(self) -> None:
        """Test that invalid site indices raise ValueError."""
        with pytest.raises(ValueError, match="out of range"):
            BernoulliModel.equal(3, 0.2).site_intensity(3)

    def test_reference_fit_equal_p(self) -> None:
        """Test the equal-p closed forms for n = 10, p = 0.1."""
        fit = BernoulliModel.equal(10, 0.1).reference_fit()

        assert fit is not None
        assert fit["beta"] == pytest.approx(1.0 / 7.2)
        assert fit["a"] == pytest.approx(1.125)
        assert fit["a_equal_p"] == pytest.approx(1.125)

    def test_pattern_helpers(self) -> None:
        """Test site_counts, count_in and restrict_outside."""
        model = BernoulliModel.equal(4, 0.5)
        pattern = PointPattern.of([0.25, 0.75, 1.0])

        assert model.site_counts(pattern).tolist() == [1, 0, 1, 1]
        assert model.count_in(pattern, [0, 1, 2]) == 2
        assert model.restrict_outside(pattern, [2, 3]).points == (0.25,)
        with pytest.raises(ValueError, match="not a site"):
            model.site_counts(PointPattern.of([0.3]))


class TestRunsModel:
    """Tests for RunsModel."""

    def test_length_requirement(self) -> None:
        """Test that n < 2k is rejected."""
        with pytest.raises(ValueError, match="n >= 2k"):
            RunsModel(n=5, k=3, p=0.5)

    def test_variance_closed_form(self) -> None:
        """Test the covariance sum against n p^k/(1-p) (1 + p - (2k+1)p^k + (2k-1)p^(k+1))."""
        model = RunsModel(n=100, k=2, p=0.3, moment_reps=100)

        assert model.total_mean == pytest.approx(9.0)
        assert model.variance == pytest.approx(11.97)

    def test_exact_law_moments(self) -> None:
        """Test mean, variance and the site marginal against enumeration."""
        model = RunsModel(n=8, k=2, p=0.4, moment_reps=100)
        law = model.exact_law()
        assert law is not None

        mean = math.fsum(prob * p.size for p, prob in law)
        second = math.fsum(prob * p.size**2 for p, prob in law)

        assert math.fsum(prob for _, prob in law) == pytest.approx(1.0)
        assert mean == pytest.approx(model.total_mean)
        assert second - mean**2 == pytest.approx(model.variance)
        value, _ = model.second_factorial_site_marginal(3)
        assert value == pytest.approx(law_marginal(law, model.sites[3]))

    def test_dispersion_boundary(self) -> None:
        """Test that small p is overdispersed and p near 1 is underdispersed."""
        assert RunsModel(n=20, k=2, p=0.3, moment_reps=100).is_overdispersed
        assert not RunsModel(n=20, k=2, p=0.9, moment_reps=100).is_overdispersed

    def test_neighbourhoods_are_cyclic(self) -> None:
        """Test the windows of radius k - 1 and 2k - 2 around site 0."""
        model = RunsModel(n=10, k=2, p=0.5, moment_reps=100)

        inner, outer = model.neighbourhoods(0)

        assert inner == frozenset({9, 0, 1})
        assert outer == frozenset({8, 9, 0, 1, 2})

    def test_palm_drops_the_site(self) -> None:
        """Test that the run at the conditioning site is removed."""
        model = RunsModel(n=10, k=2, p=0.5, moment_reps=100)
        rng = np.random.default_rng(1)

        for _ in range(20):
            assert model.sites[4] not in model.sample_palm(4, rng).points

    def test_simulated_third_moment(self) -> None:
        """Test that the third moment is flagged as estimated with its seed."""
        moments = RunsModel(n=20, k=2, p=0.3, moment_reps=500, moment_seed=5).moments()

        assert moments.estimated == ("third_moment",)
        assert moments.moment_seed == 5
        assert moments.third_moment_stderr > 0

    def test_reference_fit(self) -> None:
        """Test the closed-form fit for n = 100, k = 2, p = 0.3."""
        fit = RunsModel(n=100, k=2, p=0.3, moment_reps=100).reference_fit()

        assert fit is not None
        assert fit["a"] == pytest.approx(6.76692, abs=1e-5)
        assert fit["b"] == pytest.approx(0.24812, abs=1e-5)


class TestCompoundPoissonModel:
    """Tests for CompoundPoissonModel."""

    def test_needs_nonzero_intensity(self) -> None:
        """Test that all-zero cluster intensities are rejected."""
        with pytest.raises(ValueError, match="nonzero"):
            CompoundPoissonModel(UnitInterval(), [DiscreteMeasure()])

    def test_mean_measure(self) -> None:
        """Test lambda({x}) = sum_i i mu_i({x})."""
        model = make_cp()

        assert model.sites == (0.2, 0.6)
        assert model.site_intensity(0) == pytest.approx(1.5)
        assert model.site_intensity(1) == pytest.approx(1.0)

    def test_cumulants(self) -> None:
        """Test mean and variance of the total count."""
        moments = make_cp().moments()

        assert moments.total_mean == pytest.approx(2.5)
        assert moments.variance == pytest.approx(3.0)
        assert moments.is_overdispersed

    def test_clusters_stack(self) -> None:
        """Test that size-2 clusters put two points at one site."""
        model = CompoundPoissonModel(
            UnitInterval(), [DiscreteMeasure(), DiscreteMeasure(atoms=((0.5, 3.0),))]
        )

        for stream in np.random.default_rng(2).spawn(10):
            assert model.sample(stream).size % 2 == 0

    def test_marginal_against_simulation(self) -> None:
        """Test the exact marginal against the Monte Carlo estimator."""
        model = make_cp()
        expected, _ = model.second_factorial_site_marginal(1)

        estimate, stderr = model.estimate_second_factorial_marginal(
            1, 4000, np.random.default_rng(3)
        )

        assert abs(estimate - expected) <= 5 * stderr

    def test_reference_fit(self) -> None:
        """Test b = 0.25 and a = 4.5 for |mu_1| = 4, |mu_2| = 1."""
        model = CompoundPoissonModel(
            UnitInterval(),
            [DiscreteMeasure(atoms=((0.5, 4.0),)), DiscreteMeasure(atoms=((0.5, 1.0),))],
        )

        fit = model.reference_fit()

        assert fit == pytest.approx({"a": 4.5, "b": 0.25, "beta": 0.0})


class TestBuildModel:
    """Tests for build_model."""

    def test_bernoulli(self) -> None:
        """Test a Bernoulli section with one probability."""
        model = build_model(BernoulliConfig(n=5, p=0.2))

        assert isinstance(model, BernoulliModel)
        assert model.n == 5

    def test_runs(self) -> None:
        """Test a runs section."""
        model = build_model(RunsConfig(n=12, k=3, p=0.4, moment_reps=50))

        assert isinstance(model, RunsModel)
        assert model.describe() == {
            "model": "runs",
            "sites": 12,
            "space": "circle",
            "n": 12,
            "k": 3,
            "p": 0.4,
        }

    def test_cp_scale(self) -> None:
        """Test that mu1_scale multiplies the size-1 intensity."""
        config = CompoundPoissonConfig(mus=[[(0.5, 2.0)], [(0.5, 1.0)]], mu1_scale=3.0)

        model = build_model(config)

        assert isinstance(model, CompoundPoissonModel)
        assert model.site_intensity(0) == pytest.approx(8.0)
