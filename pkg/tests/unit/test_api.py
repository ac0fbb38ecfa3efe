"""Unit tests for API module."""

import pytest

from pbdpkit.api import (
    partition_for,
    pbdp_law,
    plot_points,
    run_d2,
    run_fit,
    run_sample,
    run_sweep,
    run_verify,
)
from pbdpkit.carrier import DiscreteMeasure, UnitInterval
from pbdpkit.chain import BirthDeathParams
from pbdpkit.checks import Check, CheckResult, SuiteRegistry, register_builtin_suites
from pbdpkit.config.schema import ExperimentConfig
from pbdpkit.fitting import FitRejectedError
from pbdpkit.models import BernoulliModel
from pbdpkit.pbdp import PbdpSpec

TINY = {"model": "bernoulli", "n": 3, "p": 0.2}


def make_config(**fields) -> ExperimentConfig:
    return ExperimentConfig.from_mapping({"model": TINY, "seed": 3, **fields})


class PassingCheck(Check):
    """Check that always holds."""

    def __init__(self, name: str) -> None:
        super().__init__(name, "custom")

    def evaluate(self) -> CheckResult:
        return self.result(True, 0.0, 1.0)


class TestRunFit:
    """Tests for run_fit."""

    def test_bernoulli(self) -> None:
        """Test the fit dictionary of n = 10, p = 0.1."""
        config = ExperimentConfig.from_mapping(
            {"name": "small", "model": {"model": "bernoulli", "n": 10, "p": 0.1}}
        )

        result = run_fit(config)

        assert result["name"] == "small"
        assert result["regime"] == "underdispersed"
        assert result["a"] == pytest.approx(1.125)

    def test_rejected(self) -> None:
        """Test that a negative beta propagates as FitRejectedError."""
        config = ExperimentConfig.from_mapping({"model": {"model": "bernoulli", "n": 10, "p": 0.6}})

        with pytest.raises(FitRejectedError):
            run_fit(config)


class TestRunSample:
    """Tests for run_sample."""

    def test_count_and_reproducibility(self) -> None:
        """Test that n_samples patterns are drawn reproducibly."""
        config = make_config(n_samples=5)

        first = run_sample(config)
        second = run_sample(config)

        assert len(first) == 5
        assert first == second

    def test_fit_source(self) -> None:
        """Test that fitted samples land on the model's sites."""
        config = make_config(n_samples=20)
        sites = set(BernoulliModel.equal(3, 0.2).sites)

        for pattern in run_sample(config, source="fit"):
            assert set(pattern.points) <= sites

    def test_needs_seed(self) -> None:
        """Test that sampling without a seed fails."""
        with pytest.raises(ValueError, match="needs a seed"):
            run_sample(ExperimentConfig.from_mapping({"model": TINY}))


class TestRunD2:
    """Tests for run_d2."""

    def test_fit_against_itself(self) -> None:
        """Test that the fit compared with itself gives 0 in every row."""
        config = make_config(n_samples=20, d2={"left": "fit", "against": "fit", "n_bootstrap": 5})

        rows = run_d2(config)

        assert [row.method for row in rows] == [
            "empirical-OT",
            "exact-enumeration",
            "coupling-bound",
        ]
        assert rows[0].value == 0.0
        assert rows[1].value == pytest.approx(0.0, abs=1e-9)
        assert rows[2].value == pytest.approx(0.0, abs=1e-12)

    def test_missing_pbdp_section(self) -> None:
        """Test that against='pbdp' without a pbdp section fails."""
        config = make_config(d2={"against": "pbdp"})

        with pytest.raises(ValueError, match="'pbdp:' section"):
            run_d2(config)

    def test_incompatible_spaces(self) -> None:
        """Test that a PBDP on another space is refused."""
        config = ExperimentConfig.from_mapping(
            {
                "seed": 1,
                "model": {"model": "runs", "n": 8, "k": 2, "p": 0.3, "moment_reps": 10},
                "pbdp": {"a": 1.0, "nu": [[0.5, 1.0]]},
                "d2": {"against": "pbdp"},
            }
        )

        with pytest.raises(ValueError, match="Incompatible carrier spaces"):
            run_d2(config)

    def test_exact_skipped_when_too_large(self) -> None:
        """Test that only the empirical row remains for a large model."""
        config = ExperimentConfig.from_mapping(
            {
                "seed": 1,
                "n_samples": 10,
                "model": {"model": "bernoulli", "n": 20, "p": 0.1},
                "d2": {"n_bootstrap": 2},
            }
        )

        rows = run_d2(config)

        assert [row.method for row in rows] == ["empirical-OT"]


class TestPbdpLaw:
    """Tests for pbdp_law and partition_for."""

    def test_smallest_cap(self) -> None:
        """Test that the enumerated law carries essentially all the mass."""
        spec = PbdpSpec(
            params=BirthDeathParams(a=0.2),
            nu=DiscreteMeasure(atoms=((0.5, 1.0),)),
            space=UnitInterval(),
        )

        assert pbdp_law(spec).total == pytest.approx(1.0, abs=1e-9)

    def test_too_many_atoms(self) -> None:
        """Test that nu with five atoms is refused."""
        spec = PbdpSpec(
            params=BirthDeathParams(a=0.2),
            nu=DiscreteMeasure.from_arrays([0.1, 0.2, 0.3, 0.4, 0.5], [0.2] * 5),
            space=UnitInterval(),
        )

        with pytest.raises(ValueError, match="atoms"):
            pbdp_law(spec)

    def test_partition_override(self) -> None:
        """Test the configured block sizes."""
        model = BernoulliModel.equal(5, 0.2)

        assert partition_for(make_config(), model) is None
        assert partition_for(make_config(partition=[2, 3]), model).cell_sizes == [2, 3]


class TestRunVerify:
    """Tests for run_verify."""

    def teardown_method(self) -> None:
        SuiteRegistry.clear()
        register_builtin_suites()

    def test_custom_suite(self) -> None:
        """Test that the selected suite's checks are run and collected."""
        SuiteRegistry.register(
            "custom", lambda context: [PassingCheck("first"), PassingCheck("second")]
        )

        results = run_verify(make_config(), ["custom"])

        assert [r["check_name"] for r in results] == ["first", "second"]
        assert all(r["success"] for r in results)

    def test_unknown_suite(self) -> None:
        """Test that unknown suites raise ValueError."""
        with pytest.raises(ValueError, match="Unknown suite"):
            run_verify(make_config(), ["nope"])


class TestRunSweep:
    """Tests for run_sweep and plot_points."""

    def test_rejected_point_recorded(self) -> None:
        """Test that a rejected fit fills the error column and the sweep continues."""
        config = ExperimentConfig.from_mapping(
            {
                "seed": 1,
                "model": {"model": "bernoulli", "n": 10, "p": 0.1},
                "sweep": {"parameter": "p", "values": [0.1, 0.6], "metrics": ["b", "beta"]},
            }
        )

        rows = run_sweep(config)

        assert len(rows) == 4
        assert rows[1]["estimate"] == pytest.approx(1.0 / 7.2)
        assert rows[2]["estimate"] is None
        assert rows[2]["error"] != ""
        assert [point["x"] for point in plot_points(rows)] == [0.1, 0.1]

    def test_unknown_parameter(self) -> None:
        """Test that a parameter the model lacks is reported per row."""
        config = make_config(sweep={"parameter": "k", "values": [2], "metrics": ["b"]})

        rows = run_sweep(config)

        assert "has no parameter 'k'" in rows[0]["error"]

    def test_missing_section(self) -> None:
        """Test that a configuration without a sweep section is refused."""
        with pytest.raises(ValueError, match="No sweep section"):
            run_sweep(make_config())
