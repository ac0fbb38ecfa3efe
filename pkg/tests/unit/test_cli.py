"""Unit tests for CLI module."""

import csv
import io
import json
from pathlib import Path
from unittest.mock import patch

import yaml
from click.testing import CliRunner

from pbdpkit.cli import cli

BERNOULLI = '{"model": "bernoulli", "n": 10, "p": 0.1}'
TINY_BERNOULLI = '{"model": "bernoulli", "n": 3, "p": 0.2}'


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class TestCLI:
    """Tests for the CLI group."""

    def test_cli_help(self) -> None:
        """Test CLI help command."""
        runner = CliRunner()
        result = runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        assert "polynomial birth-death" in result.output
        for command in ("fit", "sample", "d2", "verify", "sweep"):
            assert command in result.output

    def test_cli_version(self) -> None:
        """Test CLI version command."""
        runner = CliRunner()
        result = runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert "0.1.0" in result.output

    def test_invalid_model_json(self) -> None:
        """Test that a malformed --model is a usage error."""
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "--model", "{not json"])

        assert result.exit_code == 2
        assert "not valid JSON" in result.output

    def test_invalid_partition(self) -> None:
        """Test that a malformed --partition is a usage error."""
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "--model", BERNOULLI, "--partition", "5,x"])

        assert result.exit_code == 2
        assert "comma-separated" in result.output

    def test_nonexistent_config(self) -> None:
        """Test a configuration path that does not exist."""
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "--config", "/nonexistent/file.yaml"])

        assert result.exit_code != 0


class TestFitCommand:
    """Tests for the fit command."""

    def test_bernoulli(self) -> None:
        """Test the JSON fit of n = 10, p = 0.1."""
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "-q", "--model", BERNOULLI])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["regime"] == "underdispersed"
        assert abs(data["a"] - 1.125) < 1e-9
        assert data["model"]["model"] == "bernoulli"

    def test_rejected_fit(self) -> None:
        """Test that a negative beta exits 2 with a structured error."""
        runner = CliRunner()
        result = runner.invoke(
            cli, ["fit", "-q", "--model", '{"model": "bernoulli", "n": 10, "p": 0.6}']
        )

        assert result.exit_code == 2
        data = json.loads(result.output)
        assert data["error"] == "fit_rejected"
        assert data["diagnostics"]["beta"] < 0

    def test_missing_model(self) -> None:
        """Test that fit without a model exits 1."""
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "-q"])

        assert result.exit_code == 1

    def test_out_file(self, tmp_path: Path) -> None:
        """Test writing the fit to --out."""
        out = tmp_path / "fits" / "fit.json"
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "-q", "--model", BERNOULLI, "--out", str(out)])

        assert result.exit_code == 0
        assert result.output == ""
        assert json.loads(out.read_text())["regime"] == "underdispersed"

    def test_config_file(self, tmp_path: Path) -> None:
        """Test loading the model from a configuration file."""
        path = tmp_path / "config.yaml"
        path.write_text(
            yaml.dump(
                {
                    "name": "cp-example",
                    "model": {"model": "cp", "mus": [[[0.5, 4.0]], [[0.5, 1.0]]]},
                }
            )
        )
        runner = CliRunner()
        result = runner.invoke(cli, ["fit", "-q", "--config", str(path)])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["name"] == "cp-example"
        assert abs(data["b"] - 0.25) < 1e-12


class TestSampleCommand:
    """Tests for the sample command."""

    def test_json_lines(self) -> None:
        """Test one JSON object per drawn configuration."""
        runner = CliRunner()
        result = runner.invoke(
            cli, ["sample", "-q", "--model", BERNOULLI, "--seed", "7", "--n-samples", "3"]
        )

        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert len(lines) == 3
        assert all("points" in json.loads(line) for line in lines)

    def test_reproducible(self) -> None:
        """Test that a fixed seed reproduces the output byte for byte."""
        runner = CliRunner()
        args = ["sample", "-q", "--model", BERNOULLI, "--seed", "7", "--from", "fit"]

        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)

        assert first.exit_code == 0
        assert first.output == second.output

    def test_missing_seed(self) -> None:
        """Test that a stochastic command without a seed exits 1."""
        runner = CliRunner()
        result = runner.invoke(cli, ["sample", "-q", "--model", BERNOULLI])

        assert result.exit_code == 1

    def test_seed_out_of_range(self) -> None:
        """Test that seeds above 2^64 - 1 are refused."""
        runner = CliRunner()
        result = runner.invoke(
            cli, ["sample", "--model", BERNOULLI, "--seed", str(2**64)]
        )

        assert result.exit_code == 2


class TestD2Command:
    """Tests for the d2 command."""

    def test_tiny_bernoulli(self) -> None:
        """Test the empirical and exact rows for a three-site model."""
        runner = CliRunner()
        result = runner.invoke(
            cli, ["d2", "-q", "--model", TINY_BERNOULLI, "--seed", "1", "--n-samples", "30"]
        )

        assert result.exit_code == 0
        rows = read_csv(result.output)
        assert [row["method"] for row in rows] == ["empirical-OT", "exact-enumeration"]
        assert rows[0]["seed"] == "1"
        assert all(0.0 <= float(row["value"]) <= 1.0 for row in rows)


class TestVerifyCommand:
    """Tests for the verify command."""

    def test_all_passed(self) -> None:
        """Test exit code 0 and CSV rows when every check passes."""
        results = [
            {
                "suite": "chain",
                "check_name": "poisson reduction (a=2.0)",
                "success": True,
                "observed": 0.0,
                "required": 1e-12,
                "detail": "",
            }
        ]
        runner = CliRunner()
        with patch("pbdpkit.cli.run_verify", return_value=results) as run_verify:
            result = runner.invoke(cli, ["verify", "-q", "--seed", "1", "--suite", "chain"])

        assert result.exit_code == 0
        assert run_verify.call_args.args[1] == ["chain"]
        assert read_csv(result.output)[0]["check_name"] == "poisson reduction (a=2.0)"

    def test_failure_exits_one(self) -> None:
        """Test exit code 1 when a check fails."""
        results = [
            {
                "suite": "palm",
                "check_name": "palm identity",
                "success": False,
                "observed": 5.0,
                "required": 3.0,
                "detail": "z-score",
            }
        ]
        runner = CliRunner()
        with patch("pbdpkit.cli.run_verify", return_value=results):
            result = runner.invoke(cli, ["verify", "-q", "--seed", "1"])

        assert result.exit_code == 1

    def test_unknown_suite(self) -> None:
        """Test that an unknown suite exits 1."""
        runner = CliRunner()
        result = runner.invoke(cli, ["verify", "-q", "--seed", "1", "--suite", "nope"])

        assert result.exit_code == 1


class TestSweepCommand:
    """Tests for the sweep command."""

    def test_missing_section(self) -> None:
        """Test that sweeping without a sweep section exits 1."""
        runner = CliRunner()
        result = runner.invoke(cli, ["sweep", "-q", "--model", BERNOULLI, "--seed", "1"])

        assert result.exit_code == 1

    def test_plot_file(self, tmp_path: Path) -> None:
        """Test that --out also writes <out>.plot.csv without failed rows."""
        rows = [
            {
                "parameter": "n",
                "value": 10.0,
                "metric": "b",
                "estimate": 0.0,
                "stderr": 0.0,
                "seed": 1,
                "reps": 10,
                "error": "",
            },
            {
                "parameter": "n",
                "value": 20.0,
                "metric": "b",
                "estimate": None,
                "stderr": None,
                "seed": 1,
                "reps": 10,
                "error": "FitRejectedError: negative beta",
            },
        ]
        out = tmp_path / "sweep.csv"
        runner = CliRunner()
        with patch("pbdpkit.cli.run_sweep", return_value=rows):
            result = runner.invoke(cli, ["sweep", "-q", "--seed", "1", "--out", str(out)])

        assert result.exit_code == 0
        assert len(read_csv(out.read_text())) == 2
        plot = read_csv((tmp_path / "sweep.csv.plot.csv").read_text())
        assert plot == [{"metric": "b", "x": "10.0", "y": "0.0", "stderr": "0.0"}]
