"""Command-line interface for pbdpkit.

Model specs given with ``--model`` are inline JSON objects with a ``model`` key:

    {"model": "bernoulli", "n": 10, "p": 0.1}
    {"model": "runs", "n": 100, "k": 2, "p": 0.3}
    {"model": "cp", "mus": [[[0.5, 4.0]], [[0.5, 1.0]]]}

For "bernoulli", ``p`` may also be a list of per-site probabilities (n is then
optional). For "cp", ``mus[i - 1]`` lists the [point, weight] atoms of the
cluster-size-i intensity, and ``space`` selects the carrier space
({"kind": "interval" | "circle" | "sites", "distances": [[...]]}).
"""

import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click

from pbdpkit import __version__
from pbdpkit.api import plot_points, run_d2, run_fit, run_sample, run_sweep, run_verify
from pbdpkit.config.schema import ExperimentConfig
from pbdpkit.fitting import FitRejectedError
from pbdpkit.utils.logging import TRACE, setup_logging
from pbdpkit.utils.output import (
    plot_path,
    write_csv,
    write_json,
    write_jsonl,
    write_plot_data,
)

logger = logging.getLogger(__name__)

D2_COLUMNS = ("method", "value", "stderr", "n_samples", "seed")
VERIFY_COLUMNS = ("suite", "check_name", "success", "observed", "required", "detail")
SWEEP_COLUMNS = ("parameter", "value", "metric", "estimate", "stderr", "seed", "reps", "error")


def _parse_model(ctx: click.Context, param: click.Parameter, value: str | None) -> Any:
    if value is None:
        return None
    try:
        data = json.loads(value)
    except json.JSONDecodeError as e:
        raise click.BadParameter(f"not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise click.BadParameter("expected a JSON object")
    return data


def _parse_partition(ctx: click.Context, param: click.Parameter, value: str | None) -> Any:
    if value is None:
        return None
    try:
        return [int(part) for part in value.split(",")]
    except ValueError as e:
        raise click.BadParameter("expected comma-separated block sizes, e.g. 10,10,5") from e


def experiment_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by every subcommand."""
    options = [
        click.option(
            "--model", "model_spec", callback=_parse_model, help="Model spec as inline JSON"
        ),
        click.option(
            "--config",
            "-c",
            "config_path",
            type=click.Path(exists=True, path_type=Path),
            help="Experiment configuration file (YAML or JSON)",
        ),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Master seed (u64)"),
        click.option("--reps", type=click.IntRange(min=1), help="Monte Carlo replicates"),
        click.option(
            "--n-samples", type=click.IntRange(min=2), help="Samples per side for empirical d2"
        ),
        click.option("--out", "-o", type=click.Path(path_type=Path), help="Output file"),
        click.option(
            "--partition", callback=_parse_partition, help="Partition block sizes, e.g. 10,10,5"
        ),
        click.option(
            "--u", type=click.FloatRange(min=0.0, min_open=True), help="Bound parameter u"
        ),
        click.option(
            "--verbose", "-v", count=True, help="Increase verbosity (-v=DEBUG, -vv=TRACE)"
        ),
        click.option("--quiet", "-q", is_flag=True, help="Suppress all output except errors"),
        click.option("--log-file", type=click.Path(path_type=Path), help="Write logs to file"),
        click.option(
            "--log-format",
            type=click.Choice(["text", "json"]),
            default="text",
            help="Log file format (text or json)",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _log_level(verbose: int, quiet: bool) -> int:
    if quiet:
        return logging.ERROR
    if verbose == 0:
        return logging.INFO
    if verbose == 1:
        return logging.DEBUG
    return TRACE


def _setup(kwargs: dict[str, Any]) -> tuple[ExperimentConfig, int]:
    """Configure logging and build the experiment config; flags override file values."""
    level = _log_level(kwargs.pop("verbose"), kwargs.pop("quiet"))
    setup_logging(
        level=level,
        log_file=kwargs.pop("log_file"),
        log_format=kwargs.pop("log_format"),
        enable_colors=True,
    )
    config_path = kwargs.pop("config_path")
    try:
        if config_path is not None:
            logger.info(f"Loading configuration from: {config_path}")
            config = ExperimentConfig.from_yaml(config_path)
        else:
            config = ExperimentConfig()
        out = kwargs.pop("out")
        config = config.with_overrides(
            model=kwargs.pop("model_spec"),
            seed=kwargs.pop("seed"),
            reps=kwargs.pop("reps"),
            n_samples=kwargs.pop("n_samples"),
            out=str(out) if out is not None else None,
            partition=kwargs.pop("partition"),
            u=kwargs.pop("u"),
        )
    except Exception as e:
        logger.error(f"Error loading configuration: {e}", exc_info=True)
        sys.exit(1)
    return config, level


def _run(action: Callable[[], None]) -> None:
    """Run a command body with the exit-code policy of the CLI."""
    try:
        action()
    except FitRejectedError as e:
        logger.warning(f"Fit rejected: {e}")
        write_json(e.to_dict())
        sys.exit(2)
    except Exception as e:
        logger.error(f"Error: {e}", exc_info=True)
        sys.exit(1)


@click.group()
@click.version_option(version=__version__)
def cli() -> None:
    """pbdpkit - polynomial birth-death point process approximations."""
    pass


@cli.command()
@experiment_options
def fit(**kwargs: Any) -> None:
    """Fit a PBDP to a model and print the fit as JSON.

    Examples:

        pbdpkit fit --model '{"model": "bernoulli", "n": 10, "p": 0.1}'

        pbdpkit fit --model '{"model": "runs", "n": 100, "k": 2, "p": 0.3}' --out fit.json
    """
    config, level = _setup(kwargs)
    _run(lambda: write_json(run_fit(config, log_level=level), config.out))


@cli.command()
@click.option(
    "--from",
    "source",
    type=click.Choice(["model", "fit"]),
    default="model",
    help="Sample the model itself or its fitted PBDP",
)
@experiment_options
def sample(source: str, **kwargs: Any) -> None:
    """Draw configurations and write them as JSON lines.

    Examples:

        pbdpkit sample --model '{"model": "runs", "n": 20, "k": 2, "p": 0.4}' --seed 7

        pbdpkit sample --config config.yaml --from fit --n-samples 50 --out fit.jsonl
    """
    config, level = _setup(kwargs)

    def action() -> None:
        patterns = run_sample(config, source=source, log_level=level)  # type: ignore[arg-type]
        write_jsonl((p.to_json() for p in patterns), config.out)

    _run(action)


@cli.command()
@experiment_options
def d2(**kwargs: Any) -> None:
    """Estimate d2 between a model (or its fit) and a PBDP; CSV rows per method.

    Examples:

        pbdpkit d2 --model '{"model": "bernoulli", "n": 3, "p": 0.2}' --seed 1

        pbdpkit d2 --config config.yaml --n-samples 800 --out d2.csv
    """
    config, level = _setup(kwargs)

    def action() -> None:
        rows = run_d2(config, log_level=level)
        write_csv([row.to_row() for row in rows], config.out, fieldnames=D2_COLUMNS)

    _run(action)


@cli.command()
@click.option(
    "--suite",
    "suites",
    multiple=True,
    help="Invariant suite to run (repeatable): chain, stein, palm, bounds",
)
@experiment_options
def verify(suites: tuple[str, ...], **kwargs: Any) -> None:
    """Run invariant suites and write one CSV row per check.

    Exits 0 only if every selected check passes.

    Examples:

        pbdpkit verify --seed 42 --suite chain

        pbdpkit verify --seed 42 --suite palm --model '{"model": "bernoulli", "n": 8, "p": 0.2}'
    """
    config, level = _setup(kwargs)
    passed = False

    def action() -> None:
        nonlocal passed
        results = run_verify(config, list(suites) or None, log_level=level)
        write_csv(results, config.out, fieldnames=VERIFY_COLUMNS)
        passed = all(r["success"] for r in results)

    _run(action)
    sys.exit(0 if passed else 1)


@cli.command()
@experiment_options
def sweep(**kwargs: Any) -> None:
    """Evaluate metrics over a parameter grid; long-form CSV plus plot data.

    The grid comes from the 'sweep:' section of the configuration file. With
    --out, the plot data goes to <out>.plot.csv.

    Examples:

        pbdpkit sweep --config config.yaml --out sweep.csv
    """
    config, level = _setup(kwargs)

    def action() -> None:
        rows = run_sweep(config, log_level=level)
        write_csv(rows, config.out, fieldnames=SWEEP_COLUMNS)
        if config.out is not None:
            write_plot_data(plot_points(rows), plot_path(config.out))

    _run(action)


if __name__ == "__main__":
    cli()
