"""Public API for pbdpkit.

This module is the programmatic surface behind the CLI: each ``run_*`` function
takes an ExperimentConfig and returns plain results that the CLI serializes.
"""

import logging
from typing import Any, Literal, TypedDict

import numpy as np

from pbdpkit.bounds import assemble_theorem_bound, bound_shape
from pbdpkit.carrier import PartitionScheme, PointPattern
from pbdpkit.checks import CheckResult, SuiteContext, SuiteRegistry
from pbdpkit.config.schema import ExperimentConfig
from pbdpkit.distance import (
    ENUMERATION_MAX_CAP,
    ENUMERATION_MAX_SITES,
    ConfigurationLaw,
    D2Estimate,
    coupling_bound,
    empirical_d2,
    enumerate_pbdp,
    exact_d2_small,
    model_law,
)
from pbdpkit.fitting import FitResult, fit_model, poisson_fit
from pbdpkit.models import PointProcessModel, build_model
from pbdpkit.pbdp import PbdpSpec, sample_pbdp
from pbdpkit.utils.logging import is_logging_configured, setup_logging
from pbdpkit.utils.rng import make_rng, spawn_streams

logger = logging.getLogger(__name__)

SampleSource = Literal["model", "fit"]


class SweepRow(TypedDict):
    """One metric at one grid point of a sweep."""

    parameter: str
    value: float
    metric: str
    estimate: float | None
    stderr: float | None
    seed: int | None
    reps: int
    error: str


def _ensure_logging(log_level: int) -> None:
    if not is_logging_configured():
        setup_logging(level=log_level)


def _banner(title: str) -> None:
    logger.info("=" * 70)
    logger.info(title)
    logger.info("=" * 70)


def load_model(config: ExperimentConfig) -> PointProcessModel:
    """Build the configured target model."""
    model = build_model(config.require_model())
    logger.info(f"Model: {model.describe()}")
    return model


def partition_for(config: ExperimentConfig, model: PointProcessModel) -> PartitionScheme | None:
    """The partition override of the configuration, or None for the model default."""
    if config.partition is None:
        return None
    return PartitionScheme.from_blocks(model.space, model.sites, config.partition)


def run_fit(config: ExperimentConfig, log_level: int = logging.INFO) -> dict[str, Any]:
    """Fit a PBDP to the configured model.

    Returns:
        The FitResult as a dict, with the model description under "model"

    Raises:
        FitRejectedError: If the underdispersed fit gives a negative beta
    """
    _ensure_logging(log_level)
    _banner(f"Fitting: {config.name}")
    model = load_model(config)
    result = fit_model(model)
    return {"name": config.name, "model": model.describe(), **result.to_dict()}


def run_sample(
    config: ExperimentConfig, source: SampleSource = "model", log_level: int = logging.INFO
) -> list[PointPattern]:
    """Draw ``config.n_samples`` configurations from the model or from its fitted PBDP."""
    _ensure_logging(log_level)
    seed = config.require_seed()
    _banner(f"Sampling {config.n_samples} configurations from the {source}: {config.name}")
    logger.info(f"Seed: {seed}")
    model = load_model(config)
    rng = make_rng(seed)
    if source == "fit":
        spec = fit_model(model).spec
        return [sample_pbdp(spec, stream) for stream in spawn_streams(rng, config.n_samples)]
    return [model.sample(stream) for stream in spawn_streams(rng, config.n_samples)]


def _right_side(config: ExperimentConfig, model: PointProcessModel) -> PbdpSpec:
    against = config.d2.against
    if against == "fit":
        return fit_model(model).spec
    if against == "poisson":
        return poisson_fit(model).spec
    if config.pbdp is None:
        raise ValueError("d2 against='pbdp' needs a 'pbdp:' section")
    spec = config.pbdp.build()
    if spec.space != model.space:
        raise ValueError(
            f"Incompatible carrier spaces: model on {model.space.kind}, pbdp on {spec.space.kind}"
        )
    return spec


def pbdp_law(spec: PbdpSpec) -> ConfigurationLaw:
    """Enumerated PBDP law with the smallest count cap that leaves a negligible tail.

    Raises:
        ValueError: If nu has too many atoms or no cap up to ENUMERATION_MAX_CAP suffices
    """
    if len(spec.nu.atoms) > ENUMERATION_MAX_SITES:
        raise ValueError(f"nu has more than {ENUMERATION_MAX_SITES} atoms")
    last_error: ValueError | None = None
    for cap in range(ENUMERATION_MAX_CAP + 1):
        try:
            return enumerate_pbdp(spec, cap)
        except ValueError as e:
            last_error = e
    raise ValueError(f"PBDP count law too spread to enumerate: {last_error}")


def run_d2(config: ExperimentConfig, log_level: int = logging.INFO) -> list[D2Estimate]:
    """Estimate d2 between the left and right sides of the d2 section.

    Rows: the empirical estimate, an exact-enumeration value when both laws are
    small enough, and the coupling bound when both sides are PBDPs.
    """
    _ensure_logging(log_level)
    seed = config.require_seed()
    options = config.d2
    _banner(f"d2 ({options.left} vs {options.against}): {config.name}")
    logger.info(f"Seed: {seed}")
    model = load_model(config)
    right = _right_side(config, model)
    left = fit_model(model).spec if options.left == "fit" else None

    left_rng = make_rng(seed)
    # A side compared with itself reuses the same stream, so the estimate is exactly 0.
    right_rng = make_rng(seed) if left is not None and left == right else left_rng.spawn(1)[0]

    def sample_left(rng: np.random.Generator) -> PointPattern:
        return sample_pbdp(left, rng) if left is not None else model.sample(rng)

    def sample_right(rng: np.random.Generator) -> PointPattern:
        return sample_pbdp(right, rng)

    rows = [
        empirical_d2(
            model.space,
            sample_left,
            sample_right,
            config.n_samples,
            left_rng,
            rng2=right_rng,
            n_bootstrap=options.n_bootstrap,
            seed=seed,
        )
    ]

    if options.exact:
        try:
            left_law = pbdp_law(left) if left is not None else model_law(model)
            rows.append(exact_d2_small(model.space, left_law, pbdp_law(right)))
        except ValueError as e:
            logger.info(f"Skipping exact enumeration: {e}")

    if options.coupling and left is not None:
        rows.append(
            D2Estimate(
                value=min(coupling_bound(left, right), 1.0),
                stderr=0.0,
                n_samples=0,
                method="coupling-bound",
            )
        )

    for row in rows:
        logger.info(f"{row.method}: {row.value:.6g} +- {row.stderr:.3g}")
    return rows


def run_verify(
    config: ExperimentConfig,
    suites: list[str] | None = None,
    log_level: int = logging.INFO,
) -> list[CheckResult]:
    """Run invariant suites; the configured model, if any, feeds the model-level suites."""
    _ensure_logging(log_level)
    seed = config.require_seed()
    names = suites or config.verify.suites
    factories = [SuiteRegistry.get(name) for name in names]
    _banner(f"Verifying suites {', '.join(names)}: {config.name}")
    logger.info(f"Seed: {seed}, reps: {config.reps}")

    model = build_model(config.model) if config.model is not None else None
    results: list[CheckResult] = []
    for factory, stream in zip(factories, spawn_streams(make_rng(seed), len(names)), strict=True):
        context = SuiteContext(
            rng=stream, reps=config.reps, sigmas=config.verify.sigmas, model=model, u=config.u
        )
        results.extend(check.run() for check in factory(context))

    failed = [r for r in results if not r["success"]]
    logger.info("=" * 70)
    if failed:
        logger.error(f"{len(failed)} of {len(results)} checks failed")
        for r in failed:
            logger.error(
                f"  {r['suite']}/{r['check_name']}: observed {r['observed']:.6g}, "
                f"required {r['required']:.6g} {r['detail']}"
            )
    else:
        logger.info(f"All {len(results)} checks passed")
    logger.info("=" * 70)
    return results


def _grid_config(config: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    model = config.require_model()
    data = model.model_dump()
    if parameter not in data:
        raise ValueError(f"Model '{model.model}' has no parameter '{parameter}'")
    data[parameter] = value
    return config.with_overrides(model=data)


def _metric(
    metric: str,
    model: PointProcessModel,
    fit: FitResult,
    config: ExperimentConfig,
    rng: np.random.Generator,
) -> tuple[float, float]:
    if metric == "b":
        return fit.params.b, 0.0
    if metric == "beta":
        return fit.params.beta, 0.0
    if metric == "bound_shape":
        return bound_shape(model, fit, partition_for(config, model)), 0.0
    if metric == "bound":
        report = assemble_theorem_bound(
            model, fit, partition_for(config, model), config.u, config.reps, rng
        )
        return report.total(), report.stderr
    spec = fit.spec if metric == "d2" else poisson_fit(model).spec
    estimate = empirical_d2(
        model.space,
        model.sample,
        lambda g: sample_pbdp(spec, g),
        config.n_samples,
        rng,
        n_bootstrap=config.d2.n_bootstrap,
    )
    return estimate.value, estimate.stderr


def run_sweep(config: ExperimentConfig, log_level: int = logging.INFO) -> list[SweepRow]:
    """Evaluate the sweep metrics at every grid value of one model parameter.

    A failing grid point or metric is recorded in the row's error column and the
    sweep continues.
    """
    _ensure_logging(log_level)
    if config.sweep is None:
        raise ValueError("No sweep section in the configuration")
    sweep = config.sweep
    seed = config.require_seed()
    _banner(f"Sweeping {sweep.parameter} over {len(sweep.values)} values: {config.name}")
    logger.info(f"Seed: {seed}")

    rows: list[SweepRow] = []
    grid_streams = spawn_streams(make_rng(seed), len(sweep.values))
    for value, grid_stream in zip(sweep.values, grid_streams, strict=True):
        metric_streams = spawn_streams(grid_stream, len(sweep.metrics))
        try:
            point = _grid_config(config, sweep.parameter, value)
            model = build_model(point.require_model())
            fit = fit_model(model)
        except Exception as e:
            logger.error(f"{sweep.parameter}={value}: {e}", exc_info=True)
            rows.extend(
                _row(sweep.parameter, value, m, None, None, seed, config.reps, str(e))
                for m in sweep.metrics
            )
            continue
        for metric, stream in zip(sweep.metrics, metric_streams, strict=True):
            try:
                estimate, stderr = _metric(metric, model, fit, point, stream)
                rows.append(
                    _row(sweep.parameter, value, metric, estimate, stderr, seed, config.reps)
                )
                logger.info(f"{sweep.parameter}={value} {metric}={estimate:.6g} +- {stderr:.3g}")
            except Exception as e:
                logger.error(f"{sweep.parameter}={value} {metric}: {e}", exc_info=True)
                rows.append(
                    _row(sweep.parameter, value, metric, None, None, seed, config.reps, str(e))
                )
    return rows


def _row(
    parameter: str,
    value: float,
    metric: str,
    estimate: float | None,
    stderr: float | None,
    seed: int | None,
    reps: int,
    error: str = "",
) -> SweepRow:
    return SweepRow(
        parameter=parameter,
        value=value,
        metric=metric,
        estimate=estimate,
        stderr=stderr,
        seed=seed,
        reps=reps,
        error=error,
    )


def plot_points(rows: list[SweepRow]) -> list[dict[str, Any]]:
    """(metric, x, y, stderr) triples of the successful sweep rows."""
    return [
        {"metric": r["metric"], "x": r["value"], "y": r["estimate"], "stderr": r["stderr"]}
        for r in rows
        if r["estimate"] is not None
    ]
