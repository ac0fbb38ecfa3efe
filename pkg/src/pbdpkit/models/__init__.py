"""Locally dependent point processes approximated by PBDPs."""

from typing import TYPE_CHECKING

from pbdpkit.models.base import ExactLaw, MomentSummary, PointProcessModel
from pbdpkit.models.bernoulli import BernoulliModel
from pbdpkit.models.compound_poisson import CompoundPoissonModel
from pbdpkit.models.runs import RunsModel

if TYPE_CHECKING:
    from pbdpkit.config.schema import BernoulliConfig, CompoundPoissonConfig, RunsConfig


def build_model(
    config: "BernoulliConfig | RunsConfig | CompoundPoissonConfig",
) -> PointProcessModel:
    """Instantiate the model a configuration section describes."""
    if config.model == "bernoulli":
        return BernoulliModel(config.probabilities)
    if config.model == "runs":
        return RunsModel(
            n=config.n,
            k=config.k,
            p=config.p,
            moment_reps=config.moment_reps,
            moment_seed=config.moment_seed,
        )
    if config.model == "cp":
        return CompoundPoissonModel(config.space.build(), config.measures())
    raise ValueError(f"Unknown model: {config.model!r}")


__all__ = [
    "BernoulliModel",
    "CompoundPoissonModel",
    "ExactLaw",
    "MomentSummary",
    "PointProcessModel",
    "RunsModel",
    "build_model",
]
