"""Experiment configuration."""

from pbdpkit.config.schema import (
    BernoulliConfig,
    CompoundPoissonConfig,
    D2Config,
    ExperimentConfig,
    ModelConfig,
    PbdpConfig,
    RunsConfig,
    SpaceConfig,
    SweepConfig,
    VerifyConfig,
)

__all__ = [
    "BernoulliConfig",
    "CompoundPoissonConfig",
    "D2Config",
    "ExperimentConfig",
    "ModelConfig",
    "PbdpConfig",
    "RunsConfig",
    "SpaceConfig",
    "SweepConfig",
    "VerifyConfig",
]
