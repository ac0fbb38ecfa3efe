"""Configuration schema for pbdpkit experiments using Pydantic models.

An experiment names a target model, optionally an explicit PBDP, the seed and
sample sizes, and per-command sections for d2 estimation, verification suites and
parameter sweeps. Files may be YAML or JSON.
"""

from pathlib import Path
from typing import Annotated, Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from pbdpkit.carrier import (
    CarrierSpace,
    Circle,
    DiscreteMeasure,
    FiniteSites,
    UnitInterval,
)
from pbdpkit.chain import BirthDeathParams
from pbdpkit.pbdp import PbdpSpec
from pbdpkit.utils.rng import MAX_SEED

Atom = tuple[float, float]


class SpaceConfig(BaseModel):
    """Carrier space selection.

    Attributes:
        kind: interval, circle or sites
        distances: Site distance matrix (for kind='sites')
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["interval", "circle", "sites"] = Field(
        default="interval", description="Carrier space kind"
    )
    distances: list[list[float]] | None = Field(
        default=None, description="Distance matrix for a finite site space"
    )

    @model_validator(mode="after")
    def validate_distances(self) -> "SpaceConfig":
        """Distances are required for site spaces and meaningless otherwise."""
        if self.kind == "sites" and not self.distances:
            raise ValueError("A 'sites' space needs a distance matrix")
        if self.kind != "sites" and self.distances is not None:
            raise ValueError(f"A '{self.kind}' space takes no distance matrix")
        return self

    def build(self) -> CarrierSpace:
        if self.kind == "interval":
            return UnitInterval()
        if self.kind == "circle":
            return Circle()
        return FiniteSites(distances=self.distances)  # type: ignore[arg-type]


class BernoulliConfig(BaseModel):
    """Independent Bernoulli trials at sites i/n of [0, 1].

    Attributes:
        n: Number of sites; may be omitted when p is a list
        p: One probability for every site, or one per site
    """

    model_config = ConfigDict(extra="forbid")

    model: Literal["bernoulli"] = "bernoulli"
    n: int | None = Field(default=None, ge=1, description="Number of sites")
    p: float | list[float] = Field(..., description="Success probability (or one per site)")

    @model_validator(mode="after")
    def validate_sizes(self) -> "BernoulliConfig":
        """Resolve n from p and check the probabilities."""
        probs = self.p if isinstance(self.p, list) else [self.p]
        if any(not 0.0 <= q <= 1.0 for q in probs):
            raise ValueError("Bernoulli probabilities must lie in [0, 1]")
        if isinstance(self.p, list):
            if not self.p:
                raise ValueError("Bernoulli probability list must be nonempty")
            if self.n is None:
                self.n = len(self.p)
            elif self.n != len(self.p):
                raise ValueError(f"n={self.n} does not match {len(self.p)} probabilities")
        elif self.n is None:
            raise ValueError("n is required when p is a single probability")
        return self

    @property
    def probabilities(self) -> list[float]:
        if isinstance(self.p, list):
            return list(self.p)
        return [self.p] * (self.n or 0)


class RunsConfig(BaseModel):
    """k-runs on a circle of n trials.

    Attributes:
        n: Number of trials
        k: Run length
        p: Trial success probability
        moment_reps: Samples for the simulated third moment
        moment_seed: Seed for that simulation
    """

    model_config = ConfigDict(extra="forbid")

    model: Literal["runs"] = "runs"
    n: int = Field(..., ge=4, description="Number of trials")
    k: int = Field(..., ge=2, description="Run length")
    p: float = Field(..., ge=0.0, le=1.0, description="Trial success probability")
    moment_reps: int = Field(default=20_000, ge=2, description="Third-moment samples")
    moment_seed: int = Field(default=0, ge=0, le=MAX_SEED, description="Third-moment seed")

    @model_validator(mode="after")
    def validate_length(self) -> "RunsConfig":
        if self.n < 2 * self.k:
            raise ValueError(f"Runs model needs n >= 2k, got n={self.n}, k={self.k}")
        return self


class CompoundPoissonConfig(BaseModel):
    """Compound Poisson process with discrete cluster intensities.

    Attributes:
        space: Carrier space of the atoms
        mus: ``mus[i - 1]`` lists the [point, weight] atoms of mu_i
        mu1_scale: Factor applied to mu_1 (intensity sweeps)
    """

    model_config = ConfigDict(extra="forbid")

    model: Literal["cp"] = "cp"
    space: SpaceConfig = Field(default_factory=SpaceConfig, description="Carrier space")
    mus: list[list[Atom]] = Field(..., min_length=1, description="Cluster intensities")
    mu1_scale: float = Field(default=1.0, gt=0.0, description="Scale factor for mu_1")

    def measures(self) -> list[DiscreteMeasure]:
        measures = [DiscreteMeasure(atoms=tuple(atoms)) for atoms in self.mus]
        measures[0] = measures[0].scaled(self.mu1_scale)
        return measures


ModelConfig = Annotated[
    BernoulliConfig | RunsConfig | CompoundPoissonConfig, Field(discriminator="model")
]


class PbdpConfig(BaseModel):
    """An explicit polynomial birth-death point process.

    Attributes:
        a: Immigration rate
        b: Per-particle birth rate
        beta: Per-pair kill rate
        nu: Placement distribution as [point, weight] atoms
        space: Carrier space
    """

    model_config = ConfigDict(extra="forbid")

    a: float = Field(..., gt=0.0)
    b: float = Field(default=0.0, ge=0.0, lt=1.0)
    beta: float = Field(default=0.0, ge=0.0)
    nu: list[Atom] = Field(..., min_length=1, description="Placement distribution")
    space: SpaceConfig = Field(default_factory=SpaceConfig, description="Carrier space")

    def build(self) -> PbdpSpec:
        return PbdpSpec(
            params=BirthDeathParams(a=self.a, b=self.b, beta=self.beta),
            nu=DiscreteMeasure(atoms=tuple(self.nu)),
            space=self.space.build(),
        )


class D2Config(BaseModel):
    """Options of the d2 command.

    Attributes:
        left: Left-hand side, the model itself or its fitted PBDP
        against: Right-hand side: the fitted PBDP, the Poisson fit, or the explicit pbdp
        exact: Add an exact-enumeration row when both laws are enumerable
        coupling: Add the coupling-bound row when both sides are PBDPs
        n_bootstrap: Bootstrap resamples for the empirical standard error
    """

    model_config = ConfigDict(extra="forbid")

    left: Literal["model", "fit"] = Field(default="model")
    against: Literal["fit", "poisson", "pbdp"] = Field(default="fit")
    exact: bool = Field(default=True)
    coupling: bool = Field(default=True)
    n_bootstrap: int = Field(default=200, ge=2)


class VerifyConfig(BaseModel):
    """Options of the verify command.

    Attributes:
        suites: Invariant suites to run
        sigmas: Monte Carlo tolerance in standard errors
    """

    model_config = ConfigDict(extra="forbid")

    suites: list[str] = Field(
        default_factory=lambda: ["chain", "stein", "palm", "bounds"], min_length=1
    )
    sigmas: float = Field(default=3.0, gt=0.0)


class SweepConfig(BaseModel):
    """A one-parameter grid over the model configuration.

    Attributes:
        parameter: Model field to vary (n, p, k, mu1_scale, ...)
        values: Grid values
        metrics: Columns computed at every grid point
    """

    model_config = ConfigDict(extra="forbid")

    parameter: str = Field(..., min_length=1)
    values: list[float] = Field(..., min_length=1)
    metrics: list[Literal["d2", "d2_poisson", "bound_shape", "bound", "b", "beta"]] = Field(
        default_factory=lambda: ["d2", "bound_shape"], min_length=1
    )


class ExperimentConfig(BaseModel):
    """Root configuration of a pbdpkit run.

    Attributes:
        name: Experiment name, echoed into outputs
        model: Target point process
        pbdp: Explicit PBDP (for d2 against='pbdp')
        seed: Master seed, unsigned 64-bit
        reps: Monte Carlo replicates
        n_samples: Configurations drawn per side for empirical d2
        u: Smoothing parameter of the error bounds
        partition: Block sizes of a contiguous partition overriding the default
        out: Output path
        d2: d2 command options
        verify: verify command options
        sweep: sweep command options
    """

    model_config = ConfigDict(extra="forbid")

    name: str = Field(default="experiment", min_length=1)
    model: ModelConfig | None = Field(default=None, description="Target model")
    pbdp: PbdpConfig | None = Field(default=None, description="Explicit PBDP")
    seed: int | None = Field(default=None, ge=0, le=MAX_SEED, description="Master seed")
    reps: int = Field(default=2_000, ge=1, description="Monte Carlo replicates")
    n_samples: int = Field(default=400, ge=2, description="Samples per side for d2")
    u: float = Field(default=2.0, gt=0.0, description="Bound smoothing parameter")
    partition: list[int] | None = Field(default=None, description="Partition block sizes")
    out: str | None = Field(default=None, description="Output path")
    d2: D2Config = Field(default_factory=D2Config)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    sweep: SweepConfig | None = Field(default=None)

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "ExperimentConfig":
        return cls.model_validate(data)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "ExperimentConfig":
        """Load configuration from a YAML (or JSON) file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            yaml.YAMLError: If the file does not parse
            pydantic.ValidationError: If the config doesn't match the schema
        """
        path_obj = Path(path)
        if not path_obj.exists():
            raise FileNotFoundError(f"Configuration file not found: {path}")

        with open(path_obj) as f:
            data = yaml.safe_load(f) or {}
        return cls.from_mapping(data)

    def to_yaml(self, path: str | Path) -> None:
        with open(Path(path), "w") as f:
            yaml.dump(
                self.model_dump(mode="json", exclude_none=True),
                f,
                default_flow_style=False,
                sort_keys=False,
            )

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with the non-None overrides applied and revalidated."""
        data = self.model_dump(mode="python")
        data.update({key: value for key, value in overrides.items() if value is not None})
        return self.from_mapping(data)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ValueError("This command is stochastic and needs a seed (--seed or 'seed:')")
        return self.seed

    def require_model(self) -> "BernoulliConfig | RunsConfig | CompoundPoissonConfig":
        if self.model is None:
            raise ValueError("No model given (--model or 'model:' in the config file)")
        return self.model
