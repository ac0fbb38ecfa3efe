"""Polynomial birth-death point processes and their particle system.

A PBDP places Z points independently according to a probability measure nu,
where Z follows the stationary law of the (a, b, beta) birth-death chain. The
same law is the equilibrium of a spatial particle system: new particles arrive
at rate a + b n and each of the n particles dies at rate 1 + beta (n - 1). The
system is simulated event by event, with every particle carrying an integer tag
so that coupled copies can follow individual particles.
"""

import json
import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, NamedTuple

import numpy as np

from pbdpkit.carrier import CarrierSpace, DiscreteMeasure, PointPattern, d1
from pbdpkit.chain import (
    BirthDeathParams,
    CountDistribution,
    rates,
    stationary,
    survival_bound,
)
from pbdpkit.utils.logging import TRACE
from pbdpkit.utils.rng import mean_stderr, spawn_streams

logger = logging.getLogger(__name__)

NU_TOTAL_TOL = 1e-12

EventKind = Literal["immigration", "birth", "natural-death", "kill"]
PatternFunction = Callable[[PointPattern], float]


@dataclass(frozen=True)
class PbdpSpec:
    """A polynomial birth-death point process on a carrier space.

    Attributes:
        params: Chain rates (a, b, beta)
        nu: Placement distribution, total mass 1
        space: Carrier space holding the atoms of nu
    """

    params: BirthDeathParams
    nu: DiscreteMeasure
    space: CarrierSpace

    def __post_init__(self) -> None:
        if abs(self.nu.total - 1.0) > NU_TOTAL_TOL:
            raise ValueError(f"nu must have total mass 1, got {self.nu.total!r}")
        self.space.check(self.nu.points)

    @cached_property
    def distribution(self) -> CountDistribution:
        return stationary(self.params)

    @cached_property
    def _nu_cumulative(self) -> np.ndarray:
        return np.cumsum(self.nu.weights)

    def draw_locations(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` independent points from nu."""
        cumulative = self._nu_cumulative
        idx = np.searchsorted(cumulative, rng.random(count) * cumulative[-1], side="right")
        return self.nu.points[np.minimum(idx, cumulative.size - 1)]


class Event(NamedTuple):
    """One jump of the particle system."""

    time: float
    kind: EventKind
    point: float
    tag: int


class SurvivalPoint(NamedTuple):
    """Surviving initial fraction at time t with its bound."""

    t: float
    estimate: float
    stderr: float
    bound: float


@dataclass(frozen=True)
class SystemTrajectory:
    """A replayable path of the particle system on [0, horizon].

    Initial particles carry tags 0..n-1 in the order of ``initial.points``; new
    particles get the next unused tag.
    """

    initial: PointPattern
    horizon: float
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        times = [event.time for event in self.events]
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:], strict=False)):
            raise ValueError("Trajectory event times must be strictly increasing")
        if times and not 0.0 < times[0] <= times[-1] <= self.horizon:
            raise ValueError("Trajectory events must lie in (0, horizon]")

    def replay(self) -> Iterator[tuple[float, PointPattern]]:
        """Yield (time, configuration) at time 0 and after every event."""
        alive = dict(enumerate(self.initial.points))
        yield 0.0, self.initial
        for event in self.events:
            if event.kind in ("immigration", "birth"):
                alive[event.tag] = event.point
            else:
                if event.tag not in alive:
                    raise ValueError(f"Event removes unknown particle {event.tag}")
                del alive[event.tag]
            yield event.time, PointPattern(points=tuple(alive.values()))

    def sizes(self) -> tuple[np.ndarray, np.ndarray]:
        """Jump times (starting at 0) and the size held from each of them."""
        steps = np.array(
            [+1 if e.kind in ("immigration", "birth") else -1 for e in self.events], dtype=int
        )
        sizes = self.initial.size + np.concatenate(([0], np.cumsum(steps)))
        times = np.concatenate(([0.0], [e.time for e in self.events]))
        return times, sizes

    def to_jsonl(self) -> str:
        header = json.dumps({"initial": list(self.initial.points), "horizon": self.horizon})
        lines = [header]
        lines.extend(json.dumps(event._asdict()) for event in self.events)
        return "\n".join(lines) + "\n"


class _Particles:
    """Tagged particle set with O(1) uniform removal."""

    def __init__(self, points: Sequence[float]) -> None:
        self.points = [float(p) for p in points]
        self.tags = list(range(len(self.points)))
        self.next_tag = len(self.points)

    @property
    def size(self) -> int:
        return len(self.points)

    def add(self, point: float) -> int:
        tag = self.next_tag
        self.next_tag += 1
        self.points.append(float(point))
        self.tags.append(tag)
        return tag

    def remove_at(self, index: int) -> tuple[int, float]:
        tag, point = self.tags[index], self.points[index]
        self.tags[index], self.points[index] = self.tags[-1], self.points[-1]
        self.tags.pop()
        self.points.pop()
        return tag, point

    def pattern(self) -> PointPattern:
        return PointPattern(points=tuple(self.points))


def _wait(params: BirthDeathParams, n: int, rng: np.random.Generator) -> float:
    alpha, death = rates(params, n)
    return float(rng.exponential(1.0 / (alpha + death)))


def _jump(spec: PbdpSpec, particles: _Particles, rng: np.random.Generator, time: float) -> Event:
    params = spec.params
    n = particles.size
    alpha, death = rates(params, n)
    u = rng.random() * (alpha + death)
    if u < alpha:
        kind: EventKind = "immigration" if u < params.a else "birth"
        point = float(spec.draw_locations(1, rng)[0])
        tag = particles.add(point)
        return Event(time=time, kind=kind, point=point, tag=tag)
    kind = "natural-death" if u < alpha + n else "kill"
    tag, point = particles.remove_at(int(rng.integers(n)))
    return Event(time=time, kind=kind, point=point, tag=tag)


def sample_counts(dist: CountDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized inverse-CDF draws from a count law."""
    idx = np.searchsorted(dist.cumulative, rng.random(size), side="right")
    return np.minimum(idx, dist.max_count)


def sample_count(dist: CountDistribution, rng: np.random.Generator) -> int:
    """One inverse-CDF draw from a count law."""
    return int(sample_counts(dist, 1, rng)[0])


def sample_pbdp(spec: PbdpSpec, rng: np.random.Generator) -> PointPattern:
    """Draw Z from the stationary law, then Z independent points from nu."""
    count = sample_count(spec.distribution, rng)
    return PointPattern(points=tuple(spec.draw_locations(count, rng)))


def simulate_system(
    spec: PbdpSpec,
    initial: PointPattern,
    horizon: float,
    rng: np.random.Generator,
) -> SystemTrajectory:
    """Event-driven simulation of the particle system from ``initial`` up to ``horizon``.

    In state n the holding time is Exp(alpha_n + beta_n). A jump is an arrival with
    probability alpha_n / (alpha_n + beta_n), split into immigration (rate a) and
    birth (rate b n); otherwise a uniformly chosen particle is removed, labelled a
    natural death (rate n) or a kill (rate beta n (n - 1)).
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    spec.space.check(initial.points)

    tracing = logger.isEnabledFor(TRACE)
    particles = _Particles(initial.points)
    events: list[Event] = []
    time = 0.0
    while True:
        time += _wait(spec.params, particles.size, rng)
        if time > horizon:
            break
        event = _jump(spec, particles, rng, time)
        events.append(event)
        if tracing:
            logger.log(TRACE, f"{event.kind} at t={event.time:.6f}, size={particles.size}")

    logger.debug(f"Simulated {len(events)} events up to t={horizon}")
    return SystemTrajectory(initial=initial, horizon=horizon, events=tuple(events))


def occupation_distribution(trajectory: SystemTrajectory) -> CountDistribution:
    """Fraction of [0, horizon] the system spends at each size."""
    times, sizes = trajectory.sizes()
    durations = np.diff(np.concatenate((times, [trajectory.horizon])))
    occupation = np.bincount(sizes, weights=durations, minlength=int(sizes.max()) + 1)
    return CountDistribution(probs=occupation / trajectory.horizon)


class D1Distance:
    """Test function xi -> d1(xi, reference); 1-Lipschitz with respect to d1."""

    def __init__(self, space: CarrierSpace, reference: PointPattern) -> None:
        self.space = space
        self.reference = reference

    def __call__(self, pattern: PointPattern) -> float:
        return d1(self.space, pattern, self.reference)

    def __repr__(self) -> str:
        return f"D1Distance(reference={self.reference.points})"


def _coupled_difference(
    spec: PbdpSpec,
    eta: PointPattern,
    x: float,
    y: float,
    f: PatternFunction,
    rng: np.random.Generator,
) -> float:
    particles = _Particles(eta.points + (x,))
    distinguished = particles.tags[-1]
    terms: list[float] = []
    while True:
        pattern_x = particles.pattern()
        pattern_y = pattern_x.remove(x).add(y)
        dt = _wait(spec.params, particles.size, rng)
        terms.append((f(pattern_x) - f(pattern_y)) * dt)
        event = _jump(spec, particles, rng, 0.0)
        if event.tag == distinguished and event.kind in ("natural-death", "kill"):
            # Both copies coincide from here on.
            break
    return -math.fsum(terms)


def estimate_first_difference(
    spec: PbdpSpec,
    eta: PointPattern,
    x: float,
    y: float,
    f: PatternFunction,
    reps: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo estimate of h_f(eta + delta_x) - h_f(eta + delta_y).

    The system is started from eta + delta_x with the particle at x tagged; the
    y-copy is the same path with that particle sitting at y. Until the tagged
    particle dies the difference f(Z_x(t)) - f(Z_y(t)) is integrated; afterwards
    the two copies agree. Since h_f(xi) = -int (E f(Z_xi(t)) - pi(f)) dt, each
    replicate contributes minus that integral.

    Returns:
        (mean, standard error) over ``reps`` independent replicates
    """
    if reps < 1:
        raise ValueError(f"reps must be positive, got {reps}")
    spec.space.check((x, y))
    values = [
        _coupled_difference(spec, eta, x, y, f, stream) for stream in spawn_streams(rng, reps)
    ]
    return mean_stderr(values)


def survival_ratio_curve(
    spec: PbdpSpec,
    eta: PointPattern,
    times: Sequence[float],
    reps: int,
    rng: np.random.Generator,
) -> list[SurvivalPoint]:
    """Estimate E[|eta ∩ Z_eta(t)| / |Z_eta(t)|] (0/0 read as 0) on a time grid.

    Each point carries the bound min{(1 + a(e^t - 1)/(2|eta|))^-1, e^{-(a ^ b) t}}.
    """
    if eta.size < 1:
        raise ValueError("survival_ratio_curve needs a nonempty initial pattern")
    if any(t < 0 for t in times):
        raise ValueError("Survival times must be nonnegative")

    order = sorted(range(len(times)), key=lambda i: times[i])
    samples = np.zeros((reps, len(times)))
    for r, stream in enumerate(spawn_streams(rng, reps)):
        particles = _Particles(eta.points)
        initial_alive = eta.size
        clock = _wait(spec.params, particles.size, stream)
        for i in order:
            while clock <= times[i]:
                event = _jump(spec, particles, stream, clock)
                if event.kind in ("natural-death", "kill") and event.tag < eta.size:
                    initial_alive -= 1
                clock += _wait(spec.params, particles.size, stream)
            samples[r, i] = initial_alive / particles.size if particles.size else 0.0

    curve = []
    for i, t in enumerate(times):
        estimate, stderr = mean_stderr(samples[:, i])
        curve.append(
            SurvivalPoint(
                t=float(t),
                estimate=estimate,
                stderr=stderr,
                bound=survival_bound(spec.params, eta.size, float(t)),
            )
        )
    return curve


def simulate_size_passage(
    params: BirthDeathParams, start: int, target: int, rng: np.random.Generator
) -> float:
    """Time for the size process to first move from ``start`` to ``target``."""
    if start < 0 or target < 0:
        raise ValueError("Sizes must be nonnegative")
    n = start
    elapsed = 0.0
    while n != target:
        alpha, death = rates(params, n)
        total = alpha + death
        elapsed += float(rng.exponential(1.0 / total))
        n += 1 if rng.random() * total < alpha else -1
    return elapsed


def simulate_initial_deaths(
    params: BirthDeathParams,
    m: int,
    direction: Literal["up", "down"],
    rng: np.random.Generator,
) -> int:
    """Count initial particles dead before the size first reaches m+1 (up) or m-1 (down).

    The system starts from m initial particles. Victims are uniform, so only the
    number of surviving initial particles has to be tracked.
    """
    if m < 0 or (direction == "down" and m < 1):
        raise ValueError(f"Invalid start size {m} for direction {direction!r}")
    target = m + 1 if direction == "up" else m - 1
    n = m
    initial_alive = m
    while n != target:
        alpha, death = rates(params, n)
        if rng.random() * (alpha + death) < alpha:
            n += 1
        else:
            if rng.random() * n < initial_alive:
                initial_alive -= 1
            n -= 1
    return m - initial_alive
