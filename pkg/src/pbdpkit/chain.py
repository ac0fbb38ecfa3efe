"""Scalar birth-death chain numerics.

The chain behind a polynomial birth-death point process has birth rates
``alpha_k = a + b k`` and death rates ``beta_k = k + beta k (k - 1)``. This module
computes its stationary law, expected hitting times, the expected number of
initial particles that die before the size moves up or down, and the Stein-factor
bounds derived from them.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, TypedDict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

MAX_STATES = 1_000_000
DEFAULT_TOL = 1e-14
MIN_PROBABILITY = 1e-300
DEFAULT_HORIZON_CAP = 1 << 20


class TruncationError(RuntimeError):
    """Raised when the stationary law needs more than the hard cap of states."""


class BirthDeathParams(BaseModel):
    """Rate parameters (a, b, beta) of the birth-death chain.

    Attributes:
        a: Immigration rate, events per unit time
        b: Per-particle birth rate, in [0, 1)
        beta: Per-ordered-pair kill rate
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    a: float = Field(..., gt=0.0, description="Immigration rate")
    b: float = Field(default=0.0, ge=0.0, lt=1.0, description="Per-particle birth rate")
    beta: float = Field(default=0.0, ge=0.0, description="Per-ordered-pair kill rate")

    def birth_rate(self, k: int) -> float:
        """alpha_k = a + b k."""
        return self.a + self.b * k

    def death_rate(self, k: int) -> float:
        """beta_k = k + beta k (k - 1)."""
        return k + self.beta * k * (k - 1)


@dataclass(frozen=True)
class CountDistribution:
    """Truncated stationary law over 0..K.

    Attributes:
        probs: Probabilities indexed by count, normalized to sum to one
        tail_bound: Guaranteed upper bound on the mass beyond K before normalization
    """

    probs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("CountDistribution needs a nonempty 1-D probability vector")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("CountDistribution probabilities must be finite and nonnegative")
        if self.tail_bound < 0:
            raise ValueError(f"tail_bound must be nonnegative, got {self.tail_bound}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, k: int) -> "CountDistribution":
        """Law concentrated on a single count."""
        probs = np.zeros(k + 1)
        probs[k] = 1.0
        return cls(probs=probs)

    @property
    def max_count(self) -> int:
        return int(self.probs.size - 1)

    @property
    def support_size(self) -> int:
        return int(self.probs.size)

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @cached_property
    def _survival(self) -> np.ndarray:
        # Accumulate from the right so tiny tail sums keep their relative precision.
        return np.cumsum(self.probs[::-1])[::-1]

    def pmf(self, k: int) -> float:
        if k < 0 or k > self.max_count:
            return 0.0
        return float(self.probs[k])

    def cdf(self, k: int) -> float:
        """F(k) = sum_{i <= k} pi_i."""
        if k < 0:
            return 0.0
        return float(self.cumulative[min(k, self.max_count)])

    def survival(self, k: int) -> float:
        """F-bar(k) = sum_{i >= k} pi_i over the stored support."""
        if k <= 0:
            return float(self._survival[0])
        if k > self.max_count:
            return 0.0
        return float(self._survival[k])

    def mean(self) -> float:
        return float(math.fsum(np.arange(self.probs.size) * self.probs))

    def variance(self) -> float:
        ks = np.arange(self.probs.size, dtype=float)
        mean = self.mean()
        return float(math.fsum(((ks - mean) ** 2) * self.probs))


class BoundViolation(TypedDict):
    """One failed inequality from a chain-level check.

    Attributes:
        m: Index at which the inequality was evaluated
        branch: Which inequality failed
        observed: Left-hand side
        bound: Right-hand side it should not exceed (or fall below)
    """

    m: int
    branch: str
    observed: float
    bound: float


def rates(params: BirthDeathParams, k: int) -> tuple[float, float]:
    """Return (alpha_k, beta_k) for state ``k``.

    Raises:
        ValueError: If k is negative
    """
    if k < 0:
        raise ValueError(f"State must be nonnegative, got {k}")
    return params.birth_rate(k), params.death_rate(k)


def _log_add(log_x: float, log_y: float) -> float:
    if log_x < log_y:
        log_x, log_y = log_y, log_x
    return log_x + math.log1p(math.exp(log_y - log_x))


def _tail_ratio(params: BirthDeathParams, k: int) -> float:
    # sup_{j >= k} alpha_j / beta_{j+1}: (a + bj)/(j + 1) is monotone towards b,
    # and the extra factor 1/(1 + beta j) only shrinks it.
    lead = max((params.a + params.b * k) / (k + 1), params.b)
    return lead / (1.0 + params.beta * k)


def stationary(
    params: BirthDeathParams,
    tol: float = DEFAULT_TOL,
    max_states: int = MAX_STATES,
) -> CountDistribution:
    """Stationary law of the chain by detailed balance.

    Weights follow w_{k+1} = w_k alpha_k / beta_{k+1}. The support is searched in log space,
    extended until every later ratio is bounded by some r < 1 and the geometric
    tail w_K r / (1 - r) drops below ``tol`` times the accumulated mass.

    Args:
        params: Chain rates
        tol: Relative tail tolerance, in (0, 1)
        max_states: Hard cap on the support size

    Returns:
        Normalized CountDistribution with tail_bound <= tol

    Raises:
        ValueError: If tol is outside (0, 1)
        TruncationError: If the support would exceed ``max_states``
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")

    log_tol = math.log(tol)
    log_weights = [0.0]
    ratios: list[float] = []
    log_mass = 0.0
    k = 0
    while True:
        alpha, _ = rates(params, k)
        _, death_next = rates(params, k + 1)
        ratios.append(alpha / death_next)
        log_weights.append(log_weights[-1] + math.log(alpha) - math.log(death_next))
        log_mass = _log_add(log_mass, log_weights[-1])
        k += 1

        ratio = _tail_ratio(params, k)
        if ratio < 1.0:
            log_tail = log_weights[-1] + math.log(ratio) - math.log1p(-ratio)
            if log_tail < log_tol + log_mass:
                break
        if k >= max_states:
            raise TruncationError(
                f"Stationary law of {params!r} did not converge within {max_states} states"
            )

    weights = _weights_from_mode(ratios, int(np.argmax(log_weights)))
    probs = weights / math.fsum(weights)
    tail_bound = math.exp(log_tail - log_mass)
    logger.debug(f"Stationary law for {params!r}: K={k}, tail_bound={tail_bound:.3e}")
    return CountDistribution(probs=probs, tail_bound=tail_bound)


def _weights_from_mode(ratios: list[float], mode: int) -> np.ndarray:
    """Unnormalized weights with w_mode = 1 and w_{k+1} = w_k ratios[k].

    Neighbouring weights differ by a single rounding, so detailed balance holds to
    a few ulps however long the support is.
    """
    weights = np.empty(len(ratios) + 1)
    weights[mode] = 1.0
    for k in range(mode, len(ratios)):
        weights[k + 1] = weights[k] * ratios[k]
    for k in range(mode - 1, -1, -1):
        weights[k] = weights[k + 1] / ratios[k]
    return weights


def tv_distance(p: CountDistribution, q: CountDistribution) -> float:
    """Total variation between two count laws, inflated by both tail bounds."""
    size = max(p.support_size, q.support_size)
    pp = np.zeros(size)
    qq = np.zeros(size)
    pp[: p.support_size] = p.probs
    qq[: q.support_size] = q.probs
    value = 0.5 * math.fsum(np.abs(pp - qq)) + 0.5 * (p.tail_bound + q.tail_bound)
    return min(1.0, value)


def _checked_mass(dist: CountDistribution, k: int) -> float:
    mass = dist.pmf(k)
    if mass < MIN_PROBABILITY:
        raise ValueError(f"State {k} is outside the support of the stationary law")
    return mass


def hitting_up(params: BirthDeathParams, dist: CountDistribution, k: int) -> float:
    """Expected time to go from k to k+1: F(k) / (alpha_k pi_k)."""
    mass = _checked_mass(dist, k)
    alpha, _ = rates(params, k)
    return dist.cdf(k) / (alpha * mass)


def hitting_down(params: BirthDeathParams, dist: CountDistribution, k: int) -> float:
    """Expected time to go from k to k-1: F-bar(k) / (beta_k pi_k).

    The tail bound is added to F-bar(k), so the value is an upper estimate.
    """
    if k < 1:
        raise ValueError(f"Downward hitting time needs k >= 1, got {k}")
    mass = _checked_mass(dist, k)
    _, death = rates(params, k)
    return (dist.survival(k) + dist.tail_bound) / (death * mass)


def ratio_chain_violations(
    params: BirthDeathParams,
    dist: CountDistribution,
    rtol: float = 1e-12,
) -> list[BoundViolation]:
    """Check F(k)/F(k-1) >= alpha_k/beta_k >= F-bar(k+1)/F-bar(k) on the support.

    Both inequalities are compared in cross-multiplied form.
    """
    violations: list[BoundViolation] = []
    for k in range(1, dist.max_count):
        if dist.pmf(k) < MIN_PROBABILITY:
            break
        alpha, death = rates(params, k)

        lhs, rhs = dist.cdf(k) * death, alpha * dist.cdf(k - 1)
        if lhs < rhs - rtol * max(lhs, rhs):
            violations.append(BoundViolation(m=k, branch="cdf", observed=rhs, bound=lhs))

        lhs, rhs = alpha * dist.survival(k), death * dist.survival(k + 1)
        if lhs < rhs - rtol * max(lhs, rhs):
            violations.append(BoundViolation(m=k, branch="survival", observed=rhs, bound=lhs))
    return violations


def k_plus(params: BirthDeathParams, m: int) -> float:
    """Expected number of initial particles dead before the size first reaches m+1.

    Forward recursion from E K_0^+ = 0.
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    value = 0.0
    for j in range(1, m + 1):
        alpha, death = rates(params, j)
        carried = death * (1.0 + value)
        value = j * carried / (j * alpha + carried)
    return value


def _k_minus_backward(params: BirthDeathParams, m: int, horizon: int, seed: float) -> float:
    value = seed
    for j in range(horizon - 1, m - 1, -1):
        alpha, death = rates(params, j)
        value = 1.0 + (j - 1) * alpha * value / (alpha * value + (j + 1) * death)
    return value


def k_minus(
    params: BirthDeathParams,
    m: int,
    horizon: int,
    tol: float | None = None,
    max_horizon: int = DEFAULT_HORIZON_CAP,
) -> tuple[float, float]:
    """Bracket the expected number of initial particles dead before the size drops to m-1.

    The backward recursion is run from the two extreme seeds E K_M^- = 1 and
    E K_M^- = M at index M = ``horizon``. The recursion is increasing in its seed,
    so the two results bracket the true value. With ``tol`` set, the horizon is
    doubled until the bracket is narrower than ``tol``.

    Returns:
        (low, high) with 1 <= low <= high <= m

    Raises:
        ValueError: If m < 1 or horizon <= m, or if the bracket is still wider
            than ``tol`` at ``max_horizon``
    """
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    if horizon <= m:
        raise ValueError(f"horizon must exceed m, got horizon={horizon}, m={m}")

    while True:
        low = _k_minus_backward(params, m, horizon, 1.0)
        high = _k_minus_backward(params, m, horizon, float(horizon))
        if tol is None or high - low <= tol:
            return low, high
        if horizon >= max_horizon:
            raise ValueError(
                f"k_minus bracket for m={m} is {high - low:.3e} wide at horizon {horizon}"
            )
        horizon = min(2 * horizon, max_horizon)


def stein_c_bound(params: BirthDeathParams, n: int) -> float:
    """Bound on the first-difference Stein factor C_n.

    min{1, 1/(2(n+1)) + 1/a, 1/((a ^ b)(n+1))}; the last term is infinite when b = 0.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    middle = 1.0 / (2 * (n + 1)) + 1.0 / params.a
    smallest_rate = min(params.a, params.b)
    last = 1.0 / (smallest_rate * (n + 1)) if smallest_rate > 0 else math.inf
    return min(1.0, middle, last)


def stein_c_integral_bound(params: BirthDeathParams, n: int) -> float:
    """Integral form (ln(n+1) - ln(a/2)) / (n+1 - a/2) behind the C_n bound.

    Never larger than 1/(2(n+1)) + 1/a; equals 1/(n+1) when a = 2(n+1).
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    x = n + 1.0
    y = params.a / 2.0
    if math.isclose(x, y, rel_tol=1e-12):
        return 1.0 / x
    return (math.log(x) - math.log(y)) / (x - y)


def stein_d2_bound(params: BirthDeathParams, n: int) -> float:
    """Bound 2/(n+1) + 5/a on the second-difference Stein factor."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return 2.0 / (n + 1) + 5.0 / params.a


def survival_bound(params: BirthDeathParams, n: int, t: float) -> float:
    """Bound on the expected surviving fraction of n initial particles at time t."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    first = 1.0 / (1.0 + params.a * math.expm1(t) / (2 * n))
    second = math.exp(-min(params.a, params.b) * t)
    return min(first, second)


def xia_bounds_check(
    params: BirthDeathParams,
    m_max: int,
    rtol: float = 1e-12,
    bracket_tol: float = 1e-10,
) -> list[BoundViolation]:
    """Check the initial-death-count inequalities for every m <= m_max.

    Upper branch (alpha_m > beta_m): 1 + E K_m^+ <= alpha_m / (alpha_m - beta_m).
    Lower branch (beta_m > alpha_m, m >= 1): E K_m^- <= beta_m / (beta_m - alpha_m),
    tested on the lower end of a narrow bracket so only certain violations count.
    States with alpha_m = beta_m are skipped.

    Returns:
        List of violations, empty when every inequality holds
    """
    violations: list[BoundViolation] = []
    branch: Literal["upper", "lower"]
    for m in range(0, m_max + 1):
        alpha, death = rates(params, m)
        if alpha > death:
            branch = "upper"
            observed = 1.0 + k_plus(params, m)
            bound = alpha / (alpha - death)
        elif death > alpha and m >= 1:
            branch = "lower"
            observed, _ = k_minus(params, m, horizon=m + 64, tol=bracket_tol)
            bound = death / (death - alpha)
        else:
            continue
        if observed > bound * (1.0 + rtol):
            violations.append(BoundViolation(m=m, branch=branch, observed=observed, bound=bound))

    if violations:
        logger.warning(f"{len(violations)} initial-death-count violations for {params!r}")
    return violations
