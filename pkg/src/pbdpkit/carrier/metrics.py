"""The d1 configuration metric, Wasserstein-1 between measures, and the shuffle map."""

import logging

import numpy as np
from scipy.stats import wasserstein_distance

from pbdpkit.carrier.solvers import solve_assignment, solve_transport
from pbdpkit.carrier.spaces import (
    CarrierSpace,
    DiscreteMeasure,
    PartitionScheme,
    PointPattern,
    UnitInterval,
)

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-9
CROSS_CHECK_MAX_ATOMS = 500
CROSS_CHECK_TOL = 1e-9


def d1(space: CarrierSpace, xi: PointPattern, eta: PointPattern) -> float:
    """Average-matching distance between two configurations.

    0 when both are empty, 1 when the sizes differ, otherwise the optimal matching
    cost under d0 divided by the common size. On the unit interval the optimal
    matching pairs points in sorted order.
    """
    if xi.size != eta.size:
        return 1.0
    if xi.size == 0:
        return 0.0
    left, right = xi.as_array(), eta.as_array()
    space.check(left)
    space.check(right)
    if isinstance(space, UnitInterval):
        # Patterns are stored sorted.
        return float(np.mean(np.abs(left - right)))
    return solve_assignment(space.pairwise(left, right), tie_break=False).cost / xi.size


def w1_measures(space: CarrierSpace, rho1: DiscreteMeasure, rho2: DiscreteMeasure) -> float:
    """Wasserstein-1 between two probability measures under d0.

    Raises:
        ValueError: If either measure does not have total mass 1 within 1e-9
    """
    for name, rho in (("rho1", rho1), ("rho2", rho2)):
        if abs(rho.total - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"{name} must be a probability measure, total mass is {rho.total!r}")
    space.check(rho1.points)
    space.check(rho2.points)

    if isinstance(space, UnitInterval):
        value = float(
            wasserstein_distance(rho1.points, rho2.points, rho1.weights, rho2.weights)
        )
        if max(len(rho1.atoms), len(rho2.atoms)) <= CROSS_CHECK_MAX_ATOMS:
            solved = _transport_value(space, rho1, rho2)
            if abs(solved - value) > CROSS_CHECK_TOL:
                logger.warning(
                    f"W1 closed form {value!r} disagrees with transport solver {solved!r}"
                )
        return value
    return _transport_value(space, rho1, rho2)


def _transport_value(space: CarrierSpace, rho1: DiscreteMeasure, rho2: DiscreteMeasure) -> float:
    cost = space.pairwise(rho1.points, rho2.points)
    return solve_transport(rho1.weights, rho2.weights, cost).cost


def shuffle(scheme: PartitionScheme, xi: PointPattern) -> PointPattern:
    """Move every point to the center of its partition cell.

    Raises:
        ValueError: If a point is not one of the scheme's sites
    """
    centers = [scheme.cells[scheme.cell_of(point)].center for point in xi.points]
    return PointPattern(points=tuple(centers))
