"""Carrier spaces and the exact metrics defined on them."""

from pbdpkit.carrier.metrics import d1, shuffle, w1_measures
from pbdpkit.carrier.solvers import Assignment, TransportPlan, solve_assignment, solve_transport
from pbdpkit.carrier.spaces import (
    CarrierSpace,
    Cell,
    Circle,
    DiscreteMeasure,
    FiniteSites,
    PartitionScheme,
    PointPattern,
    UnitInterval,
    space_from_dict,
)

__all__ = [
    "Assignment",
    "CarrierSpace",
    "Cell",
    "Circle",
    "DiscreteMeasure",
    "FiniteSites",
    "PartitionScheme",
    "PointPattern",
    "TransportPlan",
    "UnitInterval",
    "d1",
    "shuffle",
    "solve_assignment",
    "solve_transport",
    "space_from_dict",
    "w1_measures",
]
