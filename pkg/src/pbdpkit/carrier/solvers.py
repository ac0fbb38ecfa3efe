"""Exact optimal-assignment and transportation solvers.

Assignments go through scipy's ``linear_sum_assignment``; transportation problems
through POT's network simplex (``ot.emd``), which also returns the dual potentials.
"""

import logging
import math
from typing import NamedTuple

import numpy as np
import ot
from scipy.optimize import linear_sum_assignment

logger = logging.getLogger(__name__)

TIE_BREAK_MAX_SIZE = 12
MASS_TOL = 1e-9
EMD_MAX_ITER = 10_000_000


class Assignment(NamedTuple):
    """Optimal assignment: row i goes to column permutation[i]."""

    permutation: tuple[int, ...]
    cost: float


class TransportPlan(NamedTuple):
    """Optimal transportation plan with its cost and dual potentials."""

    plan: np.ndarray
    cost: float
    u: np.ndarray
    v: np.ndarray


def _checked_square(cost: np.ndarray) -> np.ndarray:
    matrix = np.asarray(cost, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Assignment needs a square cost matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Assignment cost matrix has non-finite entries")
    return matrix


def _optimal_cost(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(matrix)
    return math.fsum(matrix[rows, cols])


def _lexicographic_refinement(matrix: np.ndarray, optimum: float) -> tuple[int, ...]:
    # Fix rows in order, each to the smallest column that still allows the optimum.
    n = matrix.shape[0]
    atol = 1e-10 * max(1.0, abs(optimum))
    free_cols = list(range(n))
    chosen: list[int] = []
    spent = 0.0
    for row in range(n):
        rest_rows = list(range(row + 1, n))
        for col in free_cols:
            remaining = [c for c in free_cols if c != col]
            sub = matrix[np.ix_(rest_rows, remaining)]
            if spent + matrix[row, col] + _optimal_cost(sub) <= optimum + atol:
                chosen.append(col)
                spent += matrix[row, col]
                free_cols = remaining
                break
    return tuple(chosen)


def solve_assignment(cost: np.ndarray, tie_break: bool | None = None) -> Assignment:
    """Globally optimal assignment for a square cost matrix.

    Args:
        cost: Square matrix with finite entries
        tie_break: Return the lexicographically smallest optimal permutation.
            Defaults to on for matrices up to TIE_BREAK_MAX_SIZE rows.

    Returns:
        Assignment with the permutation and its total cost

    Raises:
        ValueError: If the matrix is not square or has non-finite entries
    """
    matrix = _checked_square(cost)
    n = matrix.shape[0]
    if n == 0:
        return Assignment(permutation=(), cost=0.0)

    rows, cols = linear_sum_assignment(matrix)
    permutation = tuple(int(c) for c in cols[np.argsort(rows)])
    if tie_break is None:
        tie_break = n <= TIE_BREAK_MAX_SIZE
    if tie_break:
        permutation = _lexicographic_refinement(matrix, math.fsum(matrix[rows, cols]))

    total = math.fsum(matrix[i, j] for i, j in enumerate(permutation))
    return Assignment(permutation=permutation, cost=total)


def solve_transport(supply: np.ndarray, demand: np.ndarray, cost: np.ndarray) -> TransportPlan:
    """Optimal transportation plan between two nonnegative mass vectors.

    Args:
        supply: Source masses
        demand: Sink masses, with the same total as ``supply`` within 1e-9
        cost: len(supply) x len(demand) matrix of finite costs

    Returns:
        TransportPlan whose row and column sums reproduce supply and demand

    Raises:
        ValueError: On negative masses, shape mismatch, non-finite costs or unequal totals
    """
    a = np.ascontiguousarray(supply, dtype=float)
    b = np.ascontiguousarray(demand, dtype=float)
    matrix = np.ascontiguousarray(cost, dtype=float)
    if matrix.shape != (a.size, b.size):
        raise ValueError(f"Cost matrix shape {matrix.shape} does not match ({a.size}, {b.size})")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("Supply and demand must be nonnegative")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Transportation costs must be finite")

    total_a, total_b = math.fsum(a), math.fsum(b)
    if abs(total_a - total_b) > MASS_TOL:
        raise ValueError(f"Mass mismatch: supply {total_a!r} vs demand {total_b!r}")
    if total_a == 0.0:
        return TransportPlan(
            plan=np.zeros_like(matrix), cost=0.0, u=np.zeros(a.size), v=np.zeros(b.size)
        )

    # The simplex wants identical totals; move the sub-tolerance discrepancy onto b.
    b = b * (total_a / total_b)
    plan, log = ot.emd(a, b, matrix, numItermax=EMD_MAX_ITER, log=True)
    if log.get("warning"):
        logger.warning(f"Network simplex warning: {log['warning']}")
    value = math.fsum((plan * matrix).ravel())
    return TransportPlan(
        plan=np.asarray(plan), cost=value, u=np.asarray(log["u"]), v=np.asarray(log["v"])
    )
