"""Base class for invariant checks.

Checks are the numerical properties ``pbdpkit verify`` asserts: exact identities of
the chain, Monte Carlo comparisons at a tolerance of a few standard errors, and
oracle comparisons of the bounds. A check never raises: ``run()`` converts any
exception into a failed result carrying the error text.
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, TypedDict

import numpy as np

from pbdpkit.models import PointProcessModel

logger = logging.getLogger(__name__)

DEFAULT_SIGMAS = 3.0


class CheckResult(TypedDict):
    """Outcome of one invariant check.

    Attributes:
        check_name: Name of the check
        suite: Suite the check belongs to
        success: Whether the invariant held
        observed: Observed value (largest violation, z-score, estimate, ...)
        required: Value it is compared against
        detail: Human-readable explanation, or the error text on exceptions
        duration: Time taken in seconds
        timestamp: Unix timestamp when the check started
        metadata: Check-specific data (parameters, standard errors, ...)
    """

    check_name: str
    suite: str
    success: bool
    observed: float
    required: float
    detail: str
    duration: float
    timestamp: float
    metadata: dict[str, Any]


@dataclass
class SuiteContext:
    """Shared inputs of the suites in one verify run.

    Attributes:
        rng: Master stream; each check spawns its own children from it
        reps: Monte Carlo replicates per estimate
        sigmas: Tolerance of Monte Carlo comparisons, in standard errors
        model: Target model from the configuration, if any
        u: Smoothing parameter for the bound checks
    """

    rng: np.random.Generator
    reps: int = 2_000
    sigmas: float = DEFAULT_SIGMAS
    model: PointProcessModel | None = None
    u: float = 2.0


class Check(ABC):
    """Base class for all invariant checks.

    Attributes:
        name: Human-readable check name
        suite: Name of the owning suite
    """

    def __init__(self, name: str, suite: str) -> None:
        self.name = name
        self.suite = suite

    @abstractmethod
    def evaluate(self) -> CheckResult:
        """Compute the check and return its result.

        Raises:
            Any exception will be caught by run() and converted to a failed result
        """

    def result(
        self, success: bool, observed: float, required: float, detail: str = "", **metadata: Any
    ) -> CheckResult:
        """Build a result for this check; timing is filled in by run()."""
        return CheckResult(
            check_name=self.name,
            suite=self.suite,
            success=bool(success),
            observed=float(observed),
            required=float(required),
            detail=detail,
            duration=0.0,
            timestamp=0.0,
            metadata=metadata,
        )

    def run(self) -> CheckResult:
        """Run the check with timing and error handling."""
        start = time.time()
        try:
            result = self.evaluate()
            result["duration"] = time.time() - start
            result["timestamp"] = start
        except Exception as e:
            logger.debug(f"Check '{self.name}' raised exception: {e}", exc_info=True)
            result = CheckResult(
                check_name=self.name,
                suite=self.suite,
                success=False,
                observed=float("nan"),
                required=float("nan"),
                detail=f"{type(e).__name__}: {e}",
                duration=time.time() - start,
                timestamp=start,
                metadata={},
            )
        status = "passed" if result["success"] else "FAILED"
        logger.info(f"[{self.suite}] {self.name}: {status} ({result['duration']:.2f}s)")
        return result


def z_score(estimate: float, stderr: float, expected: float) -> float:
    """|estimate - expected| in units of stderr; 0 or inf when stderr is 0."""
    gap = abs(estimate - expected)
    if stderr > 0:
        return gap / stderr
    return 0.0 if gap <= 1e-12 * max(1.0, abs(expected)) else float("inf")
