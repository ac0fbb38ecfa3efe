"""Suite registry for the verify command.

Maps suite names ('chain', 'stein', 'palm', 'bounds') to factories that build
the suite's checks from a SuiteContext.
"""

import logging
from collections.abc import Callable

from pbdpkit.checks.base import Check, SuiteContext

logger = logging.getLogger(__name__)

SuiteFactory = Callable[[SuiteContext], list[Check]]


class SuiteRegistry:
    """Registry of invariant suites.

    Example:
        >>> SuiteRegistry.register("custom", build_custom_suite)
        >>> checks = SuiteRegistry.get("custom")(context)
        >>> SuiteRegistry.list_types()
        ['bounds', 'chain', 'custom', 'palm', 'stein']
    """

    _suites: dict[str, SuiteFactory] = {}

    @classmethod
    def register(cls, suite: str, factory: SuiteFactory) -> None:
        """Register a suite factory, replacing any previous one of the same name."""
        if suite in cls._suites:
            logger.warning(f"Suite '{suite}' is already registered. Overwriting.")

        cls._suites[suite] = factory
        logger.debug(f"Registered suite: {suite}")

    @classmethod
    def get(cls, suite: str) -> SuiteFactory:
        """Get a suite factory by name.

        Raises:
            ValueError: If the suite is not registered
        """
        if suite not in cls._suites:
            available = ", ".join(cls.list_types())
            raise ValueError(f"Unknown suite: '{suite}'. Available suites: {available}")

        return cls._suites[suite]

    @classmethod
    def list_types(cls) -> list[str]:
        return sorted(cls._suites.keys())

    @classmethod
    def is_registered(cls, suite: str) -> bool:
        return suite in cls._suites

    @classmethod
    def clear(cls) -> None:
        """Clear all registered suites (for tests)."""
        cls._suites.clear()
        logger.debug("Cleared all registered suites")


def register_builtin_suites() -> None:
    """Register the chain, stein, palm and bounds suites."""
    from pbdpkit.checks import bounds, chain, palm, stein

    SuiteRegistry.register("chain", chain.build_suite)
    SuiteRegistry.register("stein", stein.build_suite)
    SuiteRegistry.register("palm", palm.build_suite)
    SuiteRegistry.register("bounds", bounds.build_suite)


register_builtin_suites()
