"""Invariant suites run by ``pbdpkit verify``."""

from pbdpkit.checks.base import Check, CheckResult, SuiteContext
from pbdpkit.checks.registry import SuiteRegistry, register_builtin_suites

__all__ = ["Check", "CheckResult", "SuiteContext", "SuiteRegistry", "register_builtin_suites"]
