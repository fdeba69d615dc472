"""Federated learning over LEO satellite constellations."""

from ._satfl import (
    DomainError,
    LinkUnavailable,
    ValidationError,
    compare,
    contact_plan,
    decide_mode,
    load_scenario,
    normalize_scenario,
    orbital_period,
    path_loss,
    run,
)

__all__ = [
    "DomainError",
    "LinkUnavailable",
    "ValidationError",
    "compare",
    "contact_plan",
    "decide_mode",
    "load_scenario",
    "normalize_scenario",
    "orbital_period",
    "path_loss",
    "run",
]
