"""Exception types shared across the package."""

from __future__ import annotations


class WorldWeightsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(WorldWeightsError):
    """Invalid definition file, model parameters, or run configuration."""


class DomainError(WorldWeightsError):
    """A mathematically invalid request: zero denominators, values outside a
    formula's validity domain, queries with no support, and the like."""


class UnconvergedError(WorldWeightsError):
    """Adaptive quadrature exhausted its refinement budget.

    Carries the last two log-domain estimates so callers can judge how far
    apart the refinements still were.
    """

    def __init__(self, message: str, estimates: tuple[float, float] | None = None):
        super().__init__(message)
        self.estimates = estimates
