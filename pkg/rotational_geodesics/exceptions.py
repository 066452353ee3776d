"""Exception hierarchy for rotational_geodesics.

Everything the library raises on purpose derives from :class:`GeometryError`
so callers (the CLI in particular) can separate geometric failures from
programming errors.
"""

from typing import Optional, Tuple


class GeometryError(Exception):
    """Base class for all library errors."""


class NonFiniteComponent(GeometryError, ValueError):
    """A NaN or infinite value reached a vector constructor."""


class NonPositiveRadius(GeometryError, ValueError):
    """Space-form radius must be strictly positive."""


class InvalidCoefficients(GeometryError, ValueError):
    """Killing weights must be finite and non-negative."""


class DomainError(GeometryError, ValueError):
    """Parameter outside the profile (or path) domain."""


class PatternMismatch(GeometryError, ValueError):
    """Operation is only defined for a family's primary planar pattern."""


class DegenerateFrame(GeometryError):
    """A normal-frame denominator vanished (null tangent direction)."""


class DegenerateMetric(GeometryError):
    """A metric coefficient or the first fundamental form determinant vanished."""


class DecompositionOutOfRange(GeometryError):
    """The family's angle chart cannot represent the velocity components.

    The Clairaut products do not depend on the chart, so they travel with
    the exception.
    """

    def __init__(self, message: str, products: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.products = products


class ImaginarySlope(GeometryError):
    """Quadrature radicand is negative (turning point or forbidden region)."""

    def __init__(self, message: str, radicand: float):
        super().__init__(message)
        self.radicand = radicand


class ConfigError(GeometryError):
    """Run configuration could not be parsed or validated."""


class NormalizationWarning(UserWarning):
    """The arclength normalization eps_t C^2 = -1 changes the induced geometry."""
