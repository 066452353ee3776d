"""Profile curves and angle paths.

A profile curve gamma(s) = (f1, f2, f3, f4) has exactly two nonzero
components, placed in the slots the surface family rotates (its planar
pattern).  Both curves and paths are built from :class:`SmoothFunction`
objects that carry exact first and second derivatives; constructors check
them against central differences so a typo in a derivative can't slip
through.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.polynomial import polyval

from .exceptions import DomainError
from .models import ProfilePattern, SurfaceFamily

logger = logging.getLogger(__name__)

# Self-consistency check of derivative evaluators.
_CONSISTENCY_RTOL = 1e-6
_FD_STEP_D1 = 1e-5
_FD_STEP_D2 = 1e-4

Jet = Tuple[float, float, float]


@dataclass(frozen=True)
class SmoothFunction:
    """Real function of one variable with exact first and second derivatives.

    The evaluators take floats or numpy arrays.
    """
    label: str
    value: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]

    def jet(self, x: float) -> Jet:
        return float(self.value(x)), float(self.d1(x)), float(self.d2(x))

    def consistency_error(self, x: float) -> float:
        """Largest relative disagreement between d1/d2 and central differences at x."""
        f0, f1, f2 = self.jet(x)
        h1, h2 = _FD_STEP_D1, _FD_STEP_D2
        fd1 = (self.value(x + h1) - self.value(x - h1)) / (2 * h1)
        fd2 = (self.value(x + h2) - 2 * f0 + self.value(x - h2)) / (h2 * h2)
        scale = max(1.0, abs(f0), abs(f1), abs(f2))
        return max(abs(fd1 - f1), abs(fd2 - f2)) / scale


def polynomial(coefficients: Sequence[float], label: str = "") -> SmoothFunction:
    """Polynomial with coefficients in increasing degree."""
    p = Polynomial(list(coefficients) or [0.0])
    c0, c1, c2 = p.coef, p.deriv(1).coef, p.deriv(2).coef
    return SmoothFunction(
        label=label or f"poly{list(p.coef)}",
        value=lambda x: polyval(x, c0),
        d1=lambda x: polyval(x, c1),
        d2=lambda x: polyval(x, c2),
    )


def constant(c: float) -> SmoothFunction:
    return polynomial([c], label=f"const({c})")


def scaled_sinh(scale: float = 1.0) -> SmoothFunction:
    return SmoothFunction(
        label=f"{scale}*sinh",
        value=lambda x: scale * np.sinh(x),
        d1=lambda x: scale * np.cosh(x),
        d2=lambda x: scale * np.sinh(x),
    )


def scaled_cosh(scale: float = 1.0) -> SmoothFunction:
    return SmoothFunction(
        label=f"{scale}*cosh",
        value=lambda x: scale * np.cosh(x),
        d1=lambda x: scale * np.sinh(x),
        d2=lambda x: scale * np.cosh(x),
    )


def scaled_cos(scale: float = 1.0) -> SmoothFunction:
    return SmoothFunction(
        label=f"{scale}*cos",
        value=lambda x: scale * np.cos(x),
        d1=lambda x: -scale * np.sin(x),
        d2=lambda x: -scale * np.cos(x),
    )


def scaled_sin(scale: float = 1.0) -> SmoothFunction:
    return SmoothFunction(
        label=f"{scale}*sin",
        value=lambda x: scale * np.sin(x),
        d1=lambda x: scale * np.cos(x),
        d2=lambda x: -scale * np.sin(x),
    )


def _consistency_samples(domain: Tuple[float, float]) -> Iterable[float]:
    lo, hi = max(domain[0], -1.0), min(domain[1], 1.0)
    if hi <= lo:
        # domain lies outside the unit window
        lo, hi = domain[0], min(domain[1], domain[0] + 2.0)
    return np.linspace(lo, hi, 7)[1:-1]


def _check_consistency(fn: SmoothFunction, domain: Tuple[float, float]) -> None:
    for x in _consistency_samples(domain):
        err = fn.consistency_error(float(x))
        if not err <= _CONSISTENCY_RTOL:
            raise ValueError(
                f"derivatives of {fn.label} disagree with finite differences at {x:.6g} (rel {err:.2e})"
            )


@dataclass(frozen=True)
class ProfileCurve:
    """Planar generating curve of a surface family.

    ``first`` is the radius function of the family's first rotation angle,
    ``second`` that of the second angle; the pattern decides which slots
    of (f1, f2, f3, f4) they occupy.  The other two slots are exactly zero.
    """
    family: SurfaceFamily
    first: SmoothFunction
    second: SmoothFunction
    pattern: ProfilePattern = ProfilePattern.PRIMARY
    domain: Tuple[float, float] = (-math.inf, math.inf)
    name: str = "custom"

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise DomainError(f"empty profile domain {self.domain}")
        _check_consistency(self.first, self.domain)
        _check_consistency(self.second, self.domain)

    @property
    def slots(self) -> Tuple[int, int]:
        return self.family.active_slots(self.pattern)

    def check_domain(self, s: float) -> None:
        lo, hi = self.domain
        if not lo <= s <= hi:
            raise DomainError(f"s={s!r} outside profile domain [{lo}, {hi}]")

    def _component(self, i: int, s: float, order: int) -> float:
        if i not in (1, 2, 3, 4):
            raise ValueError(f"component index must be 1..4, got {i}")
        first_slot, second_slot = self.slots
        if i - 1 == first_slot:
            return self.first.jet(s)[order]
        if i - 1 == second_slot:
            return self.second.jet(s)[order]
        return 0.0

    def value(self, i: int, s: float) -> float:
        return self._component(i, s, 0)

    def d1(self, i: int, s: float) -> float:
        return self._component(i, s, 1)

    def d2(self, i: int, s: float) -> float:
        return self._component(i, s, 2)

    def jets(self, s: float) -> Tuple[Jet, Jet]:
        """(f, f', f'') of the first and second radius functions."""
        return self.first.jet(s), self.second.jet(s)

    def vectors(self, s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """gamma(s), gamma'(s), gamma''(s) as 4-vectors."""
        self.check_domain(s)
        out = np.zeros((3, 4))
        for slot, fn in zip(self.slots, (self.first, self.second)):
            out[:, slot] = fn.jet(s)
        return out[0], out[1], out[2]

    def point(self, s: float) -> np.ndarray:
        return self.vectors(s)[0]


class ProfileKind(str, Enum):
    HYPERBOLIC = "hyperbolic"            # (sinh, cosh)
    HYPERBOLIC_DUAL = "hyperbolic_dual"  # (cosh, sinh)
    CIRCULAR = "circular"                # (cos, sin)
    CONSTANT = "constant"                # (c_a, c_b)
    POLYNOMIAL = "polynomial"            # user coefficients


def build_profile(
    family: SurfaceFamily,
    kind: ProfileKind,
    pattern: ProfilePattern = ProfilePattern.PRIMARY,
    scale: float = 1.0,
    first: Sequence[float] = (),
    second: Sequence[float] = (),
    domain: Tuple[float, float] = (-math.inf, math.inf),
) -> ProfileCurve:
    """Catalog profile for a family.

    Args:
        family: Surface family the profile generates
        kind: Catalog entry
        pattern: Primary or alternate planar pattern
        scale: Amplitude of the hyperbolic/circular entries
        first: Coefficients of the first radius (constant/polynomial)
        second: Coefficients of the second radius (constant/polynomial)
        domain: Closed interval of admissible s

    Returns:
        ProfileCurve with exact derivative evaluators
    """
    kind = ProfileKind(kind)
    if kind == ProfileKind.HYPERBOLIC:
        pair = scaled_sinh(scale), scaled_cosh(scale)
    elif kind == ProfileKind.HYPERBOLIC_DUAL:
        pair = scaled_cosh(scale), scaled_sinh(scale)
    elif kind == ProfileKind.CIRCULAR:
        pair = scaled_cos(scale), scaled_sin(scale)
    elif kind == ProfileKind.CONSTANT:
        if len(first) != 1 or len(second) != 1:
            raise ValueError("constant profile needs exactly one value per radius")
        pair = constant(first[0]), constant(second[0])
    else:
        if not first or not second:
            raise ValueError("polynomial profile needs coefficients for both radii")
        pair = polynomial(first), polynomial(second)

    logger.debug(f"Building {kind.value} profile for {SurfaceFamily(family).value} ({ProfilePattern(pattern).value})")
    return ProfileCurve(
        family=SurfaceFamily(family),
        first=pair[0],
        second=pair[1],
        pattern=ProfilePattern(pattern),
        domain=(float(domain[0]), float(domain[1])),
        name=kind.value,
    )


@dataclass(frozen=True)
class AnglePath:
    """Rotation angles as functions of the curve parameter t."""
    a: SmoothFunction
    b: SmoothFunction
    domain: Tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        _check_consistency(self.a, self.domain)
        _check_consistency(self.b, self.domain)

    def check_domain(self, t: float) -> None:
        lo, hi = self.domain
        if not lo <= t <= hi:
            raise DomainError(f"t={t!r} outside path domain [{lo}, {hi}]")

    def angles(self, t: float) -> Tuple[float, float]:
        self.check_domain(t)
        return float(self.a.value(t)), float(self.b.value(t))

    def jets(self, t: float) -> Tuple[Jet, Jet]:
        self.check_domain(t)
        return self.a.jet(t), self.b.jet(t)


def polynomial_path(a_coefficients: Sequence[float], b_coefficients: Sequence[float]) -> AnglePath:
    return AnglePath(a=polynomial(a_coefficients), b=polynomial(b_coefficients))


def linear_path(rate_a: float, rate_b: float, offset_a: float = 0.0, offset_b: float = 0.0) -> AnglePath:
    return polynomial_path([offset_a, rate_a], [offset_b, rate_b])
