"""Diagonal induced metrics of the rotational 3-submanifolds.

On Upsilon^i(a, b, t) the induced metric is diag(eps_a A^2, eps_b B^2,
eps_t C^2) with A, B, C > 0 depending on t only; the signs live in the
eps's.  With the arclength normalization the t-coefficient is replaced by -1.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DegenerateMetric
from .linalg import inner
from .models import Generator, ProfilePattern, SurfaceFamily
from .profiles import ProfileCurve, SmoothFunction, constant
from .symmetry import generator_matrix

# Metric denominators below this are treated as degenerate.
DEGENERACY_TOLERANCE = 1e-10

TCoefficient = Callable[[float], Tuple[float, float]]


@dataclass(frozen=True)
class MetricCoefficients:
    """Metric coefficients and their t-derivatives at one value of t."""
    t: float
    A: float
    dA: float
    B: float
    dB: float
    C: float
    dC: float
    eps_a: int
    eps_b: int
    eps_t: int
    f_a: float
    f_b: float

    @property
    def g_aa(self) -> float:
        return self.eps_a * self.A * self.A

    @property
    def g_bb(self) -> float:
        return self.eps_b * self.B * self.B

    @property
    def g_tt(self) -> float:
        return self.eps_t * self.C * self.C


@dataclass(frozen=True)
class CoefficientArrays:
    """MetricCoefficients over an array of t.

    ``degenerate`` flags the entries where :meth:`DiagonalMetric3.at` would
    raise; their coefficients are not meaningful.
    """
    A: np.ndarray
    dA: np.ndarray
    B: np.ndarray
    dB: np.ndarray
    C: np.ndarray
    dC: np.ndarray
    eps_t: np.ndarray
    f_a: np.ndarray
    f_b: np.ndarray
    degenerate: np.ndarray
    eps_a: int
    eps_b: int

    @property
    def g_aa(self) -> np.ndarray:
        return self.eps_a * self.A * self.A

    @property
    def g_bb(self) -> np.ndarray:
        return self.eps_b * self.B * self.B

    @property
    def g_tt(self) -> np.ndarray:
        return self.eps_t * self.C * self.C

    @property
    def signs(self) -> np.ndarray:
        """(N, 3) signs of f_a, f_b and the t-coefficient, as DiagonalMetric3.signs reports them."""
        return np.stack([_sign_array(self.f_a), _sign_array(self.f_b), self.eps_t], axis=-1)


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def _sign_array(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, 1, -1)


def _evaluate(fn: Callable, t: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(t), dtype=float), t.shape)


class DiagonalMetric3:
    """diag(eps_a A(t)^2, eps_b B(t)^2, eps_t C(t)^2) with analytic t-derivatives.

    ``radius_a``/``radius_b`` are the signed radius functions (A = |f_a|).
    ``t_coefficient`` returns (eps_t C^2, d/dt eps_t C^2); when the metric is
    arclength-normalized it is only consulted for diagnostics.
    """

    def __init__(
        self,
        eps_a: int,
        eps_b: int,
        radius_a: SmoothFunction,
        radius_b: SmoothFunction,
        t_coefficient: Optional[TCoefficient] = None,
        arclength_normalized: bool = True,
        family: Optional[SurfaceFamily] = None,
        pattern: ProfilePattern = ProfilePattern.PRIMARY,
    ):
        if eps_a not in (1, -1) or eps_b not in (1, -1):
            raise ValueError("metric signs must be +1 or -1")
        if t_coefficient is None and not arclength_normalized:
            raise ValueError("a non-normalized metric needs a t-coefficient")
        self.eps_a = eps_a
        self.eps_b = eps_b
        self.radius_a = radius_a
        self.radius_b = radius_b
        self.t_coefficient = t_coefficient
        self.arclength_normalized = arclength_normalized
        self.family = family
        self.pattern = pattern

    @classmethod
    def constant(cls, eps_a: int, eps_b: int, A: float, B: float, eps_t: int = -1, C: float = 1.0):
        """Flat product metric with constant coefficients."""
        value = eps_t * C * C
        return cls(
            eps_a, eps_b, constant(A), constant(B),
            t_coefficient=lambda t: (value, 0.0),
            arclength_normalized=False,
        )

    def raw_t_coefficient(self, t: float) -> Optional[float]:
        """eps_t C^2 of the actual induced metric, ignoring normalization."""
        if self.t_coefficient is None:
            return None
        return self.t_coefficient(t)[0]

    def at(self, t: float) -> MetricCoefficients:
        """Coefficients at t.

        Raises:
            DegenerateMetric: if |A|, |B| or |C^2| falls below the tolerance
        """
        f_a, df_a, _ = self.radius_a.jet(t)
        f_b, df_b, _ = self.radius_b.jet(t)
        if not abs(f_a) >= DEGENERACY_TOLERANCE:
            raise DegenerateMetric(f"A(t) = {f_a:.3e} at t = {t:.6g}")
        if not abs(f_b) >= DEGENERACY_TOLERANCE:
            raise DegenerateMetric(f"B(t) = {f_b:.3e} at t = {t:.6g}")

        if self.arclength_normalized:
            eps_t, C, dC = -1, 1.0, 0.0
        else:
            q, dq = self.t_coefficient(t)
            if not abs(q) >= DEGENERACY_TOLERANCE:
                raise DegenerateMetric(f"eps_t C^2 = {q:.3e} at t = {t:.6g} (causal type change)")
            eps_t = _sign(q)
            C = math.sqrt(abs(q))
            dC = eps_t * dq / (2.0 * C)

        return MetricCoefficients(
            t=t,
            A=abs(f_a), dA=_sign(f_a) * df_a,
            B=abs(f_b), dB=_sign(f_b) * df_b,
            C=C, dC=dC,
            eps_a=self.eps_a, eps_b=self.eps_b, eps_t=eps_t,
            f_a=f_a, f_b=f_b,
        )

    def at_many(self, t: np.ndarray) -> CoefficientArrays:
        """Coefficients at every entry of t; degenerate entries are flagged, not raised."""
        t = np.asarray(t, dtype=float)
        f_a, df_a = _evaluate(self.radius_a.value, t), _evaluate(self.radius_a.d1, t)
        f_b, df_b = _evaluate(self.radius_b.value, t), _evaluate(self.radius_b.d1, t)
        degenerate = ~(np.abs(f_a) >= DEGENERACY_TOLERANCE) | ~(np.abs(f_b) >= DEGENERACY_TOLERANCE)

        if self.arclength_normalized:
            eps_t = np.full(t.shape, -1)
            C, dC = np.ones(t.shape), np.zeros(t.shape)
        else:
            q, dq = (np.broadcast_to(np.asarray(x, dtype=float), t.shape) for x in self.t_coefficient(t))
            degenerate = degenerate | ~(np.abs(q) >= DEGENERACY_TOLERANCE)
            eps_t = _sign_array(q)
            with np.errstate(divide="ignore", invalid="ignore"):
                C = np.sqrt(np.abs(q))
                dC = eps_t * dq / (2.0 * C)

        return CoefficientArrays(
            A=np.abs(f_a), dA=_sign_array(f_a) * df_a,
            B=np.abs(f_b), dB=_sign_array(f_b) * df_b,
            C=C, dC=dC, eps_t=eps_t,
            f_a=f_a, f_b=f_b,
            degenerate=degenerate,
            eps_a=self.eps_a, eps_b=self.eps_b,
        )

    def matrix(self, t: float) -> np.ndarray:
        c = self.at(t)
        return np.diag([c.g_aa, c.g_bb, c.g_tt])

    def signs(self, t: float) -> Tuple[int, int, int]:
        """Signs of f_a, f_b and of the t-coefficient at t (used to detect crossings)."""
        f_a = self.radius_a.value(t)
        f_b = self.radius_b.value(t)
        if self.arclength_normalized or self.t_coefficient is None:
            q = -1.0
        else:
            q = self.t_coefficient(t)[0]
        return _sign(f_a), _sign(f_b), _sign(q)


def rotation_sign(g: Generator, slot: int) -> int:
    """Sign of <G e, G e> for the basis vector e at ``slot`` (the orbit's causal sign)."""
    e = np.zeros(4)
    e[slot] = 1.0
    v = generator_matrix(g) @ e
    q = inner(v, v)
    if q == 0:
        raise ValueError(f"generator {g.value} does not move slot {slot}")
    return _sign(q)


def metric_from_profile(profile: ProfileCurve, arclength_normalized: bool = False) -> DiagonalMetric3:
    """Induced metric of the family's 3-submanifold over a planar profile.

    eps_a A^2 = <G1 gamma, G1 gamma>, eps_b B^2 = <G2 gamma, G2 gamma> and
    eps_t C^2 = <gamma', gamma'>, where G1, G2 are the family's generator
    matrices; for a planar pattern these reduce to signed squares of the
    radius functions.
    """
    g1, g2 = profile.family.generators
    slot_a, slot_b = profile.slots
    eps_a = rotation_sign(g1, slot_a)
    eps_b = rotation_sign(g2, slot_b)
    sig_a = 1 if slot_a >= 2 else -1
    sig_b = 1 if slot_b >= 2 else -1
    first, second = profile.first, profile.second

    def t_coefficient(t):
        fa1, fa2 = first.d1(t), first.d2(t)
        fb1, fb2 = second.d1(t), second.d2(t)
        q = sig_a * fa1 * fa1 + sig_b * fb1 * fb1
        dq = 2.0 * (sig_a * fa1 * fa2 + sig_b * fb1 * fb2)
        return q, dq

    return DiagonalMetric3(
        eps_a, eps_b, first, second,
        t_coefficient=t_coefficient,
        arclength_normalized=arclength_normalized,
        family=profile.family,
        pattern=profile.pattern,
    )
