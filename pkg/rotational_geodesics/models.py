"""Data models for rotational_geodesics."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import InvalidCoefficients


class CausalClass(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"
    ZERO = "zero"


class SpaceFormKind(str, Enum):
    PSEUDO_SPHERE = "pseudo_sphere"
    PSEUDO_HYPERBOLIC = "pseudo_hyperbolic"
    NONE = "none"


class Generator(str, Enum):
    """Rotation generators, named by the coordinate slots they mix.

    Slots are (xi, rho, vartheta, eta) = (x1, x2, x3, x4), zero-based here.
    """
    OMEGA1 = "omega1"  # vartheta d_xi + xi d_vartheta
    OMEGA2 = "omega2"  # eta d_xi + xi d_eta
    OMEGA3 = "omega3"  # vartheta d_rho + rho d_vartheta
    OMEGA4 = "omega4"  # eta d_rho + rho d_eta
    OMEGA5 = "omega5"  # xi d_rho - rho d_xi
    OMEGA6 = "omega6"  # vartheta d_eta - eta d_vartheta

    @property
    def slots(self) -> Tuple[int, int]:
        return _GENERATOR_SLOTS[self]

    @property
    def elliptic(self) -> bool:
        return self in (Generator.OMEGA5, Generator.OMEGA6)

    @property
    def orientation(self) -> int:
        """Sign relating the flow's velocity at 0 to the matching Killing term.

        The elliptic flows follow the S56 parametrization, which turns the
        opposite way to the printed xi d_rho - rho d_xi and
        vartheta d_eta - eta d_vartheta terms.
        """
        return -1 if self.elliptic else 1


_GENERATOR_SLOTS = {
    Generator.OMEGA1: (0, 2),
    Generator.OMEGA2: (0, 3),
    Generator.OMEGA3: (1, 2),
    Generator.OMEGA4: (1, 3),
    Generator.OMEGA5: (0, 1),
    Generator.OMEGA6: (2, 3),
}


class ProfilePattern(str, Enum):
    PRIMARY = "primary"
    ALTERNATE = "alternate"


class SurfaceFamily(str, Enum):
    S14 = "S14"
    S23 = "S23"
    S56 = "S56"

    @property
    def generators(self) -> Tuple[Generator, Generator]:
        return _FAMILY_GENERATORS[self]

    def active_slots(self, pattern: ProfilePattern = ProfilePattern.PRIMARY) -> Tuple[int, int]:
        """Zero-based slots of the two nonzero profile components.

        The first slot is the radius of the first rotation angle, the
        second the radius of the second angle.
        """
        return _FAMILY_SLOTS[self][pattern]

    @property
    def submanifold(self) -> str:
        return {"S14": "Upsilon1", "S23": "Upsilon2", "S56": "Upsilon3"}[self.value]

    @property
    def angle_names(self) -> Tuple[str, str]:
        return {"S14": ("x", "alpha"), "S23": ("y", "z"), "S56": ("beta", "theta")}[self.value]


_FAMILY_GENERATORS = {
    SurfaceFamily.S14: (Generator.OMEGA1, Generator.OMEGA4),
    SurfaceFamily.S23: (Generator.OMEGA2, Generator.OMEGA3),
    SurfaceFamily.S56: (Generator.OMEGA5, Generator.OMEGA6),
}

# (first-angle radius slot, second-angle radius slot)
_FAMILY_SLOTS = {
    SurfaceFamily.S14: {ProfilePattern.PRIMARY: (0, 3), ProfilePattern.ALTERNATE: (2, 1)},
    SurfaceFamily.S23: {ProfilePattern.PRIMARY: (0, 1), ProfilePattern.ALTERNATE: (3, 2)},
    SurfaceFamily.S56: {ProfilePattern.PRIMARY: (1, 3), ProfilePattern.ALTERNATE: (0, 2)},
}


class FormulaVariant(str, Enum):
    VERBATIM = "verbatim"
    CORRECTED = "corrected"


class ProductReading(str, Enum):
    """How the second K term of the printed S56 formula is read."""
    SQUARED = "squared"      # as typeset, the profile factor squared
    UNSQUARED = "unsquared"  # the factor to the first power


class StepPolicy(str, Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class TerminationReason(str, Enum):
    COMPLETED = "completed"
    DEGENERATE_METRIC = "degenerate_metric"
    STEP_UNDERFLOW = "step_underflow"


@dataclass(frozen=True)
class KillingCoefficients:
    """Weights of the six generators in the Killing field W."""
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    e: float = 0.0
    f: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "e", "f"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidCoefficients(f"coefficient {name}={value!r} must be finite and >= 0")

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)


@dataclass(frozen=True)
class SpaceFormMembership:
    """Result of a space-form membership test."""
    kind: SpaceFormKind
    center: np.ndarray
    radius: float
    residual: float
    hyperbolic_sheet: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "center": [float(c) for c in self.center],
            "radius": self.radius,
            "residual": self.residual,
            "hyperbolic_sheet": self.hyperbolic_sheet,
        }


@dataclass
class CurvatureSample:
    """Gaussian curvature, mean-curvature components and normal frame at a point."""
    K: float
    H_e3: float
    H_e4: float
    e3: np.ndarray
    e4: np.ndarray
    variant: Optional[FormulaVariant] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "H_e3": self.H_e3,
            "H_e4": self.H_e4,
            "e3": [float(c) for c in self.e3],
            "e4": [float(c) for c in self.e4],
            "variant": self.variant.value if self.variant else "numeric",
        }


@dataclass(frozen=True)
class GeodesicState:
    """Two rotation angles, the profile parameter, and their s-derivatives."""
    a: float
    b: float
    t: float
    va: float
    vb: float
    vt: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.t, self.va, self.vb, self.vt], dtype=float)

    @classmethod
    def from_array(cls, y) -> "GeodesicState":
        return cls(*(float(v) for v in y))

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))

    def to_dict(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "t": self.t, "va": self.va, "vb": self.vb, "vt": self.vt}


@dataclass
class InvariantRecord:
    """Conserved quantities and chart angles at one trajectory sample."""
    s: float
    energy: float
    p_a: float
    p_b: float
    clairaut1: float
    clairaut2: float
    speed: float
    phi: float
    theta: float
    l: float
    chart_in_range: bool = True
    chart_residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "E": self.energy,
            "p_a": self.p_a,
            "p_b": self.p_b,
            "clairaut1": self.clairaut1,
            "clairaut2": self.clairaut2,
            "V": self.speed,
            "phi": self.phi,
            "theta": self.theta,
            "l": self.l,
        }


@dataclass
class Trajectory:
    """Integrated geodesic: samples plus integration metadata."""
    family: Optional[SurfaceFamily]
    states: List[GeodesicState] = field(default_factory=list)
    records: List[InvariantRecord] = field(default_factory=list)
    step_policy: StepPolicy = StepPolicy.FIXED
    step: float = 1e-3
    tolerance: Optional[float] = None
    variant: FormulaVariant = FormulaVariant.CORRECTED
    termination: TerminationReason = TerminationReason.COMPLETED
    message: str = ""
    accepted_steps: int = 0
    rejected_steps: int = 0

    @property
    def s_values(self) -> np.ndarray:
        return np.array([r.s for r in self.records], dtype=float)

    @property
    def terminated_early(self) -> bool:
        return self.termination != TerminationReason.COMPLETED

    @property
    def final_state(self) -> GeodesicState:
        return self.states[-1]

    def column(self, name: str) -> np.ndarray:
        """Values of one InvariantRecord field across all samples."""
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def metadata(self) -> Dict[str, Any]:
        return {
            "family": self.family.value if self.family else None,
            "variant": self.variant.value,
            "step_policy": self.step_policy.value,
            "step": self.step,
            "tolerance": self.tolerance,
            "termination": self.termination.value,
            "message": self.message,
            "accepted_steps": self.accepted_steps,
            "rejected_steps": self.rejected_steps,
        }


@dataclass
class DriftSummary:
    """Maximum drift of each monitored quantity along one trajectory."""
    energy: float
    p_a: float
    p_b: float
    clairaut1: float
    clairaut2: float
    residual: float
    l: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return {
            "E": self.energy,
            "p_a": self.p_a,
            "p_b": self.p_b,
            "clairaut1": self.clairaut1,
            "clairaut2": self.clairaut2,
            "residual": self.residual,
            "l": self.l,
        }

    def exceeded(self, thresholds: Dict[str, float]) -> List[str]:
        """Names of the quantities whose drift is above its threshold."""
        values = self.to_dict()
        return [
            name for name, limit in thresholds.items()
            if name in values and not values[name] <= limit
        ]

    def format_message(self) -> str:
        """Format the drift table for the log."""
        lines = [f"{'quantity':<10} {'max drift':>12}"]
        for name, value in self.to_dict().items():
            lines.append(f"{name:<10} {value:>12.3e}")
        return "\n".join(lines)


@dataclass
class EnergyReport:
    """Specific energy, angular momentum l and relation residual."""
    family: SurfaceFamily
    variant: FormulaVariant
    energy: float
    l_specific: float
    residual_mean: float
    residual_max_drift: float
    action: float = 0.0
    arc_length: float = 0.0

    @property
    def relation_holds(self) -> bool:
        """True when the effective-energy relation is satisfied, not just constant."""
        return abs(self.residual_mean) <= 1e-7 * max(1.0, abs(self.energy))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.value,
            "variant": self.variant.value,
            "E": self.energy,
            "l": self.l_specific,
            "residual_mean": self.residual_mean,
            "residual_max_drift": self.residual_max_drift,
            "action": self.action,
            "arc_length": self.arc_length,
        }


@dataclass
class SweepRow:
    """One grid node of a parameter sweep."""
    index: int
    phi: float
    theta: float
    final_state: Optional[GeodesicState]
    drift: Optional[DriftSummary]
    termination: str
    message: str = ""

    HEADER = (
        "index", "phi", "theta", "a", "b", "t", "va", "vb", "vt",
        "drift_E", "drift_p_a", "drift_p_b", "drift_clairaut1", "drift_clairaut2",
        "drift_residual", "termination",
    )

    def to_row(self) -> List[Any]:
        state = self.final_state.to_dict() if self.final_state else {}
        drift = self.drift.to_dict() if self.drift else {}
        nan = float("nan")
        return [
            self.index, self.phi, self.theta,
            *(state.get(k, nan) for k in ("a", "b", "t", "va", "vb", "vt")),
            *(drift.get(k, nan) for k in ("E", "p_a", "p_b", "clairaut1", "clairaut2", "residual")),
            self.termination,
        ]


@dataclass
class SuiteResult:
    """Outcome of one verification suite."""
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "details": self.details,
        }
