"""Linear algebra in E_2^4, the 4-space with metric diag(-1, -1, 1, 1).

Vectors are plain ``numpy`` arrays of shape (4,); :func:`vec4` is the
validating constructor.  All functions are pure.
"""

from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import NonFiniteComponent, NonPositiveRadius
from .models import CausalClass, SpaceFormKind, SpaceFormMembership


SIGNATURE = np.array([-1.0, -1.0, 1.0, 1.0])
METRIC = np.diag(SIGNATURE)

# Null classification tolerance, scaled by max(1, |v|^2_euclidean).
NULL_TOLERANCE = 1e-12
# Space-form membership tolerance, relative.
MEMBERSHIP_TOLERANCE = 1e-9

Vec4 = np.ndarray
VectorLike = Union[Sequence[float], np.ndarray]


def vec4(*components: Union[float, Iterable[float]]) -> Vec4:
    """Build a finite 4-vector from four numbers or one iterable of four."""
    if len(components) == 1:
        values = np.asarray(components[0], dtype=float)
    else:
        values = np.asarray(components, dtype=float)
    if values.shape != (4,):
        raise ValueError(f"expected 4 components, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteComponent(f"non-finite component in {values!r}")
    return values


def basis(index: int) -> Vec4:
    """Standard basis vector i_{index+1}."""
    v = np.zeros(4)
    v[index] = 1.0
    return v


def inner(u: VectorLike, v: VectorLike) -> float:
    """Indefinite inner product -u1v1 - u2v2 + u3v3 + u4v4.

    Broadcasts over leading axes; returns a float for plain vectors.
    """
    result = np.einsum("...i,i,...i->...", np.asarray(u, dtype=float), SIGNATURE, np.asarray(v, dtype=float))
    if np.ndim(result) == 0:
        return float(result)
    return result


def gram(vectors: Sequence[VectorLike]) -> np.ndarray:
    """Matrix of pairwise inner products."""
    rows = np.asarray(vectors, dtype=float)
    return rows @ METRIC @ rows.T


def norm(v: VectorLike) -> float:
    """sqrt(|<v, v>|); zero for null vectors."""
    return float(np.sqrt(abs(inner(v, v))))


def causal_class(v: VectorLike) -> CausalClass:
    """Classify v as spacelike, timelike, null or zero."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return CausalClass.ZERO
    q = inner(v, v)
    tau = NULL_TOLERANCE * max(1.0, float(v @ v))
    if abs(q) <= tau:
        return CausalClass.NULL
    return CausalClass.SPACELIKE if q > 0 else CausalClass.TIMELIKE


def cross3(x: VectorLike, y: VectorLike, z: VectorLike) -> Vec4:
    """Triple cross product: the formal determinant with first row (-i1, -i2, i3, i4).

    Expanded by cofactors along the first row, so the result is trilinear,
    alternating, and orthogonal to each argument.
    """
    rows = np.array([x, y, z], dtype=float)
    out = np.empty(4)
    for j in range(4):
        minor = np.delete(rows, j, axis=1)
        out[j] = SIGNATURE[j] * (-1) ** j * np.linalg.det(minor)
    return out


def space_form_membership(
    p: VectorLike,
    m: VectorLike = (0.0, 0.0, 0.0, 0.0),
    r: float = 1.0,
) -> SpaceFormMembership:
    """Test whether p lies on S_2^3(m, r) or H_1^3(m, r).

    H^3 is not a separate kind: points of H_1^3 with x1 > 0 carry
    ``hyperbolic_sheet=True``.
    """
    if not r > 0:
        raise NonPositiveRadius(f"radius must be positive, got {r!r}")
    p = np.asarray(p, dtype=float)
    center = np.asarray(m, dtype=float)
    d = p - center
    q = inner(d, d)
    r2 = r * r
    scale = max(r2, float(d @ d))
    sphere_residual = abs(q - r2) / scale
    hyperbolic_residual = abs(q + r2) / scale

    if sphere_residual <= MEMBERSHIP_TOLERANCE:
        kind = SpaceFormKind.PSEUDO_SPHERE
    elif hyperbolic_residual <= MEMBERSHIP_TOLERANCE:
        kind = SpaceFormKind.PSEUDO_HYPERBOLIC
    else:
        kind = SpaceFormKind.NONE

    return SpaceFormMembership(
        kind=kind,
        center=center,
        radius=float(r),
        residual=min(sphere_residual, hyperbolic_residual),
        hyperbolic_sheet=bool(kind == SpaceFormKind.PSEUDO_HYPERBOLIC and p[0] > 0),
    )
