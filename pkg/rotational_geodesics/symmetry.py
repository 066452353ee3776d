"""Rotation generators, their one-parameter flows, and the flat Killing check.

Coordinate slots are (xi, rho, vartheta, eta) = (x1, x2, x3, x4).  The
Killing field is

    W = a(eta d_xi + xi d_eta) + b(vartheta d_rho + rho d_vartheta)
      + c(vartheta d_xi + xi d_vartheta) + d(eta d_rho + rho d_eta)
      + e(vartheta d_eta - eta d_vartheta) + f(xi d_rho - rho d_xi)

W is linear in the point, so its Jacobian is a constant matrix and the
Lie derivative of the flat metric along W is g J + J^T g.
"""

from typing import Dict

import numpy as np

from .linalg import METRIC, VectorLike
from .models import Generator, KillingCoefficients

# Which generator each Killing weight multiplies.
COEFFICIENT_GENERATORS: Dict[str, Generator] = {
    "a": Generator.OMEGA2,
    "b": Generator.OMEGA3,
    "c": Generator.OMEGA1,
    "d": Generator.OMEGA4,
    "e": Generator.OMEGA6,
    "f": Generator.OMEGA5,
}


def generator_matrix(g: Generator) -> np.ndarray:
    """Velocity of flow_matrix(g, angle) at angle 0, as a 4x4 matrix."""
    i, j = g.slots
    m = np.zeros((4, 4))
    m[i, j] = 1.0
    m[j, i] = -1.0 if g.elliptic else 1.0
    return m


def flow_matrix(g: Generator, angle: float) -> np.ndarray:
    """One-parameter group element of g: a boost or rotation of its two slots.

    Hyperbolic generators give [[cosh, sinh], [sinh, cosh]]; elliptic ones
    follow S56, [[cos, sin], [-sin, cos]].  Identity off the active block.
    """
    i, j = g.slots
    m = np.eye(4)
    if g.elliptic:
        c, s = np.cos(angle), np.sin(angle)
        m[i, i], m[i, j], m[j, i], m[j, j] = c, s, -s, c
    else:
        c, s = np.cosh(angle), np.sinh(angle)
        m[i, i], m[i, j], m[j, i], m[j, j] = c, s, s, c
    return m


def killing_jacobian(k: KillingCoefficients) -> np.ndarray:
    """Constant Jacobian dW^i/dx^j of the Killing field with weights k."""
    jac = np.zeros((4, 4))
    for name, g in COEFFICIENT_GENERATORS.items():
        weight = getattr(k, name)
        if weight:
            jac += weight * g.orientation * generator_matrix(g)
    return jac


def killing_vector_at(k: KillingCoefficients, p: VectorLike) -> np.ndarray:
    """Evaluate W at p."""
    return killing_jacobian(k) @ np.asarray(p, dtype=float)


def lie_derivative_of_jacobian(jacobian: np.ndarray) -> np.ndarray:
    """Flat-space Lie derivative of the metric along a linear field with this Jacobian."""
    jac = np.asarray(jacobian, dtype=float)
    return METRIC @ jac + jac.T @ METRIC


def lie_derivative_flat(k: KillingCoefficients, p: VectorLike) -> np.ndarray:
    """Lie derivative of g along W at p (symmetric 4x4; zero iff W is Killing).

    The result does not depend on p because W is linear; p is only checked
    to be a point of E_2^4.
    """
    if np.shape(p) != (4,):
        raise ValueError(f"expected a point with 4 coordinates, got shape {np.shape(p)}")
    return lie_derivative_of_jacobian(killing_jacobian(k))


def is_killing(k: KillingCoefficients, atol: float = 1e-12) -> bool:
    return bool(np.all(np.abs(lie_derivative_flat(k, np.zeros(4))) < atol))
