"""Kustaanheimo-Stiefel map between 4D u-space and 3D space.

The map is quadratic, ``x = A(u) u`` (first three rows), with ``|x| = |u|^2``.
The one-dimensional fiber over each point is parametrised by an auxiliary
angle ``gamma`` with period ``4 pi``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegeneratePointError, DomainError, SingularConfigurationError

__all__ = [
    "KSPoint",
    "SphericalPoint",
    "DoublePolar",
    "GAMMA_PERIOD",
    "ks_map",
    "ks_matrix",
    "ks_differential",
    "ks_jacobian",
    "ks_jacobian_numeric",
    "ab_oneform_pullback",
    "ab_oneform_direct",
    "double_polar_to_ks",
    "spherical_to_double_polar",
    "spherical_to_ks",
    "cartesian",
]

GAMMA_PERIOD = 4.0 * math.pi


class KSPoint(NamedTuple):
    u1: float
    u2: float
    u3: float
    u4: float

    def norm2(self) -> float:
        return self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3 + self.u4 * self.u4

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


class SphericalPoint(NamedTuple):
    """Point in 3D space; ``r > 0``, ``0 <= theta <= pi``, ``0 <= phi < 2 pi``."""

    r: float
    theta: float
    phi: float

    def validate(self) -> "SphericalPoint":
        if not (math.isfinite(self.r) and self.r > 0):
            raise DomainError(f"radius must be positive and finite, got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"phi must lie in [0, 2 pi), got {self.phi}")
        return self


class DoublePolar(NamedTuple):
    rho1: float
    theta1: float
    rho2: float
    theta2: float


def _as_u(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if arr.shape[-1] != 4:
        raise DomainError("a KS point has four components")
    return arr


def ks_map(u) -> tuple[float, float, float]:
    """Image ``(x, y, z)`` of a KS point."""
    u1, u2, u3, u4 = _as_u(u)
    x = 2.0 * (u1 * u3 + u2 * u4)
    y = 2.0 * (u1 * u4 - u2 * u3)
    z = u1 * u1 + u2 * u2 - u3 * u3 - u4 * u4
    return float(x), float(y), float(z)


def ks_matrix(u) -> np.ndarray:
    """The 4x4 matrix ``A(u)``; ``A(u) u = (x, y, z, 0)`` and ``A A^T = |u|^2 I``."""
    u1, u2, u3, u4 = _as_u(u)
    return np.array(
        [
            [u3, u4, u1, u2],
            [u4, -u3, -u2, u1],
            [u1, u2, -u3, -u4],
            [u2, -u1, u4, -u3],
        ]
    )


def ks_differential(u, du) -> np.ndarray:
    """Linearised image ``(dx, dy, dz, d eta) = 2 A(u) du``."""
    return 2.0 * ks_matrix(u) @ np.asarray(du, dtype=float)


def ks_jacobian(u) -> float:
    """Volume factor ``d(x, y, z, eta) / d(u1..u4) = 16 r^2`` with ``r = |u|^2``."""
    r = KSPoint(*_as_u(u)).norm2()
    if r == 0.0:
        raise DegeneratePointError("the KS map is degenerate at u = 0")
    return 16.0 * r * r


def ks_jacobian_numeric(u, step: float = 1e-6) -> float:
    """Determinant of the 4D Jacobian with the spatial rows taken by central differences.

    ``eta`` is not a function of ``u`` (its differential is not exact), so its
    row is the fourth row of ``2 A(u)`` as defined by the differential.
    """
    u = _as_u(u)
    jac = np.empty((4, 4))
    for j in range(4):
        h = step * max(1.0, abs(u[j]))
        up, um = u.copy(), u.copy()
        up[j] += h
        um[j] -= h
        jac[:3, j] = (np.array(ks_map(up)) - np.array(ks_map(um))) / (2.0 * h)
    jac[3] = 2.0 * ks_matrix(u)[3]
    return float(abs(np.linalg.det(jac)))


def ab_oneform_pullback(u, du, alpha: float, charge: float = 1.0) -> float:
    """The flux one-form ``(alpha/e) d(phi)`` written in u-space.

    Returns ``(alpha/e) [(u1 du2 - u2 du1)/(u1^2+u2^2) + (u4 du3 - u3 du4)/(u3^2+u4^2)]``.
    Each bracket depends on one plane only, which is what separates the
    problem into two planar flux problems.
    """
    u1, u2, u3, u4 = _as_u(u)
    d1, d2, d3, d4 = np.asarray(du, dtype=float)
    n12 = u1 * u1 + u2 * u2
    n34 = u3 * u3 + u4 * u4
    if n12 == 0.0 or n34 == 0.0:
        raise SingularConfigurationError("point lies on the flux string (a u-plane norm vanishes)")
    return float(alpha / charge * ((u1 * d2 - u2 * d1) / n12 + (u4 * d3 - u3 * d4) / n34))


def ab_oneform_direct(u, du, alpha: float, charge: float = 1.0) -> float:
    """Same one-form computed in 3D, ``(alpha/e)(y dx - x dy)/(x^2 + y^2)``, via the KS differential."""
    x, y, _ = ks_map(u)
    dx, dy = ks_differential(u, du)[:2]
    rho2 = x * x + y * y
    if rho2 == 0.0:
        raise SingularConfigurationError("point lies on the flux string (x = y = 0)")
    return float(alpha / charge * (y * dx - x * dy) / rho2)


def double_polar_to_ks(dp: DoublePolar) -> KSPoint:
    return KSPoint(
        dp.rho1 * math.sin(dp.theta1),
        dp.rho1 * math.cos(dp.theta1),
        dp.rho2 * math.cos(dp.theta2),
        dp.rho2 * math.sin(dp.theta2),
    )


def spherical_to_double_polar(p: SphericalPoint, gamma: float) -> DoublePolar:
    """Double-polar coordinates of the fiber point labelled by ``gamma`` in ``[0, 4 pi)``."""
    p.validate()
    if not 0.0 <= gamma < GAMMA_PERIOD:
        raise DomainError(f"auxiliary angle must lie in [0, 4 pi), got {gamma}")
    sr = math.sqrt(p.r)
    return DoublePolar(
        sr * math.cos(0.5 * p.theta),
        0.5 * (p.phi + gamma + math.pi),
        sr * math.sin(0.5 * p.theta),
        0.5 * (p.phi - gamma),
    )


def spherical_to_ks(p: SphericalPoint, gamma: float) -> KSPoint:
    return double_polar_to_ks(spherical_to_double_polar(p, gamma))


def cartesian(p: SphericalPoint) -> tuple[float, float, float]:
    st = math.sin(p.theta)
    return (p.r * st * math.cos(p.phi), p.r * st * math.sin(p.phi), p.r * math.cos(p.theta))
