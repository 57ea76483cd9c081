"""Bound-state energies of the Coulomb problem threaded by a flux line.

A state is labelled by ``(m, n, n')`` and has principal number
``N = 1 + |m + alpha| + n + n'`` and energy ``E = -M xi^2 / (2 N^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, NoBoundStateError

__all__ = [
    "PhysParams",
    "QuantumNumbers",
    "Level",
    "principal_number",
    "energy",
    "energy_from_principal",
    "enumerate_levels",
    "effective_ell",
    "nearest_level",
]


@dataclass(frozen=True)
class PhysParams:
    """Mass ``M``, Coulomb strength ``xi`` (negative means attractive), flux ``alpha``."""

    mass: float
    coulomb: float
    flux: float

    def __post_init__(self):
        for name in ("mass", "coulomb", "flux"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")

    def require_bound_states(self) -> None:
        if self.coulomb >= 0:
            raise NoBoundStateError("no bound states for repulsive coupling")

    @property
    def bohr_radius(self) -> float:
        return 1.0 / (self.mass * abs(self.coulomb))


class QuantumNumbers(NamedTuple):
    m: int
    n: int
    nprime: int


@dataclass(frozen=True)
class Level:
    energy: float
    principal: float
    members: tuple[QuantumNumbers, ...]

    @property
    def degeneracy(self) -> int:
        return len(self.members)


def principal_number(flux: float, qn: QuantumNumbers) -> float:
    if qn.n < 0 or qn.nprime < 0:
        raise DomainError("n and n' must be non-negative")
    return 1.0 + abs(qn.m + flux) + qn.n + qn.nprime


def energy_from_principal(params: PhysParams, principal: float) -> float:
    params.require_bound_states()
    return -params.mass * params.coulomb**2 / (2.0 * principal * principal)


def energy(params: PhysParams, qn: QuantumNumbers) -> float:
    """``-M xi^2 / (2 (1 + |m+alpha| + n + n')^2)``; requires ``xi < 0``."""
    return energy_from_principal(params, principal_number(params.flux, qn))


def effective_ell(m: int, alpha: float, n: int) -> float:
    """Non-integer angular momentum ``n + |m+alpha|`` of the equivalent radial Coulomb problem."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return n + abs(m + alpha)


def _states_up_to(flux: float, max_principal: float):
    budget = max_principal - 1.0  # |m+alpha| + n + n' <= budget
    if budget < 0:
        return
    m_lo = math.floor(-flux - budget) - 1
    m_hi = math.ceil(-flux + budget) + 1
    for m in range(m_lo, m_hi + 1):
        nu = abs(m + flux)
        if nu > budget * (1 + 1e-14) + 1e-14:
            continue
        rest = budget - nu
        for n in range(int(math.floor(rest + 1e-12)) + 1):
            for nprime in range(int(math.floor(rest - n + 1e-12)) + 1):
                yield QuantumNumbers(m, n, nprime)


def enumerate_levels(params: PhysParams, max_principal: float, rel_tol: float = 1e-12) -> list[Level]:
    """All levels with principal number ``<= max_principal``, ordered by energy.

    States whose energies agree to ``rel_tol`` (relative) form one level.
    """
    params.require_bound_states()
    if not max_principal >= 1:
        raise DomainError("max_principal must be >= 1")
    states = sorted(
        ((principal_number(params.flux, qn), qn) for qn in _states_up_to(params.flux, max_principal)),
        key=lambda item: (item[0], item[1]),
    )
    levels: list[Level] = []
    group: list[QuantumNumbers] = []
    group_e = group_n = None
    for n_p, qn in states:
        e = energy_from_principal(params, n_p)
        if group and abs(e - group_e) <= rel_tol * abs(group_e):
            group.append(qn)
            continue
        if group:
            levels.append(Level(group_e, group_n, tuple(group)))
        group, group_e, group_n = [qn], e, n_p
    if group:
        levels.append(Level(group_e, group_n, tuple(group)))
    return levels


def nearest_level(params: PhysParams, e: float, max_principal: float) -> Level | None:
    """The level closest to ``e`` among those with principal number ``<= max_principal``."""
    levels = enumerate_levels(params, max_principal)
    if not levels:
        return None
    return min(levels, key=lambda lv: abs(lv.energy - e))
