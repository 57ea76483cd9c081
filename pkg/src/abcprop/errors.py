"""Exception types raised across the package."""

from __future__ import annotations


class ABCError(Exception):
    """Base class for all package errors."""


class DomainError(ABCError, ValueError):
    """Argument outside the domain of a special function or map."""


class DegeneratePointError(DomainError):
    """KS origin or another point where a map is not invertible."""


class SingularConfigurationError(DomainError):
    """Point on the flux line, where the AB one-form is singular."""


class NoBoundStateError(ABCError, ValueError):
    """Requested bound-state quantity for a repulsive Coulomb coupling."""


class NearPoleError(ABCError, ValueError):
    """Energy too close to a bound-state pole for a reliable amplitude.

    Attributes
    ----------
    level_energy : float
        Energy of the offending level.
    principal : float
        Its principal number ``1 + |m+alpha| + n + n'``.
    m : int
        Angular quantum number of the channel that produced the pole.
    """

    def __init__(self, message: str, level_energy: float, principal: float, m: int):
        super().__init__(message)
        self.level_energy = level_energy
        self.principal = principal
        self.m = m


class AccuracyError(ABCError, RuntimeError):
    """Numerical procedure failed to reach the requested tolerance.

    The best available estimate is attached as ``best_estimate``.
    """

    def __init__(self, message: str, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class ResolutionError(ABCError, RuntimeError):
    """Radial grid too small or too coarse for the requested states."""
