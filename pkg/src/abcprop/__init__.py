"""Coulomb problem with an Aharonov-Bohm flux line: spectrum, fixed-energy amplitude, checks."""

from .amplitude import (
    AmplitudeValue,
    EndpointPair,
    FixedEnergy,
    PoleEstimate,
    TruncationSpec,
    green_partial_wave,
    green_q_integral,
    pole_scan,
)
from .errors import (
    ABCError,
    AccuracyError,
    DegeneratePointError,
    DomainError,
    NearPoleError,
    NoBoundStateError,
    ResolutionError,
    SingularConfigurationError,
)
from .kstransform import KSPoint, SphericalPoint
from .oracle import RadialGrid, compare_spectrum, radial_eigenvalues
from .spectrum import Level, PhysParams, QuantumNumbers, energy, enumerate_levels

__all__ = [
    "ABCError",
    "AccuracyError",
    "AmplitudeValue",
    "DegeneratePointError",
    "DomainError",
    "EndpointPair",
    "FixedEnergy",
    "KSPoint",
    "Level",
    "NearPoleError",
    "NoBoundStateError",
    "PhysParams",
    "PoleEstimate",
    "QuantumNumbers",
    "RadialGrid",
    "ResolutionError",
    "SingularConfigurationError",
    "SphericalPoint",
    "TruncationSpec",
    "compare_spectrum",
    "energy",
    "enumerate_levels",
    "green_partial_wave",
    "green_q_integral",
    "pole_scan",
    "radial_eigenvalues",
]
