"""Reflection off a quantum-dot/cavity system and the spin-photon CZ it yields.

Rates and frequencies are angular (rad/s); only their ratios matter.
Photon polarization R=0, L=1 and spin +=0, -=1 define the basis of the
two-qubit gate, with the photon as the more significant qubit.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass

import numpy as np

from .qcore import GateMatrix

COUPLING_FACTOR = 5.0


class SingularParametersError(ValueError):
    """Raised when a reflection coefficient has a vanishing denominator."""


@dataclass(frozen=True)
class CavityParams:
    omega_p: float
    omega_c: float
    omega_0: float
    kappa: float
    gamma: float
    g: float

    def __post_init__(self):
        for name in ("omega_p", "omega_c", "omega_0", "kappa", "gamma", "g"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kappa <= 0 or self.gamma <= 0:
            raise ValueError("kappa and gamma must be positive")
        if self.g < 0:
            raise ValueError("g must be non-negative")

    @classmethod
    def resonant(cls, kappa: float, gamma: float, g: float, omega: float = 0.0) -> "CavityParams":
        return cls(omega, omega, omega, kappa, gamma, g)

    @property
    def is_resonant(self) -> bool:
        return self.omega_p == self.omega_c == self.omega_0


def reflection_coupled(p: CavityParams) -> complex:
    if p.g == 0:
        # the dot factor cancels; share the uncoupled arithmetic exactly
        return reflection_uncoupled(p)
    cav = 1j * (p.omega_c - p.omega_p)
    dot = 1j * (p.omega_0 - p.omega_p) + p.gamma / 2
    g2 = p.g * p.g
    den = (cav + p.kappa / 2) * dot + g2
    if den == 0:
        raise SingularParametersError(f"coupled reflection is singular for {p}")
    return ((cav - p.kappa / 2) * dot + g2) / den


def reflection_uncoupled(p: CavityParams) -> complex:
    cav = 1j * (p.omega_c - p.omega_p)
    return (cav - p.kappa / 2) / (cav + p.kappa / 2)


def principal_angle(x: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    x = math.remainder(x, 2 * math.pi)
    return math.pi if x <= -math.pi else x


@dataclass(frozen=True)
class ReflectionResult:
    r_coupled: complex
    r_uncoupled: complex
    phi: float
    phi_0: float


def phases(p: CavityParams) -> ReflectionResult:
    r = reflection_coupled(p)
    r0 = reflection_uncoupled(p)
    return ReflectionResult(r, r0, principal_angle(cmath.phase(r)), principal_angle(cmath.phase(r0)))


@dataclass(frozen=True)
class SpinPhotonGate:
    """Diagonal phase gate on (polarization, spin).

    ``effective_theta`` is the deviation from an ideal CZ: the realized gate
    is ``CP(+-(pi - effective_theta))`` up to a global phase, the sign
    following the sign of the wrapped ``phi - phi_0``.
    """

    matrix: GateMatrix
    effective_theta: float
    reflection: ReflectionResult


def spin_photon_gate(p: CavityParams, apply_pi_shifter: bool = True) -> SpinPhotonGate:
    """Phase-only gate from the reflection arguments.

    Only the L photon meeting spin ``-`` picks up ``phi``; the other three
    basis states reflect with ``phi_0``. The magnitudes of the reflection
    coefficients are kept in ``reflection`` but not in the gate.
    """
    refl = phases(p)
    diag = np.exp(1j * np.array([refl.phi_0, refl.phi_0, refl.phi_0, refl.phi]))
    if apply_pi_shifter:
        diag = -diag
    relative = principal_angle(refl.phi - refl.phi_0)
    return SpinPhotonGate(GateMatrix(np.diag(diag)), math.pi - abs(relative), refl)


def coupling_check(p: CavityParams) -> bool:
    """Strong-coupling condition g > 5 sqrt(kappa gamma)."""
    return p.g > COUPLING_FACTOR * math.sqrt(p.kappa * p.gamma)
