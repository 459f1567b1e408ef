"""Lumped Kineticon circuit: a capacitor shunting a nonlinear kinetic inductor.

The inductor follows L_k(Phi) = L0k (1 + Phi^2 / Phi_*^2) with
Phi_* = I_* L0k. Quantities derived here feed the quartic oscillator model
in :mod:`kineticon.quantum`.
"""

import math
import warnings
from dataclasses import dataclass

from . import constants as const
from .errors import DomainError, ValidityError, ValidityWarning

FLUX_WARN_RATIO = 0.5
LAMBDA_WARN = 1e-2


@dataclass(frozen=True)
class KineticonCircuit:
    L0k: float  # H, zero-bias kinetic inductance
    C: float  # F
    Istar: float  # A, characteristic current

    def __post_init__(self):
        for name in ("L0k", "C", "Istar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")

    @property
    def PhiStar(self):
        return self.Istar * self.L0k

    @classmethod
    def from_frequency(cls, L0k, f_r, Istar):
        return cls(L0k=L0k, C=capacitor_for_frequency(L0k, f_r), Istar=Istar)


@dataclass(frozen=True)
class DerivedCircuit:
    f_r: float  # Hz
    Z0: float  # ohm
    PhiStar: float  # Wb
    phi_zpf: float  # Wb
    q_zpf: float  # C
    I_zpf: float  # A
    Ek: float  # J
    lam: float  # dimensionless quartic coefficient, always negative

    @property
    def omega_r(self):
        return 2 * math.pi * self.f_r


def derive(circuit):
    L, C = circuit.L0k, circuit.C
    f_r = 1.0 / (2 * math.pi * math.sqrt(L * C))
    Z0 = math.sqrt(L / C)
    phi_star = circuit.PhiStar
    phi_zpf = math.sqrt(const.hbar * Z0 / 2)
    return DerivedCircuit(
        f_r=f_r,
        Z0=Z0,
        PhiStar=phi_star,
        phi_zpf=phi_zpf,
        q_zpf=math.sqrt(const.hbar / (2 * Z0)),
        I_zpf=math.sqrt(const.h * f_r / (2 * L)),
        Ek=phi_star**2 / (2 * L),
        lam=-(phi_zpf**2) / phi_star**2,
    )


def nonlinear_inductance(circuit, Phi):
    """Flux-dependent kinetic inductance L0k (1 + Phi^2 / Phi_*^2)."""
    ratio = abs(Phi) / circuit.PhiStar
    if ratio >= 1.0:
        raise ValidityError(f"|Phi/Phi_*| = {ratio:.3g} >= 1: weak-nonlinearity expansion invalid")
    if ratio >= FLUX_WARN_RATIO:
        warnings.warn(
            f"|Phi/Phi_*| = {ratio:.3g} exceeds {FLUX_WARN_RATIO}; expansion is marginal",
            ValidityWarning,
            stacklevel=2,
        )
    return circuit.L0k * (1.0 + (Phi / circuit.PhiStar) ** 2)


def energies(circuit, Phi, Phidot):
    """Capacitive and inductive energy (U_C, U_L) in joules.

    U_L = E_k (Phi^2/Phi_*^2 - Phi^4/Phi_*^4) with E_k = Phi_*^2 / (2 L0k).
    """
    x2 = (Phi / circuit.PhiStar) ** 2
    Ek = circuit.PhiStar**2 / (2 * circuit.L0k)
    return 0.5 * circuit.C * Phidot**2, Ek * (x2 - x2 * x2)


def alpha_perturbative(circuit):
    """Relative anharmonicity 3 I_zpf^2 / I_*^2 of the weakly nonlinear circuit."""
    d = derive(circuit)
    if abs(d.lam) >= LAMBDA_WARN:
        warnings.warn(
            f"|lambda| = {abs(d.lam):.3g} is not small; perturbative anharmonicity unreliable",
            ValidityWarning,
            stacklevel=2,
        )
    return 3.0 * d.I_zpf**2 / circuit.Istar**2


def capacitor_for_frequency(L0k, f_r):
    if not (L0k > 0 and f_r > 0):
        raise DomainError(f"L0k and f_r must be positive, got {L0k!r}, {f_r!r}")
    return 1.0 / ((2 * math.pi * f_r) ** 2 * L0k)
