"""Rectangular 3-D cavity modes and the coupled qubit-cavity model.

Axis convention: ``a`` is the width along x, ``b`` the height along y and
``d`` the depth along z. Mode indices (m, n, p) count half-wavelengths
along (x, y, z), with z taken as the reference axis:

* TE_mnp needs p >= 1 and (m, n) != (0, 0)
* TM_mnp needs m >= 1 and n >= 1 (p may be 0)
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import constants as const
from .eigen import eig_sym
from .errors import ConvergenceError, DomainError, ModeIndexError, UnreachableLoadingError, ValidityWarning
from .quantum import RECHECK_STEP, build_ladder_ops, perturbative_transition, quartic_operator

RWA_WARN = 0.05


@dataclass(frozen=True)
class RectCavity:
    a: float  # m, width (x)
    b: float  # m, height (y)
    d: float  # m, depth (z)
    eps_eff: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.d > 0):
            raise DomainError("cavity dimensions must be positive")
        if not self.eps_eff >= 1:
            raise DomainError("effective permittivity must be >= 1")


def check_mode(m, n, p, family):
    if min(m, n, p) < 0:
        raise ModeIndexError("mode indices must be nonnegative")
    if family == "TE":
        if p < 1 or (m == 0 and n == 0):
            raise ModeIndexError(f"TE_{m}{n}{p} does not exist (need p >= 1 and m, n not both 0)")
    elif family == "TM":
        if m < 1 or n < 1:
            raise ModeIndexError(f"TM_{m}{n}{p} does not exist (need m, n >= 1)")
    else:
        raise ModeIndexError(f"unknown mode family {family!r}")


def mode_frequency(cavity, m, n, p, family="TE"):
    check_mode(m, n, p, family)
    k = math.sqrt((m / cavity.a) ** 2 + (n / cavity.b) ** 2 + (p / cavity.d) ** 2)
    return const.c / (2 * math.sqrt(cavity.eps_eff)) * k


def loading_for_target(cavity, m, n, p, family, f_target):
    """Effective permittivity that pulls a mode of the empty box down to ``f_target``."""
    empty = RectCavity(cavity.a, cavity.b, cavity.d, 1.0)
    f_empty = mode_frequency(empty, m, n, p, family)
    if f_target > f_empty:
        raise UnreachableLoadingError(
            f"target {f_target:.6g} Hz is above the empty-cavity mode at {f_empty:.6g} Hz"
        )
    if not f_target > 0:
        raise DomainError("target frequency must be positive")
    return (f_empty / f_target) ** 2


def mode_table(cavity, max_index=2):
    """All TE and TM modes with indices up to ``max_index``, sorted by frequency.

    Rows are ``(family, m, n, p, f_hz)``.
    """
    rows = []
    for family in ("TE", "TM"):
        for m in range(max_index + 1):
            for n in range(max_index + 1):
                for p in range(max_index + 1):
                    try:
                        f = mode_frequency(cavity, m, n, p, family)
                    except ModeIndexError:
                        continue
                    rows.append((family, m, n, p, f))
    rows.sort(key=lambda r: (r[4], r[0], r[1], r[2], r[3]))
    return rows


@dataclass(frozen=True)
class CoupledSystem:
    f_cavity: float  # Hz
    f_qubit: float  # Hz
    lambda_q: float = 0.0
    g: float = 0.0  # Hz
    kappa1: float = 0.0  # Hz
    kappa2: float = 0.0  # Hz
    gamma: float = 0.0  # Hz
    dims: tuple = (6, 20)  # (cavity, qubit) Fock truncations

    def __post_init__(self):
        for name in ("g", "kappa1", "kappa2", "gamma"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative")
        if min(self.dims) < 2:
            raise DomainError("truncations must be >= 2")


@dataclass(frozen=True)
class DressedSpectrum:
    levels: tuple  # eigenfrequencies relative to the dressed ground state, Hz
    f_cavity_dressed: float
    f_qubit_dressed: float
    chi: float  # cavity pull, qubit excited minus ground


def coupled_hamiltonian(system, dims=None):
    """H/h on the (cavity x qubit) product space; basis index = i_c * n_q + j_q."""
    nc, nq = dims or system.dims
    ac = build_ladder_ops(nc).a
    bq = build_ladder_ops(nq).a
    Ic, Iq = np.eye(nc), np.eye(nq)
    qubit = system.f_qubit * (bq.T @ bq)
    if system.lambda_q != 0.0:
        qubit = qubit + 0.25 * system.lambda_q * system.f_qubit * quartic_operator(nq)
    H = system.f_cavity * np.kron(ac.T @ ac, Iq) + np.kron(Ic, qubit)
    if system.g != 0.0:
        hop = np.kron(ac.T, bq)
        H = H + system.g * (hop + hop.T)
    return H


def _dressed(system, dims):
    nc, nq = dims
    w, V = eig_sym(coupled_hamiltonian(system, dims), vectors=True)

    def state(i, j):
        # eigenvector with the largest weight on the bare state |i_c, j_q>
        return int(np.argmax(np.abs(V[i * nq + j, :])))

    e = {ij: w[state(*ij)] for ij in [(0, 0), (1, 0), (0, 1), (1, 1)]}
    return w - e[(0, 0)], e


def dressed_spectrum(system):
    if system.g > RWA_WARN * min(system.f_cavity, system.f_qubit):
        warnings.warn("g/f exceeds 0.05; rotating-wave coupling is questionable", ValidityWarning, stacklevel=2)
    nc, nq = system.dims
    levels, e = _dressed(system, (nc, nq))
    big_levels, e_big = _dressed(system, (nc + RECHECK_STEP, nq + RECHECK_STEP))
    for key in e:
        ref = e_big[key] - e_big[(0, 0)]
        val = e[key] - e[(0, 0)]
        if key != (0, 0) and abs(val - ref) > 1e-9 * abs(ref):
            raise ConvergenceError(
                f"product-space truncation {system.dims} not converged for bare state {key}"
            )
    fc = e[(1, 0)] - e[(0, 0)]
    fq = e[(0, 1)] - e[(0, 0)]
    chi = (e[(1, 1)] - e[(0, 1)]) - fc
    return DressedSpectrum(tuple(levels.tolist()), float(fc), float(fq), float(chi))


def dispersive_shift_estimate(system):
    """Second-order cavity pull between qubit states 0 and 1.

    Uses first-order qubit transitions f01 = f_q(1 + 3 lam), f12 = f_q(1 + 6 lam)
    and chi = 2 g^2 K / (D (D - K)), with D = f_c - f01 and K = f12 - f01.
    """
    f01 = perturbative_transition(system.f_qubit, system.lambda_q, 0)
    f12 = perturbative_transition(system.f_qubit, system.lambda_q, 1)
    D = system.f_cavity - f01
    K = f12 - f01
    return 2 * system.g**2 * K / (D * (D - K))


def s21_coupled(system, freqs):
    """Input-output transmission of a two-port cavity with a coupled qubit.

    S21 = sqrt(k1 k2) / (i(f - f_c) + (k1 + k2)/2 + g^2 / (i(f - f_q) + gamma/2))
    """
    if system.kappa1 <= 0 or system.kappa2 <= 0:
        raise DomainError("port coupling rates must be positive")
    f = np.asarray(freqs, dtype=float)
    qubit = 1j * (f - system.f_qubit) + system.gamma / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        pull = np.where(qubit == 0, np.inf, system.g**2 / np.where(qubit == 0, 1, qubit))
    if system.g == 0:
        pull = np.zeros_like(f, dtype=complex)
    den = 1j * (f - system.f_cavity) + (system.kappa1 + system.kappa2) / 2 + pull
    s = math.sqrt(system.kappa1 * system.kappa2) / den
    return list(zip(f.tolist(), np.atleast_1d(s).tolist()))
