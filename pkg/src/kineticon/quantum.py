"""Truncated Fock-space model of the weakly anharmonic (quartic) oscillator.

Everything is expressed as H/h, so matrix entries and eigenvalues are
frequencies in Hz.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .eigen import eig_sym
from .errors import ConvergenceError, DomainError, InvalidDimensionError, ValidityWarning

DEFAULT_DIM = 40
RECHECK_STEP = 10
CONVERGENCE_RTOL = 1e-9


@dataclass(frozen=True)
class LadderOps:
    dim: int
    a: np.ndarray
    adag: np.ndarray

    def commutator(self):
        """[a, a^dag] on the truncated space, integer-exact.

        The products a[k-1, k] * adag[k, k-1] are the integers k, so they are
        formed directly instead of multiplying rounded square roots.
        """
        k = np.arange(1, self.dim, dtype=float)
        return np.diag(np.append(k, 0.0)) - np.diag(np.insert(k, 0, 0.0))


@dataclass(frozen=True)
class FockSpectrum:
    """Converged low-lying levels of the quartic oscillator.

    ``levels`` holds absolute energies E_n/h (Hz), ascending. Only levels
    that are stable against enlarging the truncation are kept.
    """

    dim: int
    levels: tuple
    f01: float
    f12: float
    alpha_rel: float
    alpha_abs: float

    def transition(self, n):
        """Frequency of the n -> n+1 transition."""
        return self.levels[n + 1] - self.levels[n]


def build_ladder_ops(dim):
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    a.setflags(write=False)
    adag = a.T.copy()
    adag.setflags(write=False)
    return LadderOps(dim=int(dim), a=a, adag=adag)


def _require_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


def quartic_operator(dim):
    """(a + a^dag)^4 projected onto the lowest ``dim`` Fock states.

    The power is taken in a space four states larger before projecting, so
    every returned matrix element is exact (no truncation-edge artifacts).
    """
    ops = build_ladder_ops(dim + 4)
    x = ops.a + ops.adag
    x2 = x @ x
    return (x2 @ x2)[:dim, :dim]


def build_hamiltonian(f_r, lam, dim):
    """H/h = f_r [a^dag a + 1/2 + (lam/4)(a^dag + a)^4] as a dim x dim matrix."""
    _require_finite(f_r=f_r, lam=lam)
    if f_r <= 0:
        raise DomainError(f"f_r must be positive, got {f_r!r}")
    if not isinstance(dim, (int, np.integer)) or dim < 4:
        raise InvalidDimensionError(f"Hamiltonian needs dim >= 4, got {dim!r}")
    H = np.diag(np.arange(dim, dtype=float) + 0.5)
    if lam != 0.0:
        H = H + 0.25 * lam * quartic_operator(dim)
    return f_r * H


def perturbative_levels(f_r, lam, n):
    """First-order E_n/h, using <n|(a + a^dag)^4|n> = 6n^2 + 6n + 3."""
    _require_finite(f_r=f_r, lam=lam)
    if n < 0:
        raise DomainError(f"level index must be >= 0, got {n}")
    return f_r * (n + 0.5 + 0.25 * lam * (6 * n * n + 6 * n + 3))


def perturbative_transition(f_r, lam, n):
    """First-order n -> n+1 frequency, f_r (1 + 3 lam (n + 1))."""
    return f_r * (1.0 + 3.0 * lam * (n + 1))


def _validity(lam, dim):
    # diagonal quartic correction at the truncation edge, relative to the level energy
    return 1.5 * abs(lam) * dim


def spectrum(f_r, lam, dim=DEFAULT_DIM):
    if _validity(lam, dim) >= 0.25:
        warnings.warn(
            f"|lambda|={abs(lam):.3g} is not small for a {dim}-state truncation; "
            "the quartic term dominates near the basis edge",
            ValidityWarning,
            stacklevel=2,
        )
    e_small = eig_sym(build_hamiltonian(f_r, lam, dim))
    e_big = eig_sym(build_hamiltonian(f_r, lam, dim + RECHECK_STEP))[:dim]
    change = np.abs(e_big - e_small) / np.abs(e_small)
    bad = np.flatnonzero(change > CONVERGENCE_RTOL)
    n_conv = int(bad[0]) if bad.size else dim
    if n_conv < 3:
        raise ConvergenceError(
            f"Fock truncation not converged at dim={dim}: level {n_conv} moved by "
            f"{change[n_conv]:.3g} (relative) when the basis grew by {RECHECK_STEP}"
        )
    levels = tuple(float(x) for x in e_small[:n_conv])
    f01 = levels[1] - levels[0]
    f12 = levels[2] - levels[1]
    return FockSpectrum(
        dim=dim,
        levels=levels,
        f01=f01,
        f12=f12,
        alpha_rel=abs(f01 - f12) / f01,
        alpha_abs=abs(f01 - f12),
    )
