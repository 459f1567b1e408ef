"""Superconductor parameters and the nanowire geometry -> circuit bridge.

Records store the gap in eV and the density of states in eV^-1 um^-3
(the units these numbers are usually quoted in); every formula converts to
SI through :attr:`Material.delta_J` and :attr:`Material.N0_SI`.
"""

import dataclasses
import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Optional

from . import constants as const
from .errors import DomainError, IncompleteMaterialError, RegistryError, ValidityWarning

BCS_RATIO = 1.764  # Delta / (k_B Tc) in weak-coupling BCS


@dataclass(frozen=True)
class Material:
    name: str
    Tc: float  # K
    Delta: float  # eV
    N0: Optional[float] = None  # eV^-1 um^-3, single spin
    rho_n: Optional[float] = None  # ohm m
    xi: float = 0.5

    def __post_init__(self):
        if not self.Tc > 0:
            raise DomainError(f"{self.name}: Tc must be positive")
        if not self.Delta > 0:
            raise DomainError(f"{self.name}: Delta must be positive")
        if self.N0 is not None and not self.N0 > 0:
            raise DomainError(f"{self.name}: N0 must be positive")
        if self.rho_n is not None and not self.rho_n > 0:
            raise DomainError(f"{self.name}: rho_n must be positive")
        if not 0 < self.xi <= 1:
            raise DomainError(f"{self.name}: xi must lie in (0, 1]")

    @property
    def delta_J(self):
        return self.Delta * const.eV

    @property
    def N0_SI(self):
        """Density of states in J^-1 m^-3."""
        if self.N0 is None:
            raise IncompleteMaterialError(f"{self.name}: density of states N0 not set")
        return self.N0 / (const.eV * const.um3)

    @property
    def gap_frequency(self):
        """2 Delta / h in Hz."""
        return 2 * self.delta_J / const.h

    def with_rho_n(self, rho_n):
        return dataclasses.replace(self, rho_n=rho_n)

    def _rho(self):
        if self.rho_n is None:
            raise IncompleteMaterialError(
                f"{self.name}: normal-state resistivity rho_n is required here; "
                "supply it with Material.with_rho_n() or in the config"
            )
        return self.rho_n


@dataclass(frozen=True)
class NanowireGeometry:
    w: float  # m
    l: float  # m
    t: float  # m

    def __post_init__(self):
        for name in ("w", "l", "t"):
            if not getattr(self, name) > 0:
                raise DomainError(f"nanowire {name} must be positive")

    @property
    def volume(self):
        return self.w * self.l * self.t

    @property
    def squares(self):
        return self.l / self.w


def _bcs_tc(delta_eV):
    return delta_eV * const.eV / (BCS_RATIO * const.k_B)


def _delta_from_gap_frequency(f_gap):
    return const.h * f_gap / 2 / const.eV


# Thin-film values. TiN and NbN carry the quoted N0 and Delta; their Tc is the
# BCS estimate from Delta. NbTiN (Tc ~ 15 K, gap near 1.4 THz) and Al (gap
# 90 GHz, Tc 1.2 K) have no N0 here, so volume-based estimates refuse them.
# rho_n is never shipped: typical films are ~100-200 uOhm cm (TiN, NbN,
# NbTiN) and ~1 uOhm cm (Al), but the value must come from the user.
BUILTIN = {
    "TiN": Material("TiN", Tc=_bcs_tc(0.5e-3), Delta=0.5e-3, N0=8.7e9),
    "NbN": Material("NbN", Tc=_bcs_tc(1.1e-3), Delta=1.1e-3, N0=2e10),
    "NbTiN": Material("NbTiN", Tc=15.0, Delta=_delta_from_gap_frequency(1.4e12)),
    "Al": Material("Al", Tc=1.2, Delta=_delta_from_gap_frequency(90e9)),
}

CONFIG_FIELDS = {
    "name": None,
    "Tc_K": 1.0,
    "Delta_meV": 1e-3,
    "N0_per_eV_um3": 1.0,
    "rho_n_uohm_cm": 1e-8,
    "xi": 1.0,
}


def material_from_config(record):
    """Build a Material from a config record in lab units.

    Keys: ``name``, ``Delta_meV``, ``Tc_K``, optional ``N0_per_eV_um3``,
    ``rho_n_uohm_cm`` and ``xi``. A record may also name a built-in via
    ``base`` and override some of its fields.
    """
    unknown = set(record) - set(CONFIG_FIELDS) - {"base"}
    if unknown:
        raise DomainError(f"unknown material fields: {sorted(unknown)}")
    if "base" in record:
        base = BUILTIN.get(record["base"])
        if base is None:
            raise RegistryError(
                f"unknown base material {record['base']!r}; available: {sorted(BUILTIN)}"
            )
        fields = dataclasses.asdict(base)
    else:
        fields = {"N0": None, "rho_n": None, "xi": 0.5}
        if "Delta_meV" not in record:
            raise DomainError(f"material {record.get('name')!r}: Delta_meV is required")
    if "name" not in record:
        raise DomainError("material record needs a name")
    fields["name"] = record["name"]
    if "Delta_meV" in record:
        fields["Delta"] = record["Delta_meV"] * CONFIG_FIELDS["Delta_meV"]
    if "Tc_K" in record:
        fields["Tc"] = float(record["Tc_K"])
    elif "Tc" not in fields:
        fields["Tc"] = _bcs_tc(fields["Delta"])
    if "N0_per_eV_um3" in record:
        fields["N0"] = float(record["N0_per_eV_um3"])
    if "rho_n_uohm_cm" in record:
        fields["rho_n"] = record["rho_n_uohm_cm"] * CONFIG_FIELDS["rho_n_uohm_cm"]
    if "xi" in record:
        fields["xi"] = float(record["xi"])
    return Material(**fields)


class MaterialRegistry(Mapping):
    """Read-only name -> Material lookup, built-ins plus config additions."""

    def __init__(self, extra=()):
        self._items = dict(BUILTIN)
        for m in extra:
            self._items[m.name] = m

    def __getitem__(self, name):
        try:
            return self._items[name]
        except KeyError:
            raise RegistryError(
                f"unknown material {name!r}; available: {', '.join(sorted(self._items))}"
            ) from None

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)


def istar(material, geometry):
    """Characteristic current I_* = sqrt(pi N0 Delta^3 / (hbar rho_n)) w t."""
    jstar = math.sqrt(math.pi * material.N0_SI * material.delta_J**3 / (const.hbar * material._rho()))
    return jstar * geometry.w * geometry.t


def sheet_inductance(material, t):
    """Kinetic sheet inductance hbar R_s / (pi Delta), R_s = rho_n / t (H per square)."""
    if not t > 0:
        raise DomainError("film thickness must be positive")
    return const.hbar * material._rho() / (math.pi * material.delta_J * t)


def nanowire_lumped(material, geometry):
    """(L0k, I_*) of a nanowire, taking its inductance as purely kinetic."""
    L0k = sheet_inductance(material, geometry.t) * geometry.squares
    return L0k, istar(material, geometry)


def alpha_volume(material, f_r, V):
    """Relative anharmonicity 3 h f_r / (2 N0 Delta^2 V) of a nanowire of volume V."""
    if not (f_r > 0 and V > 0):
        raise DomainError("f_r and V must be positive")
    return 3 * const.h * f_r / (2 * material.N0_SI * material.delta_J**2 * V)


def qp_thermal_factor(material, T, convention="pair"):
    """Thermal quasiparticle suppression factor at temperature T.

    ``"pair"`` gives exp(-2 Delta / k_B T); ``"boltzmann"`` gives the
    single-quasiparticle form exp(-Delta / k_B T).
    """
    if not T > 0:
        raise DomainError("temperature must be positive")
    n = {"pair": 2.0, "boltzmann": 1.0}.get(convention)
    if n is None:
        raise DomainError(f"unknown convention {convention!r}")
    return math.exp(-n * material.delta_J / (const.k_B * T))


def qp_per_phonon(material, nu):
    """Mean quasiparticles from one absorbed phonon of frequency nu: xi h nu / Delta."""
    energy = const.h * nu
    if energy < 2 * material.delta_J:
        warnings.warn(
            f"h nu = {energy / const.meV:.3g} meV is below the pair-breaking threshold "
            f"2 Delta = {2 * material.Delta * 1e3:.3g} meV",
            ValidityWarning,
            stacklevel=2,
        )
    return material.xi * energy / material.delta_J


def recombination_scaling(Tc_ref, Tc):
    """Relative quasiparticle recombination-rate factor (Tc / Tc_ref)^-3."""
    if not (Tc_ref > 0 and Tc > 0):
        raise DomainError("critical temperatures must be positive")
    return (Tc / Tc_ref) ** -3
