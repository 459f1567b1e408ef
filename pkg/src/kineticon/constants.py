"""Physical constants (CODATA 2018, SI exact values) shared by every module."""

import math

CONSTANTS_VERSION = "CODATA-2018"

h = 6.62607015e-34  # J s
hbar = h / (2 * math.pi)
e = 1.602176634e-19  # C, also J per eV
k_B = 1.380649e-23  # J / K
c = 299792458.0  # m / s

eV = e
meV = 1e-3 * eV
um3 = 1e-18  # m^3
