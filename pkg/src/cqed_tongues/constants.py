"""CODATA 2018 exact SI constants and unit helpers.

Energies inside the package are expressed as E/h in GHz.
"""

import math

E_CHARGE = 1.602176634e-19  # C
PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * math.pi)
FLUX_QUANTUM = PLANCK / (2.0 * E_CHARGE)  # h / 2e, Wb
REDUCED_FLUX_QUANTUM = HBAR / (2.0 * E_CHARGE)  # hbar / 2e, Wb


def joules_to_ghz(energy):
    return energy / PLANCK / 1e9


def ghz_to_joules(energy):
    return energy * PLANCK * 1e9


def angular_to_ghz(omega):
    """hbar * omega expressed as E/h in GHz."""
    return omega / (2.0 * math.pi) / 1e9
