"""Cooper pair box, split-CPB and transmon spectra in the charge basis.

Energies are in GHz (that is, E/h in GHz) throughout.  The charge-basis
Hamiltonian is

    H = 4 E_C (n - N_g)^2 - (E_J* / 2) sum_n (|n><n+1| + h.c.),

with ``E_J*`` the flux-tuned Josephson energy of a two-junction loop.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import constants
from ._parallel import ordered_map
from .mathieu import MathieuParams, char_pair, char_value
from .tridiag import bisect_lowest, ql_eigenvalues

__all__ = [
    "CircuitParams",
    "CapacitanceSpec",
    "Spectrum",
    "effective_ej",
    "charging_energy",
    "plasma_frequency",
    "hamiltonian_matrix",
    "hamiltonian_tridiagonal",
    "eigensolve",
    "spectrum_sweep",
    "charge_dispersion",
    "to_mathieu",
    "k_index",
    "mathieu_order",
    "band_energy_mathieu",
]


def _min_cutoff(n_g):
    return max(int(math.ceil(10 * abs(n_g))), 10)


@dataclass(frozen=True)
class CircuitParams:
    """Tunable Josephson device.

    Parameters
    ----------
    E_C, E_J_sigma : float
        Charging energy and total Josephson energy, GHz.
    d : float
        Junction asymmetry, ``|d| <= 1``.
    N_g : float
        Dimensionless gate charge.
    delta_flux : float
        Loop phase offset from external flux, radians.
    charge_cutoff : int, optional
        Charge states ``-cutoff..cutoff`` are kept.  Defaults to
        ``max(20, ceil(10 |N_g|))``.
    """

    E_C: float
    E_J_sigma: float
    d: float = 0.0
    N_g: float = 0.0
    delta_flux: float = 0.0
    charge_cutoff: int = None

    def __post_init__(self):
        if not self.E_C > 0:
            raise ValueError(f"E_C must be > 0, got {self.E_C}")
        if not self.E_J_sigma >= 0:
            raise ValueError(f"E_J_sigma must be >= 0, got {self.E_J_sigma}")
        if not abs(self.d) <= 1:
            raise ValueError(f"asymmetry d must satisfy |d| <= 1, got {self.d}")
        for name in ("N_g", "delta_flux"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.charge_cutoff is None:
            object.__setattr__(self, "charge_cutoff", max(20, _min_cutoff(self.N_g)))
        if int(self.charge_cutoff) != self.charge_cutoff or self.charge_cutoff < _min_cutoff(self.N_g):
            raise ValueError(
                f"charge_cutoff must be an integer >= max(10|N_g|, 10) = {_min_cutoff(self.N_g)}, "
                f"got {self.charge_cutoff}"
            )
        object.__setattr__(self, "charge_cutoff", int(self.charge_cutoff))

    @property
    def E_J(self):
        """Flux-tuned Josephson energy ``E_J*``."""
        return effective_ej(self.E_J_sigma, self.d, self.delta_flux)

    @property
    def basis_dim(self):
        return 2 * self.charge_cutoff + 1

    def with_(self, **changes):
        """Copy with fields replaced; the cutoff is re-derived unless given."""
        if "N_g" in changes and "charge_cutoff" not in changes:
            changes["charge_cutoff"] = max(self.charge_cutoff, _min_cutoff(changes["N_g"]))
        return replace(self, **changes)


@dataclass(frozen=True)
class CapacitanceSpec:
    """Island capacitances in farads.

    ``convention="eq1"`` uses ``E_C = e^2 / (2 C_sigma)``; ``"eq6"`` uses
    ``E_C = 2 e^2 / (2 C_sigma)``, twice as large.  ``eq1`` is the default.
    """

    C_g: float
    C_j: float
    convention: str = "eq1"

    def __post_init__(self):
        if not (self.C_g > 0 and self.C_j > 0):
            raise ValueError("capacitances must be positive")
        if self.convention not in ("eq1", "eq6"):
            raise ValueError(f"convention must be 'eq1' or 'eq6', got {self.convention!r}")

    @property
    def C_sigma(self):
        return self.C_g + self.C_j


@dataclass(frozen=True)
class Spectrum:
    params: CircuitParams
    eigenvalues: np.ndarray
    basis_dim: int


def effective_ej(E_J_sigma, d, delta_flux):
    """``E_J* = E_JSigma |cos(delta/2)| sqrt(1 + d^2 tan^2(delta/2))``.

    Evaluated as ``E_JSigma sqrt(cos^2 + d^2 sin^2)`` so that ``delta = pi``
    gives the limit ``E_JSigma |d|`` without special casing.
    """
    if abs(d) > 1:
        raise ValueError(f"|d| must be <= 1, got {d}")
    half = 0.5 * delta_flux
    return E_J_sigma * math.sqrt(math.cos(half) ** 2 + (d * math.sin(half)) ** 2)


def charging_energy(spec):
    """Charging energy in GHz for a :class:`CapacitanceSpec`."""
    factor = 1.0 if spec.convention == "eq1" else 2.0
    joules = factor * constants.E_CHARGE**2 / (2.0 * spec.C_sigma)
    return constants.joules_to_ghz(joules)


def plasma_frequency(params):
    """Small-oscillation frequency ``sqrt(8 E_J* E_C)`` in GHz (as E/h).

    This is the square-root form; ``8 E_J E_C / hbar^2`` without the root is
    an energy squared and is not used.
    """
    return math.sqrt(8.0 * params.E_J * params.E_C)


def hamiltonian_tridiagonal(params):
    """Diagonal and off-diagonal of the charge-basis Hamiltonian."""
    n = np.arange(-params.charge_cutoff, params.charge_cutoff + 1, dtype=float)
    diag = 4.0 * params.E_C * (n - params.N_g) ** 2
    off = np.full(n.size - 1, -0.5 * params.E_J)
    return diag, off


def hamiltonian_matrix(params):
    """Dense symmetric charge-basis Hamiltonian, states ordered ``n = -cutoff..cutoff``."""
    diag, off = hamiltonian_tridiagonal(params)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def eigensolve(params, levels=None):
    """Spectrum of the charge-basis Hamiltonian.

    With ``levels=None`` the full spectrum comes from implicit-shift QL;
    otherwise only the lowest ``levels`` eigenvalues are found by bisection.
    """
    diag, off = hamiltonian_tridiagonal(params)
    if levels is None:
        evals = ql_eigenvalues(diag, off)
    else:
        evals = bisect_lowest(diag, off, levels)
    return Spectrum(params, evals, params.basis_dim)


def _sweep_point(args):
    params, levels = args
    return eigensolve(params, levels)


def spectrum_sweep(params, axis, grid, levels=None, workers=1):
    """One :class:`Spectrum` per grid value of ``axis`` (``"N_g"`` or ``"delta_flux"``).

    Results are ordered by grid index whatever the worker count.
    """
    if axis not in ("N_g", "delta_flux"):
        raise ValueError(f"axis must be 'N_g' or 'delta_flux', got {axis!r}")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    points = [(params.with_(**{axis: float(g)}), levels) for g in grid]
    return ordered_map(_sweep_point, points, workers)


def charge_dispersion(params, m=0, n_points=51):
    """Peak-to-peak variation of level ``m`` over ``N_g`` in ``[0, 1]``."""
    if not 0 <= m < params.basis_dim:
        raise ValueError(f"level {m} outside basis of dimension {params.basis_dim}")
    levels = [eigensolve(params.with_(N_g=float(g)), m + 1).eigenvalues[m] for g in np.linspace(0.0, 1.0, n_points)]
    return float(np.max(levels) - np.min(levels))


def to_mathieu(params, E_k):
    """Mathieu oscillator ``f'' + (4 E_k/E_C + (E_J*/E_C) cos 2t) f = 0``."""
    return MathieuParams(delta=4.0 * E_k / params.E_C, epsilon=params.E_J / params.E_C, omega=2.0, gamma=0.0)


def _round_half_away(x):
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def k_index(m, N_g):
    """Integer offset ``k(m, N_g)`` selecting the Mathieu order of band ``m``.

    ``k = sum_{l=+-1} [int(2 N_g + l/2) mod 2] * (int(N_g) + l (-1)^m [(m+1)/2])``
    with ``int`` rounding half away from zero and ``[(m+1)/2]`` floor division.
    """
    if m < 0:
        raise ValueError("band index must be >= 0")
    total = 0
    for ell in (1, -1):
        parity = _round_half_away(2.0 * N_g + 0.5 * ell) % 2
        total += parity * (_round_half_away(N_g) + ell * (-1) ** m * ((m + 1) // 2))
    return total


def _fold_gate_charge(N_g):
    # spectrum is periodic in N_g with period 1 and even in N_g
    g = abs(N_g - math.floor(N_g + 0.5))
    return min(g, 0.5)


def mathieu_order(m, N_g):
    """Mathieu order ``nu = 2 (N_g + k(m, N_g))`` for band ``m``.

    ``N_g`` is first folded into ``[0, 1/2]`` using the spectrum's unit
    periodicity and parity; the offset formula reproduces the charge-basis
    band ordering on that interval.
    """
    g = _fold_gate_charge(N_g)
    return 2.0 * (g + k_index(m, g))


def band_energy_mathieu(m, N_g, params):
    """Level ``m`` at gate charge ``N_g`` from Mathieu characteristic values.

    ``E_m = E_C a_nu(q)`` with ``q = -E_J* / (2 E_C)`` and ``nu`` from
    :func:`mathieu_order`.  At the degeneracy points ``N_g`` integer or
    half-integer the order is an integer and the level is the matching
    even or odd value: ``a_0, b_2, a_2, b_4, ...`` at integer ``N_g``, and
    ``a_1, b_1, a_3, b_3, ...`` (swapped for ``q > 0``) at half-integer.
    """
    q = -params.E_J / (2.0 * params.E_C)
    g = _fold_gate_charge(N_g)
    tol = 1e-12
    if g < tol:
        if m == 0:
            value = char_value(0, q).value
        else:
            n = m + 1 if m % 2 else m
            a, b = char_pair(n, q)
            value = (b if m % 2 else a).value
    elif g > 0.5 - tol:
        n = m + 1 if m % 2 == 0 else m
        a, b = char_pair(n, q)
        lower, upper = (a, b) if q < 0 else (b, a)
        value = (lower if m % 2 == 0 else upper).value
    else:
        value = char_value(mathieu_order(m, g), q).value
    return params.E_C * value
