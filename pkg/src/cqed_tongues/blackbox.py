"""Black-box quantization of a series chain of parallel RLC blocks.

The network impedance is ``Z(w) = sum_j 1 / y_j(w)`` with block admittances
``y_j = i w C_j + 1/(i w L_j) + 1/R_j``, and ``Y = 1/Z``.  For a lossless
chain every block resonance ``w_j = 1/sqrt(L_j C_j)`` is a pole of ``Z`` and
therefore a zero of ``Y``; these zeros are the normal modes.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import circuits, constants

__all__ = [
    "RlcBranch",
    "RlcNetwork",
    "Mode",
    "ModeSet",
    "CqedParams",
    "EffectiveHamiltonian",
    "SingularityError",
    "ModeFindingError",
    "admittance",
    "admittance_derivative",
    "admittance_scan",
    "find_modes",
    "mode_operators",
    "effective_hamiltonian",
    "josephson_remainder",
    "cqed_hamiltonian",
    "cqed_spectrum",
    "coupling_strength",
    "parse_netlist",
    "load_netlist",
]

MAX_CQED_DIM = 20000


class SingularityError(ZeroDivisionError):
    """Admittance requested exactly at a lossless block resonance."""


class ModeFindingError(RuntimeError):
    def __init__(self, message, intervals):
        super().__init__(f"{message}; scanned intervals: {intervals}")
        self.intervals = intervals


@dataclass(frozen=True)
class RlcBranch:
    C_star: float
    L_star: float
    R_star: float = math.inf

    def __post_init__(self):
        if not (self.C_star > 0 and self.L_star > 0):
            raise ValueError("branch capacitance and inductance must be positive")
        if not self.R_star > 0:
            raise ValueError("branch resistance must be positive or infinite")

    @property
    def lossless(self):
        return math.isinf(self.R_star)

    @property
    def resonance(self):
        return 1.0 / math.sqrt(self.L_star * self.C_star)

    @property
    def characteristic_impedance(self):
        return math.sqrt(self.L_star / self.C_star)

    def admittance(self, omega):
        y = 1j * omega * self.C_star + 1.0 / (1j * omega * self.L_star)
        if not self.lossless:
            y += 1.0 / self.R_star
        return y

    def admittance_derivative(self, omega):
        return 1j * self.C_star + 1j / (omega**2 * self.L_star)


@dataclass(frozen=True)
class RlcNetwork:
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("network needs at least one branch")
        w = sorted(b.resonance for b in self.branches)
        for lo, hi in zip(w, w[1:]):
            if (hi - lo) <= 1e-6 * hi:
                raise ValueError(f"branch resonances {lo:.9e} and {hi:.9e} are not distinct")

    @property
    def lossless(self):
        return all(b.lossless for b in self.branches)


def _block_admittances(net, omega):
    return np.array([b.admittance(omega) for b in net.branches])


def admittance(net, omega):
    """Network admittance ``Y(omega)`` in siemens.

    Raises
    ------
    SingularityError
        If a lossless block is exactly at resonance (a pole of ``Z``).
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    y = _block_admittances(net, omega)
    if np.any(y == 0):
        raise SingularityError(f"omega={omega!r} is a lossless resonance of the network")
    return 1.0 / np.sum(1.0 / y)


def _ratio_terms(y):
    # Y / y_k = 1 / (1 + y_k * sum_{l != k} 1/y_l), finite when y_k -> 0
    inv = 1.0 / y
    total = inv.sum()
    return 1.0 / (1.0 + y * (total - inv))


def admittance_derivative(net, omega):
    """Analytic ``dY/domega`` from ``Y' = sum_k y_k' (Y / y_k)^2``.

    Well defined at lossless block resonances, where ``Y' = y_j'``.
    """
    y = _block_admittances(net, omega)
    dy = np.array([b.admittance_derivative(omega) for b in net.branches])
    zero = y == 0
    if np.any(zero):
        return complex(dy[zero][0])
    return complex(np.sum(dy * _ratio_terms(y) ** 2))


def _susceptance(net, omega):
    y = _block_admittances(net, omega)
    if np.any(y == 0):
        return 0.0
    return float((1.0 / np.sum(1.0 / y)).imag)


def _reactance(net, omega):
    y = _block_admittances(net, omega)
    return float(np.sum(1.0 / y).imag)


@dataclass(frozen=True)
class Mode:
    omega: float
    z_eff: float
    z_eff_fd: float = math.nan

    def __iter__(self):
        # unpack as (omega, z_eff)
        return iter((self.omega, self.z_eff))


@dataclass(frozen=True)
class ModeSet:
    modes: tuple
    source: RlcNetwork = field(repr=False, default=None)

    def __len__(self):
        return len(self.modes)

    @property
    def omegas(self):
        return np.array([m.omega for m in self.modes])

    @property
    def z_effs(self):
        return np.array([m.z_eff for m in self.modes])


_NUDGE = 1e-9
_FD_STEP = 1e-6


def find_modes(net):
    """Normal modes of a lossless network.

    Between consecutive zeros of ``Z`` (poles of ``Y``) the susceptance
    ``Im Y`` rises monotonically from ``-inf`` to ``+inf`` (Foster), so each
    such interval holds exactly one mode, located by Brent's method.  The
    zeros of ``Z`` are themselves bracketed between consecutive block
    resonances.  ``z_eff = 2 / (omega Im Y'(omega))`` uses the analytic
    derivative; a central difference with step ``1e-6 omega`` is stored
    alongside as a cross-check.

    Raises
    ------
    ModeFindingError
        If an interval fails to show the expected sign change.
    """
    if not net.lossless:
        raise ValueError("mode extraction requires a lossless network (R* infinite)")
    w = sorted(b.resonance for b in net.branches)
    scanned = []

    # zeros of Z: one between each pair of adjacent block resonances
    z_zeros = [0.0]
    for lo, hi in zip(w, w[1:]):
        a, b = lo * (1 + _NUDGE), hi * (1 - _NUDGE)
        scanned.append(("Z", a, b))
        fa, fb = _reactance(net, a), _reactance(net, b)
        if not (fa < 0 < fb):
            raise ModeFindingError("no reactance zero between adjacent resonances", scanned)
        z_zeros.append(brentq(lambda x: _reactance(net, x), a, b, xtol=1e-15 * hi, rtol=8.9e-16, maxiter=500))
    z_zeros.append(math.inf)

    modes = []
    for j, (lo, hi) in enumerate(zip(z_zeros, z_zeros[1:])):
        a = lo * (1 + _NUDGE) if lo > 0 else w[j] * 1e-3
        b = hi * (1 - _NUDGE) if math.isfinite(hi) else w[j] * 1e3
        scanned.append(("Y", a, b))
        fa, fb = _susceptance(net, a), _susceptance(net, b)
        if not (fa < 0 < fb):
            raise ModeFindingError("susceptance does not change sign", scanned)
        root = brentq(lambda x: _susceptance(net, x), a, b, xtol=1e-15 * w[j], rtol=8.9e-16, maxiter=500)
        modes.append(_make_mode(net, root))
    return ModeSet(tuple(modes), net)


def _make_mode(net, omega):
    dy = admittance_derivative(net, omega).imag
    h = _FD_STEP * omega
    dy_fd = (_susceptance(net, omega + h) - _susceptance(net, omega - h)) / (2.0 * h)
    return Mode(omega, 2.0 / (omega * dy), 2.0 / (omega * dy_fd))


def mode_operators(mode):
    """Zero-point flux and charge scales ``(phi_zpf, q_zpf)`` in Wb and C.

    ``phi = phi_zpf (a + a^dag)`` and ``q = -i q_zpf (a - a^dag)`` with
    ``phi_zpf = sqrt(hbar z_eff / 2)``, ``q_zpf = sqrt(hbar / (2 z_eff))``.
    """
    _, z = mode
    if not z > 0:
        raise ValueError("effective impedance must be positive")
    return math.sqrt(constants.HBAR * z / 2.0), math.sqrt(constants.HBAR / (2.0 * z))


def admittance_scan(net, omega_grid):
    """Rows ``(omega, Re Y, Im Y)`` over ``omega_grid`` as an ``(n, 3)`` array."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    out = np.empty((omega_grid.size, 3))
    for i, w in enumerate(omega_grid):
        y = admittance(net, float(w))
        out[i] = (w, y.real, y.imag)
    return out


def josephson_remainder(phi, E_J):
    """Nonlinear part of the junction, ``-E_J (cos phi + phi^2/2 - 1)``.

    The quadratic part is already in the linear modes; the constant is chosen
    so the remainder vanishes at ``phi = 0``.  Leading term ``-E_J phi^4 / 24``.
    """
    phi = np.asarray(phi, dtype=float)
    # 1 - cos(phi) = 2 sin^2(phi/2) keeps small-phi values accurate
    return -E_J * (0.5 * phi**2 - 2.0 * np.sin(0.5 * phi) ** 2)


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Terms of ``sum_j hbar w_j a_j^dag a_j - E_J (cos phi + phi^2/2 - 1)``.

    ``phi = sum_j phase_zpf[j] (a_j + a_j^dag)`` is the junction phase in
    radians.  Energies are E/h in GHz.
    """

    mode_energies: np.ndarray
    phase_zpf: np.ndarray
    E_J: float
    quartic: np.ndarray = None

    @property
    def terms(self):
        out = [("linear", j, float(e)) for j, e in enumerate(self.mode_energies)]
        if self.E_J != 0:
            out.append(("josephson_remainder", None, self.E_J))
        if self.quartic is not None and self.E_J != 0:
            out.append(("quartic", None, self.quartic))
        return out

    def remainder(self, phi):
        return josephson_remainder(phi, self.E_J)

    def quartic_prefactor(self, j):
        """Coefficient of ``(a_j + a_j^dag)^4`` in the single-mode quartic term."""
        return -self.E_J / 24.0 * self.phase_zpf[j] ** 4


def effective_hamiltonian(modes, E_J, quartic=False):
    """Assemble the effective Hamiltonian for a :class:`ModeSet`.

    With ``quartic=True`` the remainder is also expanded to fourth order:
    ``quartic[i, j, k, l] = -E_J/24 * p_i p_j p_k p_l`` multiplies
    ``(a_i + a_i^dag)(a_j + a_j^dag)(a_k + a_k^dag)(a_l + a_l^dag)``.
    """
    if len(modes) == 0:
        raise ValueError("mode set is empty")
    energies = np.array([constants.angular_to_ghz(m.omega) for m in modes.modes])
    p = np.array([mode_operators(m)[0] / constants.REDUCED_FLUX_QUANTUM for m in modes.modes])
    q4 = None
    if quartic:
        q4 = -E_J / 24.0 * np.einsum("i,j,k,l->ijkl", p, p, p, p)
    return EffectiveHamiltonian(energies, p, float(E_J), q4)


@dataclass(frozen=True)
class CqedParams:
    """Transmon/CPB coupled to one resonator mode.

    ``omega_r`` in rad/s, ``C_r`` in farads, ``beta = C_g / C_Sigma``.
    """

    circuit: circuits.CircuitParams
    omega_r: float
    C_r: float
    beta: float
    fock_cutoff: int = 8

    def __post_init__(self):
        if not self.omega_r > 0 or not self.C_r > 0:
            raise ValueError("omega_r and C_r must be positive")
        if not 0 <= self.beta < 1:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be an integer >= 1")

    @property
    def v_rms(self):
        return math.sqrt(constants.HBAR * self.omega_r / (2.0 * self.C_r))

    @property
    def dim(self):
        return self.circuit.basis_dim * (self.fock_cutoff + 1)


def coupling_strength(p):
    """``2 beta e V_rms`` in GHz: prefactor of ``n (a + a^dag)``."""
    return constants.joules_to_ghz(2.0 * p.beta * constants.E_CHARGE * p.v_rms)


def cqed_hamiltonian(p):
    """Dense Hamiltonian in the charge (x) Fock product basis, GHz.

    ``H = 4E_C (n - N_g)^2 - E_J cos phi + hbar w_r a^dag a + 2 beta e V_rms n (a + a^dag)``;
    index ``i_charge * (fock_cutoff + 1) + i_fock``.
    """
    if p.dim > MAX_CQED_DIM:
        raise ValueError(f"product basis dimension {p.dim} exceeds {MAX_CQED_DIM}")
    h_q = circuits.hamiltonian_matrix(p.circuit)
    nf = p.fock_cutoff + 1
    number = np.diag(np.arange(nf, dtype=float))
    a = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1)
    n_op = np.diag(np.arange(-p.circuit.charge_cutoff, p.circuit.charge_cutoff + 1, dtype=float))
    h = np.kron(h_q, np.eye(nf))
    h += np.kron(np.eye(p.circuit.basis_dim), constants.angular_to_ghz(p.omega_r) * number)
    h += coupling_strength(p) * np.kron(n_op, a + a.T)
    return h


def cqed_spectrum(p, levels=None):
    evals = np.linalg.eigvalsh(cqed_hamiltonian(p))
    return evals if levels is None else evals[:levels]


def parse_netlist(text):
    """Branches from netlist text: one ``C=<F> L=<H> [R=<ohm>]`` per line, ``#`` comments."""
    branches = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        values = {}
        for token in line.split():
            key, sep, val = token.partition("=")
            key = key.strip().upper()
            if not sep or key not in ("C", "L", "R") or key in values:
                raise ValueError(f"netlist line {lineno}: bad token {token!r}")
            try:
                values[key] = float(val)
            except ValueError:
                raise ValueError(f"netlist line {lineno}: {val!r} is not a number") from None
        if "C" not in values or "L" not in values:
            raise ValueError(f"netlist line {lineno}: C and L are required")
        try:
            branches.append(RlcBranch(values["C"], values["L"], values.get("R", math.inf)))
        except ValueError as exc:
            raise ValueError(f"netlist line {lineno}: {exc}") from None
    return RlcNetwork(tuple(branches))


def load_netlist(path):
    with open(path) as fh:
        return parse_netlist(fh.read())
