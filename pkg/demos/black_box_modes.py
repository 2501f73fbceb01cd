"""Modes of a lossless multi-branch network and the transmon-resonator spectrum.

Reads a netlist, locates the admittance zeros, and compares each mode's
effective impedance with the branch characteristic impedance it should
reduce to.  Then the qubit-resonator levels are printed for increasing
coupling to show the avoided crossing opening up.

    python demos/black_box_modes.py
"""

from pathlib import Path

import numpy as np

from cqed_tongues.blackbox import CqedParams, coupling_strength, cqed_spectrum, find_modes, load_netlist
from cqed_tongues.circuits import CircuitParams, eigensolve
from cqed_tongues.constants import angular_to_ghz

net = load_netlist(Path(__file__).parent / "configs" / "three_mode.net")
modes = find_modes(net)
ref = sorted((b.resonance, b.characteristic_impedance) for b in net.branches)
for k, (m, (w, z)) in enumerate(zip(modes.modes, ref)):
    print(f"mode {k}: {angular_to_ghz(m.omega):8.4f} GHz  z_eff {m.z_eff:9.4f} ohm  "
          f"(branch {z:9.4f} ohm, difference quotient {m.z_eff_fd:9.4f})")

# qubit transition tuned near the resonator
qubit = CircuitParams(0.3, 15.0, charge_cutoff=10)
ev = eigensolve(qubit).eigenvalues
omega_r = 2 * np.pi * (ev[1] - ev[0]) * 1e9 * 1.002
print(f"\nqubit 0-1 at {ev[1] - ev[0]:.4f} GHz, resonator at {angular_to_ghz(omega_r):.4f} GHz")
for beta in (0.0, 0.01, 0.03, 0.1):
    p = CqedParams(qubit, omega_r, 400e-15, beta, fock_cutoff=4)
    levels = cqed_spectrum(p, 3)
    print(f"beta={beta:<5} g={coupling_strength(p):.4f} GHz  first-excited splitting {levels[2] - levels[1]:.4f} GHz")
