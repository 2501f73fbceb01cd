"""Charge bands of a Cooper pair box as E_J/E_C grows.

The charge-basis eigensolver and the closed-form Mathieu band expression
are evaluated side by side; the ground band flattens exponentially, which
is the point of operating in the transmon regime.

    python demos/transmon_bands.py
"""

import numpy as np

from cqed_tongues.circuits import CircuitParams, band_energy_mathieu, charge_dispersion, eigensolve

gates = np.linspace(0, 1, 41)

for ratio in (0.2, 1, 5, 10, 50):
    p = CircuitParams(1.0, ratio)
    worst = 0.0
    for g in gates:
        q = p.with_(N_g=float(g))
        ev = eigensolve(q, 3).eigenvalues
        for m in range(3):
            worst = max(worst, abs(band_energy_mathieu(m, float(g), q) - ev[m]) / max(abs(ev[m]), 1e-12))
    print(f"E_J/E_C = {ratio:>4}: ground-band dispersion {charge_dispersion(p):.3e} E_C, "
          f"worst band mismatch {worst:.1e}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, axes = plt.subplots(1, 3, figsize=(11, 3.5))
for ax, ratio in zip(axes, (1, 5, 50)):
    p = CircuitParams(1.0, ratio)
    bands = np.array([eigensolve(p.with_(N_g=float(g)), 3).eigenvalues for g in gates])
    ax.plot(gates, bands - bands[:, :1].min())
    ax.set_title(f"E_J/E_C = {ratio}")
    ax.set_xlabel("N_g")
axes[0].set_ylabel("E / E_C")
fig.tight_layout()
fig.savefig("transmon_bands.png", dpi=120)
