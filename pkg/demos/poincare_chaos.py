"""Stroboscopic sections of the parametrically driven pendulum.

A weak drive leaves the section on smooth curves; a strong one scatters
points over a wide band of phase space.  The box-counting occupancy makes
that difference a number.

    python demos/poincare_chaos.py
"""

import numpy as np

from cqed_tongues.dynamics import PendulumParams, chaos_indicator, initial_ensemble, poincare_ensemble, poincare_section
from cqed_tongues.mathieu import OscState

init = OscState(1.0, 2.5)
sections = {}
for eps in (0.1, 0.5, 1.0, 2.0):
    sec = poincare_section(PendulumParams(1.0, eps), init, 2000)
    sections[eps] = sec
    print(f"epsilon={eps:<4} occupancy {chaos_indicator(sec, 64):.4f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, eps in zip(axes, (0.1, 2.0)):
    for sec in poincare_ensemble(PendulumParams(1.0, eps), initial_ensemble(12), 400, workers=2):
        ax.plot(*sec.points.T, ",")
    ax.set_title(f"epsilon = {eps}")
    ax.set_xlabel("x")
    ax.set_xlim(-np.pi, np.pi)
axes[0].set_ylabel("v")
fig.tight_layout()
fig.savefig("poincare.png", dpi=120)
