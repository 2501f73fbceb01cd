"""Parametric resonance and spectra of superconducting circuits.

Submodules
----------
mathieu
    Damped Mathieu oscillator, Floquet analysis, characteristic values.
circuits
    Cooper pair box and transmon spectra in the charge basis.
blackbox
    Modes and effective Hamiltonians of linear networks with a junction.
stability
    Stability charts, tongue boundaries and Monte Carlo fabrication scans.
dynamics
    Driven pendulum trajectories and stroboscopic sections.
"""

__version__ = "0.1.0"
