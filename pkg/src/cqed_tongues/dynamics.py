"""Parametrically driven pendulum and its stroboscopic sections.

The equation of motion is

    x'' + gamma x' + (delta + epsilon cos(omega t)) sin x = 0,

whose small-angle limit is the damped Mathieu oscillator.  Sections sample
the trajectory at whole drive periods through the integrator's continuous
extension, so sample times carry no step-boundary error.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _ode
from ._parallel import ordered_map
from .io import write_csv
from .mathieu import IntegrationError, IntegratorControls, OscState, _run
from .rng import CounterStream

__all__ = [
    "PendulumParams",
    "PoincareSection",
    "integrate_pendulum",
    "pendulum_energy",
    "poincare_section",
    "poincare_ensemble",
    "initial_ensemble",
    "chaos_indicator",
    "wrap_angle",
    "write_sections_csv",
]


@dataclass(frozen=True)
class PendulumParams:
    delta: float
    epsilon: float
    omega: float = 2.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("delta", "epsilon", "omega", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def as_array(self):
        return np.array([self.delta, self.epsilon, self.omega, self.gamma], dtype=float)


@dataclass(frozen=True)
class PoincareSection:
    """Stroboscopic samples ``(x, v)`` at ``t = t0 + k T``, ``k = 0..n_drive_periods``.

    ``points[:, 0]`` is the angle wrapped into ``(-pi, pi]``.
    """

    points: np.ndarray
    times: np.ndarray
    period: float
    n_drive_periods: int
    initial: OscState

    def __len__(self):
        return self.points.shape[0]


def wrap_angle(x):
    """Map angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    return math.pi - np.mod(math.pi - x, 2.0 * math.pi)


def pendulum_energy(p, x, v):
    """``v^2/2 - delta cos x``, conserved when ``epsilon = gamma = 0``."""
    return 0.5 * np.asarray(v) ** 2 - p.delta * np.cos(x)


def integrate_pendulum(p, init, t_end, controls=IntegratorControls(), sample_times=None):
    """Integrate the driven pendulum; same conventions as :func:`mathieu.integrate`."""
    return _run(_ode.PENDULUM, p.as_array(), init, float(t_end), controls, sample_times)


def poincare_section(p, init, n_periods, controls=IntegratorControls()):
    """Sample the trajectory from ``init`` at every drive period.

    Raises
    ------
    IntegrationError
        If the integration fails or leaves the overflow guard.
    """
    if int(n_periods) != n_periods or n_periods < 0:
        raise ValueError(f"n_periods must be a non-negative integer, got {n_periods}")
    n_periods = int(n_periods)
    period = p.period
    times = init.t + period * np.arange(n_periods + 1)
    if n_periods == 0:
        pts = np.array([[float(wrap_angle(init.x)), init.v]])
        return PoincareSection(pts, times, period, 0, init)
    traj = integrate_pendulum(p, init, times[-1], controls, sample_times=times)
    if traj.overflowed:
        raise IntegrationError("pendulum trajectory left the overflow guard", traj.final)
    pts = np.column_stack([wrap_angle(traj.samples_x), traj.samples_v])
    return PoincareSection(pts, times, period, n_periods, init)


def initial_ensemble(n=16, seed=None, x_range=(0.1, math.pi - 0.1)):
    """Starting states on the line ``v = 0``.

    Without a seed the angles are evenly spaced over ``x_range``; with one
    they are drawn uniformly (one counter stream per state) and sorted.
    """
    if n < 1:
        raise ValueError("ensemble needs at least one state")
    lo, hi = x_range
    if seed is None:
        xs = np.linspace(lo, hi, n) if n > 1 else np.array([0.5 * (lo + hi)])
    else:
        xs = np.sort([lo + (hi - lo) * CounterStream(seed, k).uniform() for k in range(n)])
    return [OscState(float(x), 0.0) for x in xs]


def _section_task(args):
    p, init, n_periods, controls = args
    return poincare_section(p, init, n_periods, controls)


def poincare_ensemble(p, inits, n_periods, controls=IntegratorControls(), workers=1):
    """One section per starting state, in input order."""
    return ordered_map(_section_task, [(p, s, n_periods, controls) for s in inits], workers)


def chaos_indicator(section, box_count=64, v_max=None):
    """Fraction of phase-space boxes visited by the section points.

    The box grid is ``box_count x box_count`` over ``x in (-pi, pi]`` and
    ``v in [-v_max, v_max]``; by default ``v_max = 1.05 max|v|`` of the
    section.  Pass an explicit ``v_max`` to compare sections on a common grid.
    """
    if box_count < 8:
        raise ValueError("box_count must be >= 8")
    pts = np.asarray(section.points if isinstance(section, PoincareSection) else section, dtype=float)
    if pts.size == 0:
        raise ValueError("section is empty")
    x, v = pts[:, 0], pts[:, 1]
    if v_max is None:
        v_max = 1.05 * float(np.max(np.abs(v)))
        if v_max == 0.0:
            v_max = 1.0
    ix = np.clip(np.floor((x + math.pi) / (2.0 * math.pi) * box_count), 0, box_count - 1).astype(np.int64)
    iv = np.clip(np.floor((v + v_max) / (2.0 * v_max) * box_count), 0, box_count - 1).astype(np.int64)
    visited = np.unique(ix * box_count + iv)
    return visited.size / float(box_count * box_count)


def write_sections_csv(sections, path):
    """CSV ``traj_id,k,x,v`` ordered by trajectory then sample index."""

    def rows():
        for tid, sec in enumerate(sections):
            for k, (x, v) in enumerate(sec.points):
                yield (tid, k, float(x), float(v))

    write_csv(path, ["traj_id", "k", "x", "v"], rows())
