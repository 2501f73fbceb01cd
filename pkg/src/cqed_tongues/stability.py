"""Stability charts of the damped Mathieu oscillator.

A sweep classifies every cell of a ``(delta, epsilon)`` grid, either from
the monodromy spectrum, from a time-domain amplitude test, or both.  Cells
are independent; each result is written to its own pre-indexed slot, so the
output is the same for any worker count.
"""

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import _ode
from ._parallel import ordered_map
from .circuits import CircuitParams, to_mathieu
from .io import write_csv, write_pgm
from .mathieu import (
    MARGINAL,
    STABLE,
    UNSTABLE,
    ClassifyCriteria,
    IntegrationError,
    MathieuParams,
    label_from_matrix,
    label_from_result,
    monodromy,
)
from .rng import CounterStream

__all__ = [
    "SweepSpec",
    "StabilityGrid",
    "McSpec",
    "McResult",
    "sweep",
    "tongue_boundary",
    "fabrication_scan",
    "LABEL_CODES",
    "write_grid_csv",
    "write_grid_pgm",
    "write_boundary_csv",
    "write_mc_csv",
]

LABEL_CODES = {UNSTABLE: 0, STABLE: 1, MARGINAL: 2}
_PGM_UNSTABLE = 255
_PGM_STABLE = 170


def _check_range(name, rng):
    lo, hi, count = rng
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"{name} bounds must be finite")
    if int(count) != count or count < 1:
        raise ValueError(f"{name} count must be a positive integer, got {count}")
    if lo > hi:
        raise ValueError(f"{name} requires min <= max, got {lo} > {hi}")
    if count >= 2 and lo == hi:
        raise ValueError(f"{name} with several points needs min < max")
    if count == 1 and lo != hi:
        raise ValueError(f"{name} with one point needs min == max")
    return (float(lo), float(hi), int(count))


@dataclass(frozen=True)
class SweepSpec:
    """Grid and classifier settings for :func:`sweep`.

    Ranges are ``(min, max, count)`` with ``count`` evenly spaced points
    including both ends.  A single-point range ``(v, v, 1)`` pins that axis.
    """

    delta_range: tuple = (0.0, 6.0, 400)
    epsilon_range: tuple = (0.0, 3.0, 200)
    omega: float = 2.0
    gamma: float = 0.0
    method: str = "floquet"
    criteria: ClassifyCriteria = ClassifyCriteria()

    def __post_init__(self):
        object.__setattr__(self, "delta_range", _check_range("delta_range", self.delta_range))
        object.__setattr__(self, "epsilon_range", _check_range("epsilon_range", self.epsilon_range))
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.method not in ("floquet", "time_domain", "both"):
            raise ValueError(f"method must be floquet, time_domain or both, got {self.method!r}")

    @property
    def deltas(self):
        lo, hi, n = self.delta_range
        return np.linspace(lo, hi, n)

    @property
    def epsilons(self):
        lo, hi, n = self.epsilon_range
        return np.linspace(lo, hi, n)

    @property
    def shape(self):
        return (self.epsilon_range[2], self.delta_range[2])


@dataclass
class StabilityGrid:
    """Per-cell results, arrays of shape ``(n_epsilon, n_delta)``.

    ``labels`` holds the primary label: the Floquet label unless the sweep
    used the time-domain method alone.  ``growth_rate`` and
    ``max_amp_ratio`` are NaN where the corresponding method did not run.
    ``failed`` marks cells whose integration did not complete; those are
    labeled marginal.
    """

    spec: SweepSpec
    labels: np.ndarray
    growth_rate: np.ndarray
    max_amp_ratio: np.ndarray
    failed: np.ndarray
    floquet_labels: np.ndarray = None
    time_domain_labels: np.ndarray = None
    monodromy: np.ndarray = field(default=None, repr=False)

    @property
    def agree(self):
        """Cellwise agreement of the two classifiers (``method="both"`` only)."""
        if self.floquet_labels is None or self.time_domain_labels is None:
            raise ValueError("agreement needs a sweep with method='both'")
        return self.floquet_labels == self.time_domain_labels

    def agreement_fraction(self):
        """Fraction of non-marginal Floquet cells where both classifiers agree."""
        mask = (self.floquet_labels != MARGINAL) & ~self.failed
        return float(np.mean(self.agree[mask])) if mask.any() else 1.0

    def count(self, label=UNSTABLE):
        return int(np.sum(self.labels == label))

    def rows(self):
        """CSV rows ``(delta, epsilon, code, growth_rate, max_amp_ratio)``, epsilon-major."""
        d = self.spec.deltas
        e = self.spec.epsilons
        for i in range(e.size):
            for j in range(d.size):
                yield (
                    float(d[j]),
                    float(e[i]),
                    LABEL_CODES[self.labels[i, j]],
                    float(self.growth_rate[i, j]),
                    float(self.max_amp_ratio[i, j]),
                )


def _set_threads(workers):
    if workers is not None and workers >= 1:
        numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))


def _failed(status):
    return (status == _ode.STEP_UNDERFLOW) | (status == _ode.MAX_STEPS)


def sweep(spec, workers=1):
    """Classify every cell of ``spec``'s grid.

    Per-cell integration failures are recorded in ``StabilityGrid.failed``
    rather than raised.
    """
    _set_threads(workers)
    deltas = spec.deltas
    epsilons = spec.epsilons
    shape = spec.shape
    crit = spec.criteria
    ctl = crit.controls
    growth = np.full(shape, np.nan)
    ratio = np.full(shape, np.nan)
    failed = np.zeros(shape, dtype=bool)
    fl_labels = td_labels = mono = None

    if spec.method in ("floquet", "both"):
        out, status = _ode.sweep_monodromy(
            deltas, epsilons, spec.omega, spec.gamma, ctl.rtol, ctl.atol, ctl.max_steps
        )
        mono = out.reshape(shape + (2, 2))
        fl_labels = np.empty(shape, dtype=object)
        bad = _failed(status).reshape(shape)
        failed |= bad
        for i, eps in enumerate(epsilons):
            for j, delta in enumerate(deltas):
                if bad[i, j]:
                    fl_labels[i, j] = MARGINAL
                    continue
                params = MathieuParams(float(delta), float(eps), spec.omega, spec.gamma)
                label, res = label_from_matrix(params, mono[i, j], crit.marginal_tol)
                fl_labels[i, j] = label
                growth[i, j] = res.growth_rate

    if spec.method in ("time_domain", "both"):
        period = 2.0 * math.pi / spec.omega
        # stop as soon as the threshold is crossed; the label cannot change after that
        guard = min(ctl.overflow, crit.threshold * abs(crit.x0))
        peak, status = _ode.sweep_max_amplitude(
            deltas,
            epsilons,
            spec.omega,
            spec.gamma,
            crit.x0,
            crit.v0,
            crit.horizon_periods * period,
            ctl.rtol,
            ctl.atol,
            ctl.max_steps,
            guard,
        )
        ratio = (peak / abs(crit.x0)).reshape(shape)
        bad = _failed(status).reshape(shape)
        failed |= bad
        td_labels = np.where(ratio >= crit.threshold, UNSTABLE, STABLE).astype(object)
        td_labels[bad] = MARGINAL

    labels = fl_labels if fl_labels is not None else td_labels
    return StabilityGrid(spec, labels, growth, ratio, failed, fl_labels, td_labels, mono)


def _unstable_at(delta, eps, spec):
    params = MathieuParams(delta, eps, spec.omega, spec.gamma)
    try:
        res = monodromy(params, spec.criteria.controls)
    except IntegrationError:
        return True, math.inf

    return label_from_result(res, spec.criteria.marginal_tol) == UNSTABLE, res.spectral_radius


def tongue_boundary(grid, tol=1e-4, radius_tol=1e-3):
    """Lower edge of the unstable region in each delta column.

    For each column the first unstable cell in ascending epsilon brackets the
    boundary together with the cell below it; bisection on the Floquet label
    narrows the bracket to ``tol`` and the stable-side end is reported.
    Where the spectral radius climbs steeply toward 1, bisection continues
    until the reported end is also within ``radius_tol`` of unit radius.
    Columns without unstable cells contribute nothing.  If the lowest cell
    of a column is already unstable, that cell is reported as is.

    Returns
    -------
    list of (delta, epsilon)
    """
    spec = grid.spec
    if grid.floquet_labels is None:
        raise ValueError("tongue_boundary needs a grid swept with the floquet method")
    deltas = spec.deltas
    epsilons = spec.epsilons
    points = []
    for j, delta in enumerate(deltas):
        column = grid.floquet_labels[:, j]
        hits = np.nonzero(column == UNSTABLE)[0]
        if hits.size == 0:
            continue
        i = int(hits[0])
        if i == 0:
            points.append((float(delta), float(epsilons[0])))
            continue
        lo, hi = float(epsilons[i - 1]), float(epsilons[i])
        r_lo = _unstable_at(float(delta), lo, spec)[1]
        while hi - lo > tol or (abs(r_lo - 1) > radius_tol and hi - lo > 1e-12 * max(hi, 1.0)):
            mid = 0.5 * (lo + hi)
            unstable, radius = _unstable_at(float(delta), mid, spec)
            if unstable:
                hi = mid
            else:
                lo, r_lo = mid, radius
        points.append((float(delta), lo))
    return points


def write_grid_csv(grid, path):
    write_csv(path, ["delta", "epsilon", "label", "growth_rate", "max_amp_ratio"], grid.rows())


def grid_image(grid):
    """8-bit image of the labels, top row at the largest epsilon.

    Unstable cells are white; stable and marginal cells are grey.
    """
    img = np.where(grid.labels == UNSTABLE, _PGM_UNSTABLE, _PGM_STABLE).astype(np.uint8)
    return img[::-1]


def write_grid_pgm(grid, path):
    write_pgm(path, grid_image(grid))


def write_boundary_csv(points, path):
    write_csv(path, ["delta", "epsilon"], points)


# ---------------------------------------------------------------------------
# Monte Carlo over fabrication spread


@dataclass(frozen=True)
class McSpec:
    """Fabrication spread around ``base``.

    ``drive`` is ``(E_k, omega, gamma)``: the level energy entering the
    stiffness ``delta = 4 E_k / E_C`` and the drive frequency and damping
    used for classification.
    """

    base: CircuitParams
    rel_sigma_ej: float
    rel_sigma_ec: float
    samples: int
    seed: int
    drive: tuple = (0.25, 2.0, 0.0)
    criteria: ClassifyCriteria = ClassifyCriteria()

    def __post_init__(self):
        for name in ("rel_sigma_ej", "rel_sigma_ec"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be >= 0, got {v}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if len(self.drive) != 3:
            raise ValueError("drive must be (E_k, omega, gamma)")
        e_k, omega, gamma = (float(x) for x in self.drive)
        if not (math.isfinite(e_k) and math.isfinite(omega) and omega > 0 and math.isfinite(gamma) and gamma >= 0):
            raise ValueError(f"invalid drive {self.drive}")
        object.__setattr__(self, "drive", (e_k, omega, gamma))


@dataclass(frozen=True)
class McSample:
    index: int
    e_j: float
    e_c: float
    delta: float
    epsilon: float
    label: str
    rejections: int


@dataclass(frozen=True)
class McResult:
    unstable_fraction: float
    samples: tuple
    rejections: int

    def rows(self):
        for s in self.samples:
            yield (s.index, s.e_j, s.e_c, s.delta, s.epsilon, LABEL_CODES[s.label])


def _draw(mc, index):
    # one stream per sample; rejected draws continue along the same stream
    stream = CounterStream(mc.seed, index)
    base = mc.base
    rejected = 0
    while True:
        z_j, z_c = stream.normal(2)
        ej_sigma = base.E_J_sigma * (1.0 + mc.rel_sigma_ej * z_j)
        e_c = base.E_C * (1.0 + mc.rel_sigma_ec * z_c)
        if e_c > 0 and ej_sigma >= 0:
            return base.with_(E_J_sigma=float(ej_sigma), E_C=float(e_c)), rejected
        rejected += 1
        if rejected > 10_000:
            raise ValueError("sampling spread too wide: no valid parameters after 10000 draws")


def _mc_sample(args):
    mc, index = args
    circuit, rejected = _draw(mc, index)
    e_k, omega, gamma = mc.drive
    mp = to_mathieu(circuit, e_k)
    params = MathieuParams(mp.delta, mp.epsilon, omega, gamma)
    res = monodromy(params, mc.criteria.controls)

    label = label_from_result(res, mc.criteria.marginal_tol)
    return McSample(index, circuit.E_J, circuit.E_C, params.delta, params.epsilon, label, rejected)


def fabrication_scan(mc, workers=1):
    """Classify ``mc.samples`` perturbed devices.

    ``E_J`` and ``E_C`` receive independent Gaussian relative perturbations.
    Draws with ``E_C <= 0`` (or negative ``E_J``) are rejected and redrawn;
    the total number of rejections is reported.
    """
    samples = ordered_map(_mc_sample, [(mc, k) for k in range(mc.samples)], workers)
    unstable = sum(1 for s in samples if s.label == UNSTABLE)
    return McResult(unstable / len(samples), tuple(samples), sum(s.rejections for s in samples))


def write_mc_csv(result, path):
    write_csv(path, ["sample", "e_j", "e_c", "delta", "epsilon", "label"], result.rows())
