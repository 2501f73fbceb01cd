"""Damped Mathieu oscillator: propagation, Floquet analysis and
characteristic values.

The oscillator is

    x'' + gamma x' + (delta + epsilon cos(omega t)) x = 0.

Characteristic values refer to the canonical form
``y'' + (a - 2 q cos 2t) y = 0``.  A Mathieu oscillator with ``omega = 2``
maps onto it through :func:`canonical_form`, i.e. ``a = delta`` and
``q = -epsilon / 2``; this is the only place that conversion is defined.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _ode

__all__ = [
    "MathieuParams",
    "OscState",
    "IntegratorControls",
    "Trajectory",
    "FloquetResult",
    "ClassifyCriteria",
    "CharValue",
    "IntegrationError",
    "ConvergenceError",
    "STABLE",
    "UNSTABLE",
    "MARGINAL",
    "integrate",
    "monodromy",
    "floquet_from_matrix",
    "label_from_matrix",
    "label_from_result",
    "classify",
    "canonical_form",
    "char_value",
    "char_pair",
]

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"


class IntegrationError(RuntimeError):
    """Adaptive integration could not proceed (step size underflow or step budget).

    ``last_state`` is the last accepted :class:`OscState`.
    """

    def __init__(self, message, last_state):
        super().__init__(message)
        self.last_state = last_state


class ConvergenceError(RuntimeError):
    """A characteristic value did not settle under truncation doubling."""


@dataclass(frozen=True)
class MathieuParams:
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
class OscState:
    x: float
    v: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.v) and math.isfinite(self.t)):
            raise ValueError("state components must be finite")


@dataclass(frozen=True)
class IntegratorControls:
    """Settings for :func:`integrate`.

    ``method`` is ``"dp45"`` (adaptive Dormand-Prince 5(4)) or ``"rk4"``
    (fixed step, ``steps_per_period`` steps per drive period).
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "dp45"
    steps_per_period: int = 1000
    max_steps: int = 50_000_000
    overflow: float = 1e12

    def __post_init__(self):
        if self.method not in ("dp45", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.steps_per_period < 1:
            raise ValueError("steps_per_period must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution.  ``overflowed`` flags early termination at the guard."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    overflowed: bool = False
    samples_t: np.ndarray = field(default_factory=lambda: np.empty(0))
    samples_x: np.ndarray = field(default_factory=lambda: np.empty(0))
    samples_v: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def final(self):
        return OscState(float(self.x[-1]), float(self.v[-1]), float(self.t[-1]))

    def max_abs_x(self):
        return float(np.max(np.abs(self.x)))


def _run(kind, p, init, t_end, controls, sample_times=None):
    if not t_end > init.t:
        raise ValueError(f"t_end ({t_end}) must exceed the initial time ({init.t})")
    samples = np.empty(0) if sample_times is None else np.ascontiguousarray(sample_times, dtype=float)
    if controls.method == "rk4":
        period = 2.0 * math.pi / p[2]
        n = max(1, int(math.ceil((t_end - init.t) / period * controls.steps_per_period)))
        status, t, x, v, _, ts, xs, vs = _ode.rk4(
            kind, p, init.t, init.x, init.v, t_end, n, controls.overflow, True
        )
        if samples.size:
            raise ValueError("dense sampling requires the dp45 method")
        sx = sv = np.empty(0)
    else:
        status, t, x, v, _, ts, xs, vs, sx, sv, ns = _ode.dp45(
            kind,
            p,
            init.t,
            init.x,
            init.v,
            t_end,
            controls.rtol,
            controls.atol,
            controls.max_steps,
            controls.overflow,
            samples,
            True,
        )
        if status == _ode.OK and ns != samples.size:
            raise RuntimeError("dense output missed requested sample times")
        if status == _ode.OVERFLOW:
            sx, sv = sx[:ns], sv[:ns]
            samples = samples[:ns]
    if status in (_ode.STEP_UNDERFLOW, _ode.MAX_STEPS):
        reason = "step size underflow" if status == _ode.STEP_UNDERFLOW else "step budget exhausted"
        raise IntegrationError(f"integration failed at t={t:.17g}: {reason}", OscState(x, v, t))
    return Trajectory(
        np.asarray(ts),
        np.asarray(xs),
        np.asarray(vs),
        overflowed=status == _ode.OVERFLOW,
        samples_t=samples,
        samples_x=np.asarray(sx),
        samples_v=np.asarray(sv),
    )


def integrate(params, init, t_end, controls=IntegratorControls(), sample_times=None):
    """Integrate the damped Mathieu oscillator from ``init`` to ``t_end``.

    Every accepted step is returned.  Integration stops early, with
    ``Trajectory.overflowed`` set, once ``|x|`` exceeds ``controls.overflow``.
    If ``sample_times`` is given, the continuous extension is evaluated at
    those times as well (``Trajectory.samples_*``).

    Raises
    ------
    IntegrationError
        On step-size underflow; carries the last accepted state.
    """
    return _run(_ode.LINEAR, params.as_array(), init, float(t_end), controls, sample_times)


def _eig2(m):
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    half_tr = 0.5 * (a + d)
    # (a - d)^2 + 4bc avoids the cancellation in tr^2 - 4 det near scalar matrices
    disc = 0.25 * (a - d) ** 2 + b * c
    det = a * d - b * c
    if disc >= 0:
        root = math.sqrt(disc)
        big = half_tr + math.copysign(root, half_tr)
        if big == 0.0:
            lam = (complex(root), complex(-root))
        else:
            lam = (complex(big), complex(det / big))
    else:
        root = math.sqrt(-disc)
        lam = (complex(half_tr, root), complex(half_tr, -root))
    return lam, disc


@dataclass(frozen=True)
class FloquetResult:
    """One-period transition map and its spectrum.

    ``exponents`` satisfy ``multiplier = exp(mu * period)`` with
    ``Im(mu)`` in ``(-pi/period, pi/period]``.
    """

    params: MathieuParams
    monodromy: np.ndarray
    multipliers: tuple
    exponents: tuple
    spectral_radius: float
    discriminant: float

    @property
    def period(self):
        return self.params.period

    @property
    def trace(self):
        return float(self.monodromy[0, 0] + self.monodromy[1, 1])

    @property
    def determinant(self):
        return float(np.linalg.det(self.monodromy))

    @property
    def elliptic(self):
        """True when the multipliers form a complex-conjugate pair."""
        return self.discriminant < 0

    @property
    def growth_rate(self):
        """Largest real part of the Floquet exponents.

        For a complex-conjugate pair the modulus is fixed by Liouville's
        formula, ``|lambda|^2 = exp(-gamma T)``, so the exact value
        ``-gamma / 2`` is returned instead of the integration-noise estimate.
        Without drive the exponents are the roots of
        ``s^2 + gamma s + delta`` and are returned exactly as well.
        """
        p = self.params
        if p.epsilon == 0:
            disc = 0.25 * p.gamma**2 - p.delta
            return -0.5 * p.gamma + (math.sqrt(disc) if disc > 0 else 0.0)
        if self.elliptic:
            return -0.5 * self.params.gamma
        return math.log(self.spectral_radius) / self.period if self.spectral_radius > 0 else -math.inf


def floquet_from_matrix(params, m):
    m = np.asarray(m, dtype=float).reshape(2, 2)
    lam, disc = _eig2(m)
    period = params.period
    exps = []
    for z in lam:
        if z == 0:
            exps.append(complex(-math.inf, 0.0))
            continue
        mu = complex(math.log(abs(z)), math.atan2(z.imag, z.real)) / period
        if mu.imag <= -math.pi / period:
            mu += 2j * math.pi / period
        exps.append(mu)
    radius = max(abs(lam[0]), abs(lam[1]))
    return FloquetResult(params, m, lam, tuple(exps), float(radius), float(disc))


def monodromy(params, controls=IntegratorControls()):
    """Floquet analysis over one drive period ``T = 2 pi / omega``.

    Columns of the monodromy matrix are the states at ``T`` started from
    ``(1, 0)`` and ``(0, 1)``.
    """
    p = params.as_array()
    if controls.method == "rk4":
        status, m11, m12, m21, m22 = _ode.monodromy_entries_rk4(_ode.LINEAR, p, controls.steps_per_period)
    else:
        status, m11, m12, m21, m22 = _ode.monodromy_entries(
            _ode.LINEAR, p, controls.rtol, controls.atol, controls.max_steps
        )
    if status in (_ode.STEP_UNDERFLOW, _ode.MAX_STEPS):
        raise IntegrationError(
            f"monodromy integration failed for {params}", OscState(m11, m21, params.period)
        )
    return floquet_from_matrix(params, np.array([[m11, m12], [m21, m22]]))


@dataclass(frozen=True)
class ClassifyCriteria:
    """Thresholds for :func:`classify`.

    The time-domain run starts from ``(x0, v0)`` and lasts
    ``horizon_periods`` drive periods; it is unstable once the peak
    ``|x|`` reaches ``threshold * |x0|``.  ``marginal_tol`` is the half-width
    of the marginal band around spectral radius 1.
    """

    threshold: float = 1e3
    horizon_periods: float = 200.0
    marginal_tol: float = 1e-6
    x0: float = 1.0
    v0: float = 0.0
    controls: IntegratorControls = IntegratorControls()

    def __post_init__(self):
        if self.threshold <= 1:
            raise ValueError("threshold ratio must exceed 1")
        if self.horizon_periods <= 0:
            raise ValueError("horizon_periods must be positive")
        if self.marginal_tol < 0:
            raise ValueError("marginal_tol must be >= 0")
        if self.x0 == 0:
            raise ValueError("x0 must be nonzero (the threshold is relative to |x0|)")


def label_from_matrix(params, m, marginal_tol=1e-6):
    """Floquet stability label of a monodromy matrix.

    A complex-conjugate multiplier pair is bounded motion (stable); its
    modulus equals ``exp(-gamma T / 2)`` exactly.  A real pair is judged by
    its spectral radius against the marginal band.  An undriven oscillator
    with positive stiffness is reported stable even where its multipliers
    sit at +-1.
    """
    res = floquet_from_matrix(params, m)
    return label_from_result(res, marginal_tol), res


def label_from_result(res, marginal_tol):
    p = res.params
    if p.epsilon == 0 and p.delta > 0:
        return STABLE
    if res.elliptic:
        return STABLE
    if res.spectral_radius > 1 + marginal_tol:
        return UNSTABLE
    if res.spectral_radius < 1 - marginal_tol:
        return STABLE
    return MARGINAL


def _time_domain_ratio(params, criteria):
    c = criteria.controls
    init = OscState(criteria.x0, criteria.v0, 0.0)
    t_end = criteria.horizon_periods * params.period
    p = params.as_array()
    if c.method == "rk4":
        n = max(1, int(math.ceil(criteria.horizon_periods * c.steps_per_period)))
        status, t, x, v, peak, _, _, _ = _ode.rk4(_ode.LINEAR, p, 0.0, init.x, init.v, t_end, n, c.overflow, False)
    else:
        status, t, x, v, peak, _, _, _, _, _, _ = _ode.dp45(
            _ode.LINEAR, p, 0.0, init.x, init.v, t_end, c.rtol, c.atol, c.max_steps, c.overflow, np.empty(0), False
        )
    if status in (_ode.STEP_UNDERFLOW, _ode.MAX_STEPS):
        raise IntegrationError(f"time-domain integration failed for {params}", OscState(x, v, t))
    return peak / abs(criteria.x0)


def classify(params, method="floquet", criteria=ClassifyCriteria()):
    """Stability label ``"stable"``, ``"unstable"`` or ``"marginal"``.

    ``method="floquet"`` uses the monodromy spectrum; ``"time_domain"``
    integrates over the criteria horizon and compares the peak amplitude
    ratio with the threshold (never reports marginal).
    """
    if method == "floquet":
        return label_from_result(monodromy(params, criteria.controls), criteria.marginal_tol)
    if method == "time_domain":
        ratio = _time_domain_ratio(params, criteria)
        return UNSTABLE if ratio >= criteria.threshold else STABLE
    raise ValueError(f"unknown method {method!r}")


def canonical_form(delta, epsilon):
    """``(a, q)`` of ``y'' + (a - 2q cos 2t) y = 0`` for ``x'' + (delta + epsilon cos 2t) x = 0``."""
    return delta, -0.5 * epsilon


# ---------------------------------------------------------------------------
# characteristic values


@dataclass(frozen=True)
class CharValue:
    """Characteristic value with its truncation-doubling certificate.

    ``certificate`` is ``|value(2N) - value(N)|`` for truncation ``N``.
    """

    order: float
    q: float
    value: float
    truncation: int
    certificate: float
    kind: str = "a"


_CONVERGENCE_TOL = 1e-10


def _min_truncation(order):
    return 2 * math.ceil(abs(order)) + 20


def _eig_tridiag(d, e):
    return scipy.linalg.eigvalsh_tridiagonal(d, e, check_finite=False)


def _integer_block(n, q, size, kind):
    # Parity-split Hill matrices of the canonical form, symmetrised.
    # even n: basis cos(2kt) [a] / sin((2k+2)t) [b]; odd n: cos / sin((2k+1)t).
    k = np.arange(size, dtype=float)
    off = np.full(size - 1, float(q))
    if n % 2 == 0:
        if kind == "a":
            diag = (2.0 * k) ** 2
            if size > 1:
                off[0] = math.sqrt(2.0) * q
        else:
            diag = (2.0 * k + 2.0) ** 2
        index = n // 2 if kind == "a" else n // 2 - 1
    else:
        diag = (2.0 * k + 1.0) ** 2
        diag[0] += q if kind == "a" else -q
        index = (n - 1) // 2
    return diag, off, index


def _integer_value(n, q, size, kind):
    diag, off, index = _integer_block(n, q, size, kind)
    return float(_eig_tridiag(diag, off)[index])


def _fractional_value(nu, q, size):
    # Hill matrix over frequencies nu + 2k; a_nu is the eigenvalue whose rank
    # equals the rank of nu^2 among the unperturbed (nu + 2k)^2.  Eigenvalues of
    # this Jacobi matrix are simple for q != 0, so ranks never swap along q.
    half = size // 2
    k = np.arange(-half, size - half, dtype=float)
    freq = nu + 2.0 * k
    diag = freq**2
    rank = int(np.count_nonzero(diag < nu * nu))
    off = np.full(size - 1, float(q))
    return float(_eig_tridiag(diag, off)[rank])


def _certified(order, q, truncation, evaluate, kind):
    if truncation < _min_truncation(order):
        raise ValueError(
            f"truncation {truncation} too small for order {order}; need >= {_min_truncation(order)}"
        )
    v1 = evaluate(truncation)
    v2 = evaluate(2 * truncation)
    cert = abs(v2 - v1)
    if not cert < _CONVERGENCE_TOL * max(1.0, abs(v2)):
        raise ConvergenceError(
            f"characteristic value of order {order} at q={q} moved by {cert:.3e} "
            f"when truncation doubled from {truncation}"
        )
    return CharValue(float(order), float(q), v1, int(truncation), cert, kind)


def _is_integer(order):
    return float(order).is_integer()


def char_value(order, q, truncation=None):
    """Characteristic value ``a_nu(q)`` of the canonical Mathieu equation.

    Integer orders give the even (cosine-type) value ``a_n``; fractional orders
    give the value continuous in ``q`` from ``nu**2``.  ``a_nu`` is even in ``nu``.

    Raises
    ------
    ConvergenceError
        If doubling the truncation moves the value by ``1e-10`` or more.
    """
    order = float(order)
    q = float(q)
    if truncation is None:
        truncation = _min_truncation(order) + 20
    if _is_integer(order):
        n = int(abs(order))
        return _certified(order, q, truncation, lambda size: _integer_value(n, q, size, "a"), "a")
    nu = abs(order)
    return _certified(order, q, truncation, lambda size: _fractional_value(nu, q, size), "a")


def char_pair(n, q, truncation=None):
    """``(a_n, b_n)`` as :class:`CharValue` objects; ``b_0`` is ``None``."""
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    q = float(q)
    if truncation is None:
        truncation = _min_truncation(n) + 20
    a = _certified(n, q, truncation, lambda size: _integer_value(n, q, size, "a"), "a")
    if n == 0:
        return a, None
    b = _certified(n, q, truncation, lambda size: _integer_value(n, q, size, "b"), "b")
    return a, b
