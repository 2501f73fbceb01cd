"""Compiled integration kernels for scalar second-order oscillators.

Both model families used in the package have the form

    x'' = -gamma * x' - (delta + epsilon * cos(omega * t)) * g(x)

with ``g(x) = x`` (linear Mathieu, ``kind == LINEAR``) or ``g(x) = sin(x)``
(parametrically driven pendulum, ``kind == PENDULUM``).  The parameter vector
is always ``p = (delta, epsilon, omega, gamma)``.

The adaptive scheme is the Dormand-Prince 5(4) pair with its native
fourth-order continuous extension; a fixed-step classical RK4 driver is
provided for determinism checks.
"""

import numpy as np
from numba import njit, prange

LINEAR = 0
PENDULUM = 1

OK = 0
OVERFLOW = 1
STEP_UNDERFLOW = 2
MAX_STEPS = 3

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_A71, _A73, _A74, _A75, _A76 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)
# continuous extension (Hairer & Wanner, dopri5 contd5)
_D1 = -12715105075.0 / 11282082432.0
_D3 = 87487479700.0 / 32700410799.0
_D4 = -10690763975.0 / 1880347072.0
_D5 = 701980252875.0 / 199316789632.0
_D6 = -1453857185.0 / 822651844.0
_D7 = 69997945.0 / 29380423.0

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_EPS = 2.220446049250313e-16


@njit(cache=True)
def accel(kind, p, t, x, v):
    stiffness = p[0] + p[1] * np.cos(p[2] * t)
    if kind == PENDULUM:
        return -p[3] * v - stiffness * np.sin(x)
    return -p[3] * v - stiffness * x


@njit(cache=True)
def _err_norm(ex, ev, x0, v0, x1, v1, rtol, atol):
    sx = atol + rtol * max(abs(x0), abs(x1))
    sv = atol + rtol * max(abs(v0), abs(v1))
    return np.sqrt(0.5 * ((ex / sx) ** 2 + (ev / sv) ** 2))


@njit(cache=True)
def _initial_step(kind, p, t0, x0, v0, a0, t_span, rtol, atol):
    # Hairer-Norsett-Wanner starting step heuristic, order 5
    sx = atol + rtol * abs(x0)
    sv = atol + rtol * abs(v0)
    d0 = np.sqrt(0.5 * ((x0 / sx) ** 2 + (v0 / sv) ** 2))
    d1 = np.sqrt(0.5 * ((v0 / sx) ** 2 + (a0 / sv) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, t_span)
    x1 = x0 + h0 * v0
    v1 = v0 + h0 * a0
    a1 = accel(kind, p, t0 + h0, x1, v1)
    d2 = np.sqrt(0.5 * (((v1 - v0) / sx) ** 2 + ((a1 - a0) / sv) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, t_span)


@njit(cache=True)
def _dp_step(kind, p, t, x, v, h, kx1, kv1):
    """One Dormand-Prince trial step.

    Returns the fifth-order state, the scaled-free error components and the
    seven stage slopes needed by the dense interpolant.
    """
    kx2 = v + h * _A21 * kv1
    kv2 = accel(kind, p, t + _C2 * h, x + h * _A21 * kx1, kx2)

    xs = x + h * (_A31 * kx1 + _A32 * kx2)
    kx3 = v + h * (_A31 * kv1 + _A32 * kv2)
    kv3 = accel(kind, p, t + _C3 * h, xs, kx3)

    xs = x + h * (_A41 * kx1 + _A42 * kx2 + _A43 * kx3)
    kx4 = v + h * (_A41 * kv1 + _A42 * kv2 + _A43 * kv3)
    kv4 = accel(kind, p, t + _C4 * h, xs, kx4)

    xs = x + h * (_A51 * kx1 + _A52 * kx2 + _A53 * kx3 + _A54 * kx4)
    kx5 = v + h * (_A51 * kv1 + _A52 * kv2 + _A53 * kv3 + _A54 * kv4)
    kv5 = accel(kind, p, t + _C5 * h, xs, kx5)

    xs = x + h * (_A61 * kx1 + _A62 * kx2 + _A63 * kx3 + _A64 * kx4 + _A65 * kx5)
    kx6 = v + h * (_A61 * kv1 + _A62 * kv2 + _A63 * kv3 + _A64 * kv4 + _A65 * kv5)
    kv6 = accel(kind, p, t + h, xs, kx6)

    x1 = x + h * (_A71 * kx1 + _A73 * kx3 + _A74 * kx4 + _A75 * kx5 + _A76 * kx6)
    v1 = v + h * (_A71 * kv1 + _A73 * kv3 + _A74 * kv4 + _A75 * kv5 + _A76 * kv6)
    kx7 = v1
    kv7 = accel(kind, p, t + h, x1, v1)

    ex = h * (_E1 * kx1 + _E3 * kx3 + _E4 * kx4 + _E5 * kx5 + _E6 * kx6 + _E7 * kx7)
    ev = h * (_E1 * kv1 + _E3 * kv3 + _E4 * kv4 + _E5 * kv5 + _E6 * kv6 + _E7 * kv7)

    dx = h * (_D1 * kx1 + _D3 * kx3 + _D4 * kx4 + _D5 * kx5 + _D6 * kx6 + _D7 * kx7)
    dv = h * (_D1 * kv1 + _D3 * kv3 + _D4 * kv4 + _D5 * kv5 + _D6 * kv6 + _D7 * kv7)
    return x1, v1, kx7, kv7, ex, ev, dx, dv


@njit(cache=True)
def _dense(y0, y1, h, k1, k7, d, theta):
    ydiff = y1 - y0
    bspl = h * k1 - ydiff
    r4 = ydiff - h * k7 - bspl
    return y0 + theta * (ydiff + (1.0 - theta) * (bspl + theta * (r4 + (1.0 - theta) * d)))


@njit(cache=True)
def dp45(kind, p, t0, x0, v0, t_end, rtol, atol, max_steps, overflow, samples, record):
    """Adaptive Dormand-Prince integration from ``t0`` to ``t_end``.

    ``samples`` is an ascending array of output times inside ``[t0, t_end]``
    filled from the continuous extension.  With ``record`` set, every
    accepted step is appended to the returned step arrays.

    Returns ``(status, t, x, v, max_abs_x, ts, xs, vs, sx, sv, n_samples)``.
    """
    ts = [t0]
    xs = [x0]
    vs = [v0]
    ns = samples.shape[0]
    sx = np.empty(ns)
    sv = np.empty(ns)
    isamp = 0
    while isamp < ns and samples[isamp] <= t0:
        sx[isamp] = x0
        sv[isamp] = v0
        isamp += 1

    t = t0
    x = x0
    v = v0
    max_abs = abs(x0)
    t_span = t_end - t0
    if t_span <= 0.0:
        return OK, t, x, v, max_abs, ts, xs, vs, sx, sv, isamp

    kx1 = v
    kv1 = accel(kind, p, t, x, v)
    h = _initial_step(kind, p, t, x, v, kv1, t_span, rtol, atol)
    status = OK
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            status = MAX_STEPS
            break
        h_min = 16.0 * _EPS * max(abs(t), 1.0)
        if h < h_min:
            status = STEP_UNDERFLOW
            break
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        x1, v1, kx7, kv7, ex, ev, dx, dv = _dp_step(kind, p, t, x, v, h, kx1, kv1)
        err = _err_norm(ex, ev, x, v, x1, v1, rtol, atol)
        if not (err <= 1.0):
            if err != err:
                fac = _MIN_FACTOR
            else:
                fac = max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            h = h * fac
            continue
        steps += 1
        t1 = t_end if last else t + h
        while isamp < ns and samples[isamp] <= t1:
            if samples[isamp] == t1:
                sx[isamp] = x1
                sv[isamp] = v1
            else:
                theta = (samples[isamp] - t) / h
                sx[isamp] = _dense(x, x1, h, kx1, kx7, dx, theta)
                sv[isamp] = _dense(v, v1, h, kv1, kv7, dv, theta)
            isamp += 1
        t = t1
        x = x1
        v = v1
        kx1 = kx7
        kv1 = kv7
        if record:
            ts.append(t)
            xs.append(x)
            vs.append(v)
        ax = abs(x)
        if ax > max_abs:
            max_abs = ax
        if not (ax <= overflow):
            status = OVERFLOW
            break
        if err == 0.0:
            fac = _MAX_FACTOR
        else:
            fac = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
        h = h * fac
    return status, t, x, v, max_abs, ts, xs, vs, sx, sv, isamp


@njit(cache=True)
def rk4(kind, p, t0, x0, v0, t_end, n_steps, overflow, record):
    """Fixed-step classical Runge-Kutta over ``n_steps`` equal steps."""
    ts = [t0]
    xs = [x0]
    vs = [v0]
    t = t0
    x = x0
    v = v0
    max_abs = abs(x0)
    status = OK
    h = (t_end - t0) / n_steps
    for i in range(n_steps):
        kx1 = v
        kv1 = accel(kind, p, t, x, v)
        kx2 = v + 0.5 * h * kv1
        kv2 = accel(kind, p, t + 0.5 * h, x + 0.5 * h * kx1, kx2)
        kx3 = v + 0.5 * h * kv2
        kv3 = accel(kind, p, t + 0.5 * h, x + 0.5 * h * kx2, kx3)
        kx4 = v + h * kv3
        kv4 = accel(kind, p, t + h, x + h * kx3, kx4)
        x = x + h / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4)
        v = v + h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4)
        t = t0 + (i + 1) * h
        if record:
            ts.append(t)
            xs.append(x)
            vs.append(v)
        ax = abs(x)
        if ax > max_abs:
            max_abs = ax
        if not (ax <= overflow):
            status = OVERFLOW
            break
    return status, t, x, v, max_abs, ts, xs, vs


_NO_SAMPLES = np.empty(0)


@njit(cache=True)
def monodromy_entries(kind, p, rtol, atol, max_steps):
    """Columns of the one-period transition map, plus a status code."""
    period = 2.0 * np.pi / p[2]
    empty = np.empty(0)
    s1, _, m11, m21, _, _, _, _, _, _, _ = dp45(
        kind, p, 0.0, 1.0, 0.0, period, rtol, atol, max_steps, np.inf, empty, False
    )
    s2, _, m12, m22, _, _, _, _, _, _, _ = dp45(
        kind, p, 0.0, 0.0, 1.0, period, rtol, atol, max_steps, np.inf, empty, False
    )
    return max(s1, s2), m11, m12, m21, m22


@njit(cache=True)
def monodromy_entries_rk4(kind, p, steps_per_period):
    period = 2.0 * np.pi / p[2]
    s1, _, m11, m21, _, _, _, _ = rk4(kind, p, 0.0, 1.0, 0.0, period, steps_per_period, np.inf, False)
    s2, _, m12, m22, _, _, _, _ = rk4(kind, p, 0.0, 0.0, 1.0, period, steps_per_period, np.inf, False)
    return max(s1, s2), m11, m12, m21, m22


@njit(cache=True, parallel=True)
def sweep_monodromy(deltas, epsilons, omega, gamma, rtol, atol, max_steps):
    """Monodromy matrices on a (epsilon, delta) grid, row-major in epsilon."""
    nd = deltas.shape[0]
    ne = epsilons.shape[0]
    out = np.empty((ne * nd, 4))
    status = np.empty(ne * nd, dtype=np.int64)
    for idx in prange(ne * nd):
        i = idx // nd
        j = idx % nd
        p = np.array([deltas[j], epsilons[i], omega, gamma])
        s, m11, m12, m21, m22 = monodromy_entries(LINEAR, p, rtol, atol, max_steps)
        out[idx, 0] = m11
        out[idx, 1] = m12
        out[idx, 2] = m21
        out[idx, 3] = m22
        status[idx] = s
    return out, status


@njit(cache=True, parallel=True)
def sweep_max_amplitude(deltas, epsilons, omega, gamma, x0, v0, t_end, rtol, atol, max_steps, overflow):
    """Time-domain peak |x| on a (epsilon, delta) grid, row-major in epsilon."""
    nd = deltas.shape[0]
    ne = epsilons.shape[0]
    peak = np.empty(ne * nd)
    status = np.empty(ne * nd, dtype=np.int64)
    empty = np.empty(0)
    for idx in prange(ne * nd):
        i = idx // nd
        j = idx % nd
        p = np.array([deltas[j], epsilons[i], omega, gamma])
        s, _, _, _, m, _, _, _, _, _, _ = dp45(
            LINEAR, p, 0.0, x0, v0, t_end, rtol, atol, max_steps, overflow, empty, False
        )
        peak[idx] = m
        status[idx] = s
    return peak, status
