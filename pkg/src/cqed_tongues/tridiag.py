"""Eigenvalues of real symmetric tridiagonal matrices.

Two solvers are provided: the implicit-shift QL iteration (full spectrum)
and Sturm-sequence bisection (lowest few eigenvalues only).  Both operate on
the diagonal ``d`` (length n) and off-diagonal ``e`` (length n - 1).
"""

import numpy as np
from numba import njit

__all__ = ["EigenSolverError", "ql_eigenvalues", "bisect_lowest", "sturm_count"]

_MAX_SWEEPS = 60


class EigenSolverError(RuntimeError):
    """QL iteration failed to deflate an eigenvalue."""

    def __init__(self, message, diagonal=None, offdiagonal=None):
        super().__init__(message)
        self.diagonal = diagonal
        self.offdiagonal = offdiagonal


@njit(cache=True)
def _tql1(d, e):
    # EISPACK tql1 / Numerical Recipes tqli without eigenvectors.
    # Returns the index of the eigenvalue that failed to converge, or -1.
    n = d.shape[0]
    if n == 1:
        return -1
    eps = 2.220446049250313e-16
    # couplings below eps^2 |T| move eigenvalues far less than roundoff; this
    # floor lets them deflate even between zero diagonal entries
    floor = 0.0
    for i in range(n):
        floor = max(floor, abs(d[i]) + abs(e[i]))
    floor *= eps * eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            if it == _MAX_SWEEPS:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def ql_eigenvalues(d, e):
    """All eigenvalues, ascending, by implicit-shift QL.

    Raises
    ------
    EigenSolverError
        If an eigenvalue fails to deflate within the iteration budget.
    """
    d = np.array(d, dtype=float)
    e_in = np.asarray(e, dtype=float)
    if e_in.shape[0] != max(d.shape[0] - 1, 0):
        raise ValueError("off-diagonal must have length len(d) - 1")
    diag0 = d.copy()
    # power-of-two scaling to unit norm is exact and keeps tiny or huge
    # matrices away from underflow inside the iteration
    norm = max(np.abs(d).max(initial=0.0), np.abs(e_in).max(initial=0.0))
    if norm == 0.0:
        return d
    shift = -np.frexp(norm)[1]
    d = np.ldexp(d, shift)
    work = np.zeros(d.shape[0])
    work[: e_in.shape[0]] = np.ldexp(e_in, shift)
    failed = _tql1(d, work)
    if failed >= 0:
        raise EigenSolverError(
            f"QL iteration did not converge for eigenvalue {failed} "
            f"(n={d.shape[0]}, |d|max={np.abs(diag0).max():.3e}, |e|max={np.abs(e_in).max():.3e})",
            diagonal=diag0,
            offdiagonal=e_in.copy(),
        )
    return np.sort(np.ldexp(d, -shift))


@njit(cache=True)
def _sturm(d, e2, x):
    # number of eigenvalues strictly less than x
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        if q == 0.0:
            q = 2.220446049250313e-16 * (abs(e2[i - 1]) ** 0.5 + 1e-300)
        q = d[i] - x - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect(d, e, k):
    n = d.shape[0]
    e2 = e * e
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    span = max(hi - lo, 1e-300)
    lo -= 1e-12 * span
    hi += 1e-12 * span
    out = np.empty(k)
    for j in range(k):
        a = lo
        b = hi
        while True:
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if b - a <= 2.220446049250313e-16 * (2.0 * max(abs(a), abs(b)) + span):
                break
            if _sturm(d, e2, mid) > j:
                b = mid
            else:
                a = mid
        out[j] = 0.5 * (a + b)
        lo = a
    return out


def sturm_count(d, e, x):
    """Number of eigenvalues strictly below ``x``."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    return int(_sturm(d, e * e, float(x)))


def bisect_lowest(d, e, k):
    """The ``k`` smallest eigenvalues, ascending, by Sturm bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    return _bisect(d, e, int(k))
