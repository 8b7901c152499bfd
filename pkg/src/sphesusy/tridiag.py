"""Self-contained symmetric tridiagonal eigensolver.

Eigenvalues by Sturm-sequence bisection, eigenvectors by inverse iteration
with a pivoted tridiagonal LU. No LAPACK; results are deterministic.
"""
from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps


class ConvergenceError(ArithmeticError):
    """Eigen-iteration failed to meet tolerance within its iteration cap."""

    def __init__(self, message, block=None, shifts=()):
        super().__init__(message)
        self.block = block
        self.shifts = list(shifts)


def sturm_count(d, e, x: float) -> int:
    """Number of eigenvalues strictly below ``x``."""
    count = 0
    q = d[0] - x
    tiny = EPS * (abs(x) + 1.0) * 1e-3
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = tiny
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0:
            count += 1
    return count


def gershgorin(d, e) -> tuple[float, float]:
    n = len(d)
    r = np.zeros(n)
    if n > 1:
        ae = np.abs(np.asarray(e, dtype=float))
        r[:-1] += ae
        r[1:] += ae
    d = np.asarray(d, dtype=float)
    return float(np.min(d - r)), float(np.max(d + r))


def bisect_eigenvalue(d, e, index: int, lo: float, hi: float, max_iter: int = 200) -> float:
    """The ``index``-th smallest eigenvalue (0-based) inside [lo, hi]."""
    scale = max(abs(lo), abs(hi), 1.0)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 2.0 * EPS * max(abs(lo), abs(hi)) + EPS * 1e-3 * scale or mid in (lo, hi):
            return mid
        if sturm_count(d, e, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _tridiag_solve(d, e, shift: float, rhs: np.ndarray) -> np.ndarray:
    """Solve (T - shift I) x = rhs by Gaussian elimination with partial pivoting."""
    n = len(d)
    a = np.array(d, dtype=float) - shift           # diagonal
    b = np.zeros(n)                                 # super-diagonal
    c = np.zeros(n)                                 # sub-diagonal
    b[:-1] = e
    c[:-1] = e
    u2 = np.zeros(n)                                # second super-diagonal after pivoting
    x = np.array(rhs, dtype=float)
    floor = EPS * (np.max(np.abs(a)) + np.max(np.abs(e), initial=0.0) + 1.0)
    for i in range(n - 1):
        if abs(c[i]) > abs(a[i]):
            # swap rows i and i+1
            a[i], c[i] = c[i], a[i]
            b[i], a[i + 1] = a[i + 1], b[i]
            u2[i], b[i + 1] = b[i + 1], 0.0
            x[i], x[i + 1] = x[i + 1], x[i]
        if a[i] == 0.0:
            a[i] = floor
        f = c[i] / a[i]
        a[i + 1] -= f * b[i]
        b[i + 1] -= f * u2[i]
        x[i + 1] -= f * x[i]
    if a[n - 1] == 0.0:
        a[n - 1] = floor
    out = np.zeros(n)
    out[n - 1] = x[n - 1] / a[n - 1]
    if n > 1:
        out[n - 2] = (x[n - 2] - b[n - 2] * out[n - 1]) / a[n - 2]
    for i in range(n - 3, -1, -1):
        out[i] = (x[i] - b[i] * out[i + 1] - u2[i] * out[i + 2]) / a[i]
    return out


def tridiag_matvec(d, e, v) -> np.ndarray:
    out = np.asarray(d) * v
    if len(v) > 1:
        out[:-1] += e * v[1:]
        out[1:] += e * v[:-1]
    return out


def eigh_tridiagonal_lowest(d, e, k: int, block=None, value_tol: float = 1e-12,
                            vector_tol: float = 1e-10, max_iter: int = 8):
    """Lowest ``k`` eigenpairs of the symmetric tridiagonal matrix (d, e).

    Returns ``(values, vectors, residuals)``; vectors are columns, unit norm,
    with their largest-magnitude component made positive.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = len(d)
    if k > n:
        raise ValueError(f"asked for {k} eigenpairs of a {n}x{n} matrix")
    lo, hi = gershgorin(d, e)
    norm = max(abs(lo), abs(hi), 1.0)
    # the residual floor of a double-precision eigenvector is ~eps*||T||
    rtol = max(vector_tol, 64 * EPS * norm)
    vals = np.array([bisect_eigenvalue(d, e, i, lo, hi) for i in range(k)])
    vecs = np.zeros((n, k))
    res = np.zeros(k)
    rhs0 = 1.0 + 1e-3 * np.arange(n) / max(n, 1)
    for j, lam in enumerate(vals):
        shifts = []
        v = rhs0 / np.linalg.norm(rhs0)
        r = np.inf
        for it in range(max_iter):
            shift = lam + (it + 1) * EPS * norm * 0.5 * (-1) ** it
            shifts.append(shift)
            v = _tridiag_solve(d, e, shift, v)
            for i in range(j):
                v -= np.dot(vecs[:, i], v) * vecs[:, i]
            v /= np.linalg.norm(v)
            r = float(np.linalg.norm(tridiag_matvec(d, e, v) - lam * v))
            if r < rtol and it >= 1:
                break
        else:
            raise ConvergenceError(
                f"inverse iteration stalled for eigenvalue {lam!r} (residual {r:.3e})",
                block=block, shifts=shifts)
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        vecs[:, j] = v
        res[j] = r
    return vals, vecs, res
