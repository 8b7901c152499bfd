"""Numerical ground truth for the angular spheroidal problem.

Solves

    d/dx[(1 - x^2) dTheta/dx] + (E + alpha x^2 - m^2/(1 - x^2)) Theta = 0

by Galerkin projection on orthonormal associated Legendre functions. In that
basis ``x^2`` is pentadiagonal and splits by the parity of ``l - m`` into two
symmetric tridiagonal blocks.

Associated Legendre functions here carry no Condon-Shortley phase, so
``P_m^m(x) = (2m-1)!! (1 - x^2)^(m/2)`` is non-negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .symtrig import AlphaSeries, CosPoly, TrigForm
from .tridiag import ConvergenceError, eigh_tridiagonal_lowest

L_MAX_START = 32
L_MAX_CAP = 4096
EIG_STABILITY = 1e-11


def assoc_legendre(m: int, l: int, x: float) -> float:
    """Unnormalized ``P_l^m(x)`` by upward recurrence in ``l``."""
    if not 0 <= m <= l:
        raise ValueError(f"need 0 <= m <= l, got m={m}, l={l}")
    if abs(x) > 1.0:
        raise ValueError(f"|x| must be <= 1, got {x}")
    pmm = 1.0
    s = math.sqrt((1.0 - x) * (1.0 + x))
    for i in range(1, m + 1):
        pmm *= (2 * i - 1) * s
    if l == m:
        return pmm
    p_prev, p = pmm, x * (2 * m + 1) * pmm
    for ll in range(m + 1, l):
        p_prev, p = p, ((2 * ll + 1) * x * p - (ll + m) * p_prev) / (ll - m + 1)
    return p


def coupling(m: int, l):
    """a_l with x Pbar_l = a_l Pbar_{l+1} + a_{l-1} Pbar_{l-1} (orthonormal P)."""
    l = np.asarray(l, dtype=float)
    return np.sqrt((l + 1 - m) * (l + 1 + m) / ((2 * l + 1) * (2 * l + 3)))


def normalized_legendre_table(m: int, l_max: int, x) -> np.ndarray:
    """Rows ``l = m..l_max`` of orthonormal ``Pbar_l^m(x)`` on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((l_max - m + 1,) + x.shape)
    c = 1.0 / math.sqrt(2.0)
    for i in range(1, m + 1):
        c *= math.sqrt((2 * i + 1) / (2 * i))
    out[0] = c * ((1.0 - x) * (1.0 + x)) ** (0.5 * m)
    if l_max == m:
        return out
    a = coupling(m, np.arange(m, l_max))
    out[1] = x * out[0] / a[0]
    for i in range(1, l_max - m):
        out[i + 1] = (x * out[i] - a[i - 1] * out[i - 1]) / a[i]
    return out


def legendre_trigform(m: int, l: int) -> TrigForm:
    """Exact ``sin^(1/2)(theta) P_l^m(cos theta)`` as a TrigForm (order 0).

    ``P_l^m = sin^m Q_l(cos)`` with Q from the three-term recurrence, started
    at ``Q_m = (2m-1)!!``.
    """
    u = CosPoly.u()
    q_prev = CosPoly()
    dfact = 1
    for i in range(1, m + 1):
        dfact *= 2 * i - 1
    q = CosPoly([dfact])
    for ll in range(m, l):
        q_prev, q = q, (u * q * (2 * ll + 1) - q_prev * (ll + m)) * Fraction(1, ll - m + 1)
    return TrigForm(2 * m + 1, AlphaSeries([q], 0))


@dataclass(frozen=True)
class LegendreBasis:
    m: int
    l_max: int

    def __post_init__(self):
        if self.m < 0 or self.l_max < self.m:
            raise ValueError(f"need l_max >= m >= 0, got m={self.m}, l_max={self.l_max}")

    @property
    def coupling(self) -> np.ndarray:
        return coupling(self.m, np.arange(self.m, self.l_max))

    def ls(self, parity: int) -> np.ndarray:
        """Degrees l with (l - m) % 2 == parity."""
        return np.arange(self.m + parity, self.l_max + 1, 2)

    @property
    def dimension(self) -> int:
        return self.l_max - self.m + 1


@dataclass(frozen=True)
class SpectralSolution:
    eigenvalue: float
    coeffs: np.ndarray
    parity: int
    l_max: int
    residual_estimate: float
    m: int = 0

    @property
    def ls(self) -> np.ndarray:
        return np.arange(self.m + self.parity, self.m + self.parity + 2 * len(self.coeffs), 2)


def build_matrix(basis: LegendreBasis, alpha: float, parity: int):
    """Diagonal and off-diagonal of the parity block of ``l(l+1) - alpha x^2``."""
    if parity not in (0, 1):
        raise ValueError("parity must be 0 (even l - m) or 1 (odd)")
    m = basis.m
    ls = basis.ls(parity).astype(float)
    # a_{l} for l = m-1 .. l_max+1 with a_{m-1} = 0
    a_ext = np.concatenate([[0.0], coupling(m, np.arange(m, basis.l_max + 2))])
    idx = (ls - m).astype(int)
    diag = ls * (ls + 1) - alpha * (a_ext[idx] ** 2 + a_ext[idx + 1] ** 2)
    off = -alpha * a_ext[idx[:-1] + 1] * a_ext[idx[:-1] + 2]
    return diag, off


def solve(basis: LegendreBasis, alpha: float, k: int) -> list[SpectralSolution]:
    """Lowest ``k`` eigenpairs across both parity blocks, ascending."""
    if basis.l_max < basis.m + 4:
        raise ValueError("l_max must be at least m + 4")
    if k > basis.dimension // 2:
        raise ValueError(f"k={k} exceeds half the basis dimension {basis.dimension}")
    sols = []
    for parity in (0, 1):
        d, e = build_matrix(basis, alpha, parity)
        kk = min(k, len(d))
        vals, vecs, res = eigh_tridiagonal_lowest(d, e, kk, block=(basis.m, parity, basis.l_max))
        for j in range(kk):
            sols.append(SpectralSolution(float(vals[j]), vecs[:, j].copy(), parity,
                                         basis.l_max, float(res[j]), basis.m))
    sols.sort(key=lambda s: (s.eigenvalue, s.parity))
    return sols[:k]


def converge(m: int, alpha: float, k: int) -> list[SpectralSolution]:
    """Double l_max from 32 until the lowest ``k`` eigenvalues are stable.

    Returns the solutions at the coarser of the last two truncations, i.e. the
    first l_max whose refinement changed nothing by more than 1e-11.
    """
    l_max = max(L_MAX_START, m + 4, m + 2 * k + 2)
    prev = solve(LegendreBasis(m, l_max), alpha, k)
    while True:
        nxt_l = 2 * l_max
        if nxt_l > L_MAX_CAP:
            raise ConvergenceError(f"l_max cap {L_MAX_CAP} exceeded for m={m}, alpha={alpha}",
                                   block=(m, None, l_max))
        cur = solve(LegendreBasis(m, nxt_l), alpha, k)
        delta = max(abs(a.eigenvalue - b.eigenvalue) for a, b in zip(prev, cur))
        if delta < EIG_STABILITY:
            return prev
        prev, l_max = cur, nxt_l


def eigenfunction_eval(sol: SpectralSolution, theta):
    """``Psi(theta) = sin^(1/2) theta * sum_l c_l Pbar_l^m(cos theta)``."""
    th = np.asarray(theta, dtype=float)
    if np.any(th <= 0.0) or np.any(th >= math.pi):
        raise ValueError("theta must lie in the open interval (0, pi)")
    table = normalized_legendre_table(sol.m, sol.l_max, np.cos(th))
    rows = table[sol.parity::2][:len(sol.coeffs)]
    val = np.sqrt(np.sin(th)) * np.tensordot(sol.coeffs, rows, axes=1)
    return float(val) if np.ndim(val) == 0 else val


def flammer_to_paper(c2: float) -> float:
    """Parameter map from the ``lambda - c^2 x^2`` convention: alpha = -c^2."""
    return -c2
