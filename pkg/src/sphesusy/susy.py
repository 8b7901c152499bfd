"""Perturbative supersymmetric construction of spheroidal angular functions.

The Schroedinger form of the angular equation is

    -psi'' + V psi = E psi,   V = -1/4 - alpha cos^2 + (m^2 - 1/4)/sin^2,

with psi = sin^(1/2) * Theta. Everything here is exact (Fractions) except the
explicitly numeric helpers (`ground_state_closed_form`, `normalize`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .symtrig import AlphaSeries, CosPoly, TrigForm, series_exp

F = Fraction
U = CosPoly.u()
SIN2 = CosPoly.sin2()


@dataclass(frozen=True)
class ProblemParams:
    m: int
    alpha: float = 0.0
    order: int = 1

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"m must be a non-negative integer, got {self.m!r}")
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order!r}")

    @property
    def half(self) -> Fraction:
        """m + 1/2."""
        return F(2 * self.m + 1, 2)


@dataclass(frozen=True)
class EnergySeries:
    """Eigenvalue as a truncated power series in alpha."""

    coeffs: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, alpha: float) -> float:
        return AlphaSeries(list(self.coeffs))(alpha)

    def as_series(self, order: int | None = None) -> AlphaSeries:
        s = AlphaSeries(list(self.coeffs))
        return s if order is None else s.with_order(order)

    def as_trigform(self, order: int) -> TrigForm:
        polys = [CosPoly([c]) for c in self.coeffs[:order + 1]]
        return TrigForm(0, AlphaSeries(polys, order))

    def strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]


@dataclass(frozen=True)
class LadderParams:
    k: int
    A: Fraction
    B: Fraction


@dataclass(frozen=True)
class Eigenstate:
    m: int
    n: int
    energy: EnergySeries
    wavefunction: TrigForm
    order: int = 1

    @property
    def theta_form(self) -> TrigForm:
        """Theta = psi / sin^(1/2)."""
        return self.wavefunction.times_sin_power(-1)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "order": self.order,
            "energy": self.energy.strings(),
            "wavefunction": self.wavefunction.to_json(),
        }


# --------------------------------------------------------------------------
# potential, superpotential, Riccati equation

def potential(params: ProblemParams) -> TrigForm:
    m, K = params.m, params.order
    # sin^-2 [ (m^2 - 1/4) + (-1/4 - alpha u^2)(1 - u^2) ]
    p0 = CosPoly([F(m * m) - F(1, 4)]) + SIN2 * F(-1, 4)
    p1 = -(U * U) * SIN2
    return TrigForm(-4, AlphaSeries([p0, p1], K))


def superpotential(params: ProblemParams) -> list[TrigForm]:
    """[W0, W1] or [W0, W1, W2]; each stored at alpha^0 in the params ring."""
    m, K = params.m, params.order
    a = 2 * m + 3
    w0 = TrigForm.alpha_term(-2, U * (-params.half), 0, K)
    w1 = TrigForm.alpha_term(2, U * F(1, a), 0, K)
    out = [w0, w1]
    if K >= 2:
        c = F(1, a ** 2 * (2 * m + 5))
        w2 = TrigForm.alpha_term(2, U * (-c / a) + U * SIN2 * c, 0, K)
        out.append(w2)
    return out


def superpotential_series(params: ProblemParams) -> TrigForm:
    """W = W0 + alpha W1 (+ alpha^2 W2) as one form."""
    K = params.order
    out = TrigForm.zero(K)
    for k, w in enumerate(superpotential(params)):
        out = out + TrigForm(w.twice_exponent, AlphaSeries(
            [CosPoly()] * k + [w.poly.terms[0]], K))
    return out


def ground_energy(params: ProblemParams) -> EnergySeries:
    m = params.m
    coeffs = [F(m * (m + 1)), F(-1, 2 * m + 3)]
    if params.order >= 2:
        coeffs.append(F(-(2 * m + 2), (2 * m + 3) ** 3 * (2 * m + 5)))
    return EnergySeries(tuple(coeffs))


def riccati_residual(params: ProblemParams, E: EnergySeries) -> TrigForm:
    """``(W^2 - W') - (V - E)``; zero at every order for the ground energy."""
    K = params.order
    W = superpotential_series(params)
    return W * W - W.diff() - potential(params) + E.as_trigform(K)


def derive_ground_energy(params: ProblemParams) -> EnergySeries:
    """Read the ground energy off the Riccati equation.

    With E = 0 the residual must be a constant at each order, and that
    constant is -E_0k. Raises if some order is theta-dependent.
    """
    r = riccati_residual(params, EnergySeries((F(0),)))
    if not r.is_constant():
        raise ValueError("Riccati residual is theta-dependent; superpotential inconsistent")
    return EnergySeries(tuple(-c for c in r.constant_terms()))


# --------------------------------------------------------------------------
# ground state

def ground_state(params: ProblemParams) -> Eigenstate:
    m, K = params.m, params.order
    a = 2 * m + 3
    x = TrigForm.alpha_term(0, SIN2 * F(-1, 2 * a), 1, K)
    if K >= 2:
        x2 = SIN2 * F(1, 2 * a ** 3 * (2 * m + 5)) - SIN2 * SIN2 * F(1, 4 * a ** 2 * (2 * m + 5))
        x = x + TrigForm.alpha_term(0, x2, 2, K)
    psi = series_exp(x).times_sin_power(2 * m + 1)
    return Eigenstate(m, 0, ground_energy(params), psi, K)


def ground_state_closed_form(params: ProblemParams, theta):
    """Unnormalized exponential form of the ground state (numeric only)."""
    m, al = params.m, params.alpha
    a = 2 * m + 3
    s = np.sin(np.asarray(theta, dtype=float))
    expo = -al * s ** 2 / (2 * a)
    if params.order >= 2:
        expo = expo + al ** 2 * s ** 2 / (2 * a ** 3 * (2 * m + 5)) \
            - al ** 2 * s ** 4 / (4 * a ** 2 * (2 * m + 5))
    return s ** (m + 0.5) * np.exp(expo)


# --------------------------------------------------------------------------
# shape invariance

def _b_step(m: int, A: Fraction) -> Fraction:
    return ((2 * m + 1) * A - 2) / ((2 * m + 1) * A + 4)


def ladder_sequence(params: ProblemParams | int, n: int,
                    b_step: Callable[[int, Fraction], Fraction] = _b_step) -> list[LadderParams]:
    """(A_k, B_k) for k = 1..n+1, starting from A_1 = B_1 = 1.

    ``b_step(m, A_k)`` is the ratio B_{k+1}/B_k; it is a parameter only so the
    verification suite can inject a mutated recursion.
    """
    m = params.m if isinstance(params, ProblemParams) else int(params)
    half = F(2 * m + 1, 2)
    A, B = F(1), F(1)
    out = [LadderParams(1, A, B)]
    for k in range(1, n + 1):
        A, B = A + 1 / half, b_step(m, A) * B
        out.append(LadderParams(k + 1, A, B))
    return out


def b_closed_form(m: int, n: int) -> Fraction:
    """B_{n+1} in closed form (B_1 = 1)."""
    return F((2 * m - 1) * (2 * m + 1) * (2 * m + 3),
             (2 * n + 2 * m - 1) * (2 * n + 2 * m + 1) * (2 * n + 2 * m + 3))


def b_sum_closed_form(m: int, n: int, b_next: Fraction | None = None) -> Fraction:
    """B_1 + ... + B_n = [(2m+3) B_1 - (2n+2m+3) B_{n+1}] / 4.

    ``b_next`` is B_{n+1}; by default its closed form.
    """
    if b_next is None:
        b_next = b_closed_form(m, n)
    return F(1, 4) * ((2 * m + 3) - (2 * n + 2 * m + 3) * b_next)


def remainder(m: int, step: LadderParams, nxt: LadderParams) -> EnergySeries:
    """Constant R_k with V+(A_k, B_k) = V-(A_{k+1}, B_{k+1}) + R_k."""
    return EnergySeries(((2 * m + 1) * step.A + 1, -(step.B + nxt.B) / (2 * m + 3)))


def partner_potential(params: ProblemParams, step: LadderParams, sign: int) -> TrigForm:
    """V-(A,B) (sign=-1) or V+(A,B) (sign=+1) = W^2 -/+ W' at first order."""
    W = _ladder_superpotential(params.m, step, 1)
    return W * W + W.diff() * sign


def _ladder_superpotential(m: int, step: LadderParams, order: int) -> TrigForm:
    half = F(2 * m + 1, 2)
    w0 = TrigForm.alpha_term(-2, U * (-half * step.A), 0, order)
    w1 = TrigForm.alpha_term(2, U * (step.B / (2 * m + 3)), 1, order)
    return w0 + w1


def energy_level_bsum(params: ProblemParams, n: int) -> EnergySeries:
    """E00 + E01 alpha + sum_k R_k, summing the recursion directly."""
    m = params.m
    seq = ladder_sequence(m, n)
    c0 = F(m * (m + 1))
    c1 = F(-1, 2 * m + 3)
    for k in range(n):
        r = remainder(m, seq[k], seq[k + 1])
        c0 += r.coeffs[0]
        c1 += r.coeffs[1]
    return EnergySeries((c0, c1))


def energy_level_lform(m: int, n: int) -> EnergySeries:
    """l(l+1) - (alpha/2) [1 - (2m-1)(2m+1)/((2l-1)(2l+3))] with l = m + n."""
    l = m + n
    return EnergySeries((F(l * (l + 1)),
                         -F(1, 2) * (1 - F((2 * m - 1) * (2 * m + 1), (2 * l - 1) * (2 * l + 3)))))


def energy_level(params: ProblemParams, n: int) -> EnergySeries:
    if n < 0:
        raise ValueError("n must be non-negative")
    a = energy_level_bsum(params, n)
    b = energy_level_lform(params.m, n)
    if a != b:
        raise AssertionError(f"energy forms disagree for m={params.m}, n={n}: {a} vs {b}")
    if params.order == 2:
        if n != 0:
            raise ValueError("second-order energies are only available for n = 0")
        return ground_energy(params)
    return a


# --------------------------------------------------------------------------
# ladder operators

@dataclass(frozen=True)
class RaisingOperator:
    """-d/dtheta + cot_coeff + sin2_coeff, for ladder step k."""

    k: int
    step: LadderParams
    cot_coeff: TrigForm
    sin2_coeff: TrigForm
    multiplier: TrigForm = field(repr=False, default=None)


def raising_operator(params: ProblemParams, k: int,
                     ladder: list[LadderParams] | None = None) -> RaisingOperator:
    m = params.m
    if ladder is None:
        ladder = ladder_sequence(m, k - 1)
    step = ladder[k - 1]
    # same W(A_k, B_k) whose exp(-int W) is the partner ground state
    cot = TrigForm.alpha_term(-2, U * (-params.half * step.A), 0, 1)
    s2 = TrigForm.alpha_term(2, U * (step.B / (2 * m + 3)), 1, 1)
    return RaisingOperator(k, step, cot, s2, cot + s2)


def apply_raising(op: RaisingOperator, psi: TrigForm) -> TrigForm:
    return -psi.diff() + op.multiplier * psi


def apply_lowering(op: RaisingOperator, psi: TrigForm) -> TrigForm:
    """Adjoint partner d/dtheta + W of a raising operator."""
    return psi.diff() + op.multiplier * psi


def partner_ground(m: int, step: LadderParams) -> TrigForm:
    """sin^((m+1/2) A) exp(-alpha B sin^2 / (4m+6)), first order in alpha."""
    twice = int((2 * m + 1) * step.A)
    x = TrigForm.alpha_term(0, SIN2 * (-step.B / (4 * m + 6)), 1, 1)
    return series_exp(x).times_sin_power(twice)


def excited_state(params: ProblemParams, n: int) -> Eigenstate:
    """n-th state from the partner ground state via n raising operators.

    A(A_n) acts first, A(A_1) last. Result is unnormalized.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    m = params.m
    if n == 0 and params.order == 2:
        return ground_state(params)
    if params.order != 1:
        raise ValueError("excited states are built at first order only")
    seq = ladder_sequence(m, n)
    psi = partner_ground(m, seq[n])
    for k in range(n, 0, -1):
        psi = apply_raising(raising_operator(params, k, seq), psi)
    return Eigenstate(m, n, energy_level(params, n), psi, 1)


def hamiltonian_residual(state: Eigenstate) -> TrigForm:
    """``(-d^2 + V - E) psi`` computed in a ring one order wider than the state.

    Orders up to the state's order vanish identically for a correct state;
    the top order is the truncation error.
    """
    K = state.order + 1
    psi = state.wavefunction.with_order(K)
    V = potential(ProblemParams(state.m, order=2)).with_order(K)
    E = state.energy.as_trigform(state.order).with_order(K)
    return -psi.diff().diff() + V * psi - E * psi


# --------------------------------------------------------------------------
# numerics

def gauss_theta(nodes: int = 256):
    """Gauss-Legendre nodes and weights mapped to (0, pi)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w


def l2_norm(form: TrigForm, alpha: float, nodes: int = 256) -> float:
    th, w = gauss_theta(nodes)
    v = form.evaluate(th, alpha)
    return float(np.sqrt(np.dot(w, v * v)))


def normalize(state: Eigenstate, alpha: float, nodes: int = 256) -> float:
    """Factor that makes the wavefunction unit-norm on (0, pi) at ``alpha``.

    The quadrature is repeated with twice the nodes; the two results must
    agree to 1e-12 relative.
    """
    n1 = l2_norm(state.wavefunction, alpha, nodes)
    n2 = l2_norm(state.wavefunction, alpha, 2 * nodes)
    if abs(n1 - n2) > 1e-12 * n2:
        raise ArithmeticError(f"normalization quadrature unresolved: {n1} vs {n2}")
    return 1.0 / n2
