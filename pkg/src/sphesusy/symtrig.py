"""Exact algebra of functions ``sin^p(theta) * sum_k alpha^k P_k(cos theta)``.

Coefficients are :class:`fractions.Fraction`, so every identity checked with
this module is checked without rounding. The sin exponent ``p`` is stored
doubled (``twice_exponent``) because the physically relevant exponents are
half-integers such as ``m + 1/2``.

Three layers:

* :class:`CosPoly`  - polynomial in ``u = cos(theta)``.
* :class:`AlphaSeries` - power series in ``alpha`` truncated at a fixed order,
  with either Fraction or CosPoly payloads.
* :class:`TrigForm` - ``sin^p(theta)`` times an AlphaSeries of CosPoly, kept in
  canonical form so that equality is structural.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction

__all__ = [
    "Rational", "CosPoly", "AlphaSeries", "TrigForm", "IncompatibleFamilyError",
    "trig_add", "trig_mul", "trig_diff", "trig_eval", "trig_equal_zero",
]


class IncompatibleFamilyError(ValueError):
    """Raised when two sin exponents do not differ by an even integer."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return Fraction(x)


class CosPoly:
    """Polynomial in ``u = cos(theta)`` with exact rational coefficients.

    ``coeffs[j]`` multiplies ``u**j``. Trailing zeros are stripped, so the zero
    polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "_float")

    def __init__(self, coeffs: Iterable = ()):
        c = [_as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)
        self._float = None

    @classmethod
    def constant(cls, value) -> CosPoly:
        return cls([value])

    @classmethod
    def u(cls) -> CosPoly:
        return cls([0, 1])

    @classmethod
    def sin2(cls) -> CosPoly:
        """``1 - u^2``, i.e. sin^2(theta)."""
        return cls([1, 0, -1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, CosPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == CosPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"CosPoly({[str(c) for c in self.coeffs]})"

    def __neg__(self):
        return CosPoly(-c for c in self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CosPoly([other])
        if not isinstance(other, CosPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for j, c in enumerate(b):
            out[j] += c
        return CosPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            return CosPoly(c * other for c in self.coeffs)
        if not isinstance(other, CosPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return CosPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return CosPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = CosPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def deriv(self) -> CosPoly:
        return CosPoly(j * c for j, c in enumerate(self.coeffs) if j > 0)

    def divmod_sin2(self) -> tuple[CosPoly, CosPoly]:
        """Divide by ``1 - u^2``; returns ``(quotient, remainder)``."""
        # work with -(u^2 - 1): divide by the monic u^2 - 1 then flip sign
        rem = list(self.coeffs)
        if len(rem) < 3:
            return CosPoly(), CosPoly(rem)
        quot = [Fraction(0)] * (len(rem) - 2)
        for j in range(len(rem) - 1, 1, -1):
            q = rem[j]
            quot[j - 2] = q
            rem[j] = Fraction(0)
            rem[j - 2] += q
        return -CosPoly(quot), CosPoly(rem[:2])

    def float_coeffs(self) -> np.ndarray:
        if self._float is None:
            self._float = np.array([float(c) for c in self.coeffs], dtype=float)
        return self._float

    def __call__(self, u):
        """Horner evaluation at float ``u`` (scalar or array)."""
        fc = self.float_coeffs()
        acc = np.zeros_like(np.asarray(u, dtype=float))
        for c in fc[::-1]:
            acc = acc * u + c
        return acc

    def to_str(self, var: str = "cos(θ)") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if j == 0:
                body = str(mag)
            else:
                mono = var if j == 1 else f"{var}^{j}"
                body = mono if mag == 1 else f"{mag}·{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _zero_like(x):
    if isinstance(x, CosPoly):
        return CosPoly()
    if isinstance(x, TrigForm):
        return x * 0
    return Fraction(0)


class AlphaSeries:
    """Power series in alpha truncated after ``alpha**order``.

    Products drop every term beyond the truncation order. Payloads may be
    Fractions or CosPolys; they only need ``+`` and ``*``.
    """

    __slots__ = ("order", "terms")

    def __init__(self, terms: Sequence, order: int | None = None):
        terms = list(terms)
        if order is None:
            order = len(terms) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        if not terms:
            raise ValueError("AlphaSeries needs at least one term to fix its payload type")
        zero = _zero_like(terms[0])
        terms = [_as_fraction(t) if isinstance(t, int) else t for t in terms[:order + 1]]
        terms += [zero] * (order + 1 - len(terms))
        self.order = order
        self.terms = tuple(terms)

    def __getitem__(self, k: int):
        return self.terms[k]

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AlphaSeries):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    def __hash__(self):
        return hash((self.order, self.terms))

    def __repr__(self):
        return f"AlphaSeries({list(self.terms)!r}, order={self.order})"

    def _check(self, other: AlphaSeries):
        if self.order != other.order:
            raise ValueError(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, AlphaSeries):
            return NotImplemented
        self._check(other)
        return AlphaSeries([a + b for a, b in zip(self.terms, other.terms)], self.order)

    def __neg__(self):
        return AlphaSeries([-a for a in self.terms], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlphaSeries([a * other for a in self.terms], self.order)
        if not isinstance(other, AlphaSeries):
            return NotImplemented
        self._check(other)
        K = self.order
        out = [_zero_like(self.terms[0]) for _ in range(K + 1)]
        for i, a in enumerate(self.terms):
            for j in range(K + 1 - i):
                out[i + j] = out[i + j] + a * other.terms[j]
        return AlphaSeries(out, K)

    __rmul__ = __mul__

    def with_order(self, order: int) -> AlphaSeries:
        """Truncate or zero-pad to a new order."""
        return AlphaSeries(self.terms[:order + 1], order)

    def map(self, fn) -> AlphaSeries:
        return AlphaSeries([fn(t) for t in self.terms], self.order)

    def __call__(self, alpha: float) -> float:
        acc = 0.0
        for c in reversed(self.terms):
            acc = acc * alpha + float(c)
        return acc


def _sin2_power(j: int) -> CosPoly:
    return CosPoly.sin2() ** j


class TrigForm:
    """``sin(theta)**(twice_exponent/2) * sum_k alpha**k * P_k(cos theta)``.

    Instances are immutable and always canonical: the polynomials are divided
    by ``1 - cos^2`` for as long as every alpha order is divisible, raising the
    exponent each time. The zero form is stored with exponent 0.
    """

    __slots__ = ("twice_exponent", "poly")

    def __init__(self, twice_exponent: int, poly: AlphaSeries):
        te = int(twice_exponent)
        terms = list(poly.terms)
        if all(t.is_zero() for t in terms):
            te = 0
        else:
            while True:
                divided = [t.divmod_sin2() for t in terms]
                if any(not r.is_zero() for _, r in divided):
                    break
                terms = [q for q, _ in divided]
                te += 4
        self.twice_exponent = te
        self.poly = AlphaSeries(terms, poly.order)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_coeffs(cls, twice_exponent: int, coeffs: Sequence[Sequence], order: int | None = None):
        """Build from nested lists: ``coeffs[k][j]`` multiplies ``alpha^k cos^j``."""
        polys = [CosPoly(c) for c in coeffs] or [CosPoly()]
        return cls(twice_exponent, AlphaSeries(polys, order))

    @classmethod
    def constant(cls, value, order: int = 1):
        return cls(0, AlphaSeries([CosPoly([value])], order))

    @classmethod
    def zero(cls, order: int = 1):
        return cls(0, AlphaSeries([CosPoly()], order))

    @classmethod
    def alpha_term(cls, twice_exponent: int, poly: CosPoly, power: int, order: int):
        """``sin^p * alpha^power * poly``, in the ring of the given order."""
        terms = [CosPoly()] * (order + 1)
        if power <= order:
            terms[power] = poly
        return cls(twice_exponent, AlphaSeries(terms, order))

    # -- properties -------------------------------------------------------
    @property
    def order(self) -> int:
        return self.poly.order

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.twice_exponent, 2)

    def is_zero(self) -> bool:
        return all(t.is_zero() for t in self.poly.terms)

    def coefficient(self, k: int) -> TrigForm:
        """The alpha^k part alone, as an order-0 form."""
        return TrigForm(self.twice_exponent, AlphaSeries([self.poly.terms[k]], 0))

    def with_order(self, order: int) -> TrigForm:
        return TrigForm(self.twice_exponent, self.poly.with_order(order))

    def is_constant(self) -> bool:
        """True if the form is a theta-independent constant at every order."""
        if self.is_zero():
            return True
        return self.twice_exponent == 0 and all(t.degree <= 0 for t in self.poly.terms)

    def constant_terms(self) -> list[Fraction]:
        if not self.is_constant():
            raise ValueError("form depends on theta")
        return [t.coeffs[0] if t.coeffs else Fraction(0) for t in self.poly.terms]

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TrigForm):
            return NotImplemented
        return (self.twice_exponent, self.poly) == (other.twice_exponent, other.poly)

    def __hash__(self):
        return hash((self.twice_exponent, self.poly))

    def __repr__(self):
        return f"TrigForm({self.twice_exponent}, {[t.coeffs for t in self.poly.terms]})"

    # -- arithmetic -------------------------------------------------------
    def lowered_to(self, twice_exponent: int) -> AlphaSeries:
        """Polynomials rewritten over ``sin^(twice_exponent/2)``."""
        shift = self.twice_exponent - twice_exponent
        if shift < 0 or shift % 4:
            raise IncompatibleFamilyError("incompatible half-integer family")
        factor = _sin2_power(shift // 4)
        return self.poly.map(lambda t: t * factor)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TrigForm.constant(other, self.order)
        if not isinstance(other, TrigForm):
            return NotImplemented
        if self.order != other.order:
            raise ValueError(f"truncation orders differ: {self.order} vs {other.order}")
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if (self.twice_exponent - other.twice_exponent) % 4:
            raise IncompatibleFamilyError("incompatible half-integer family")
        te = min(self.twice_exponent, other.twice_exponent)
        return TrigForm(te, self.lowered_to(te) + other.lowered_to(te))

    __radd__ = __add__

    def __neg__(self):
        return TrigForm(self.twice_exponent, -self.poly)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TrigForm(self.twice_exponent, self.poly * _as_fraction(other))
        if not isinstance(other, TrigForm):
            return NotImplemented
        if self.order != other.order:
            raise ValueError(f"truncation orders differ: {self.order} vs {other.order}")
        return TrigForm(self.twice_exponent + other.twice_exponent, self.poly * other.poly)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = TrigForm.constant(1, self.order)
        for _ in range(k):
            out = out * self
        return out

    def times_sin_power(self, twice_shift: int) -> TrigForm:
        return TrigForm(self.twice_exponent + twice_shift, self.poly)

    def diff(self) -> TrigForm:
        # d/dθ[sin^p P(u)] = sin^(p-1) [p u P - (1-u^2) P']
        p = self.exponent
        u, s2 = CosPoly.u(), CosPoly.sin2()
        new = self.poly.map(lambda P: u * P * p - s2 * P.deriv())
        return TrigForm(self.twice_exponent - 2, new)

    # -- numerics ---------------------------------------------------------
    def evaluate(self, theta, alpha: float = 0.0):
        """Float value at ``theta`` in (0, pi); ``theta`` may be an array."""
        th = np.asarray(theta, dtype=float)
        if np.any(th <= 0.0) or np.any(th >= math.pi):
            raise ValueError("theta must lie in the open interval (0, pi)")
        u = np.cos(th)
        acc = np.zeros_like(th)
        for P in reversed(self.poly.terms):
            acc = acc * alpha + P(u)
        out = np.sin(th) ** (self.twice_exponent / 2.0) * acc
        return float(out) if out.ndim == 0 else out

    # -- text / JSON ------------------------------------------------------
    def to_str(self, max_order: int | None = None) -> str:
        K = self.order if max_order is None else min(self.order, max_order)
        p = self.exponent
        pstr = str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"
        pieces = []
        for k in range(K + 1):
            P = self.poly.terms[k]
            if k and P.is_zero():
                continue
            body = P.to_str()
            if k == 0:
                pieces.append(body)
            else:
                a = "α" if k == 1 else f"α^{k}"
                pieces.append(f"{a}·({body})")
        return f"sin^{{{pstr}}}(θ) · [" + " + ".join(pieces) + "]"

    def to_json(self) -> dict:
        return {
            "twice_exponent": self.twice_exponent,
            "order": self.order,
            "coeffs": [[[str(c.numerator), str(c.denominator)] for c in P.coeffs]
                       for P in self.poly.terms],
        }

    @classmethod
    def from_json(cls, obj) -> TrigForm:
        if isinstance(obj, str):
            obj = json.loads(obj)
        polys = [CosPoly(Fraction(int(n), int(d)) for n, d in row) for row in obj["coeffs"]]
        form = cls(int(obj["twice_exponent"]), AlphaSeries(polys, int(obj["order"])))
        return form


def trig_add(a: TrigForm, b: TrigForm) -> TrigForm:
    return a + b


def trig_mul(a: TrigForm, b: TrigForm) -> TrigForm:
    return a * b


def trig_diff(a: TrigForm) -> TrigForm:
    return a.diff()


def trig_eval(a: TrigForm, theta: float, alpha: float) -> float:
    return a.evaluate(theta, alpha)


def trig_equal_zero(a: TrigForm) -> bool:
    return a.is_zero()


def series_exp(x: TrigForm) -> TrigForm:
    """``exp(x)`` truncated at the ring order; ``x`` must vanish at alpha^0."""
    if not x.coefficient(0).is_zero():
        raise ValueError("series_exp needs an argument with no alpha^0 part")
    out = TrigForm.constant(1, x.order)
    term = TrigForm.constant(1, x.order)
    for j in range(1, x.order + 1):
        term = term * x * Fraction(1, j)
        out = out + term
    return out
