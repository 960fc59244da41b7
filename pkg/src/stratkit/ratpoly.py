"""Exact rational scalars and one-variable polynomials over the rationals.

All scalar quantities in the toolkit are `fractions.Fraction` values; no
floating point is used anywhere, so equality tests on stratum boundaries
are exact. Polynomials are stored densely, lowest degree first, with
trailing zeros trimmed.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Union

from .errors import DegenerateError, DegreeError

Rational = Fraction

RationalLike = Union[int, str, Fraction]

# degree of the zero polynomial; stands in for "minus infinity"
ZERO_DEGREE = -1


def rat(value: RationalLike) -> Fraction:
    """Parse a rational from an int, Fraction or a "p/q" string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rat_str(value: Fraction) -> str:
    """Serialize a rational as "p" or "p/q" (never a float)."""
    return str(Fraction(value))


class Polynomial:
    """A polynomial in one variable with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @property
    def degree(self) -> int:
        """Degree; ZERO_DEGREE (= -1) for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            self.coefficient(i) + other.coefficient(i) for i in range(n)
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            self.coefficient(i) - other.coefficient(i) for i in range(n)
        )

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __mul__(self, other: Union["Polynomial", RationalLike]) -> "Polynomial":
        if isinstance(other, Polynomial):
            if self.is_zero() or other.is_zero():
                return Polynomial()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return Polynomial(out)
        return Polynomial(c * rat(other) for c in self.coeffs)

    __rmul__ = __mul__

    def scale(self, factor: RationalLike) -> "Polynomial":
        return self * rat(factor)

    def evaluate(self, x: RationalLike) -> Fraction:
        """Exact Horner evaluation."""
        xv = rat(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * xv + c
        return acc

    def __call__(self, x: RationalLike) -> Fraction:
        return self.evaluate(x)

    def is_integer_valued(self) -> bool:
        """True iff the polynomial takes integer values at every integer.

        Checked via the finite-difference (binomial basis) coefficients,
        which must all be integers.
        """
        if self.is_zero():
            return True
        vals = [self.evaluate(k) for k in range(self.degree + 1)]
        while vals:
            if vals[0].denominator != 1:
                return False
            vals = [b - a for a, b in zip(vals, vals[1:])]
        return True

    def to_json(self) -> list[str]:
        """Coefficients as "p/q" strings, lowest degree first."""
        return [rat_str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Iterable[RationalLike]) -> "Polynomial":
        return cls(data)

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coefficient(k)
            if c == 0:
                continue
            if k == 0:
                parts.append(rat_str(c))
            elif k == 1:
                parts.append(f"{rat_str(c)}*x" if c != 1 else "x")
            else:
                parts.append(f"{rat_str(c)}*x^{k}" if c != 1 else f"x^{k}")
        return " + ".join(parts).replace("+ -", "- ")


X = Polynomial((0, 1))
ZERO = Polynomial()
ONE = Polynomial((1,))


def lex_compare(p: Polynomial, q: Polynomial) -> int:
    """Compare coefficient vectors from the highest degree downward.

    Returns -1, 0 or 1. Equivalent to comparing p(x) with q(x) for all
    sufficiently large x.
    """
    top = max(p.degree, q.degree)
    for k in range(top, -1, -1):
        a, b = p.coefficient(k), q.coefficient(k)
        if a != b:
            return -1 if a < b else 1
    return 0


def multiplicity(p: Polynomial, e: int) -> Fraction:
    """e! times the leading coefficient; generalizes the rank of a sheaf."""
    if p.degree != e:
        raise DegreeError(f"expected degree {e}, got {p.degree}")
    return factorial(e) * p.coefficient(e)


def reduced_hp(p: Polynomial, e: int) -> Polynomial:
    """p divided by its multiplicity; the slope-like stability datum."""
    r = multiplicity(p, e)
    if r == 0:
        raise DegenerateError("zero multiplicity")
    return p.scale(Fraction(1) / r)
