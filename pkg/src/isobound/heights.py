"""Logarithmic Weil heights of rational and quadratic algebraic numbers.

A quadratic number is stored as a + b sqrt(d) with rational a, b and a
squarefree radicand d; the embedding is the one with sqrt(d) > 0 for
d > 0 and sqrt(d) = i sqrt(|d|) for d < 0. The height of a number of
degree D with primitive minimal polynomial A prod (x - r_i) is

    h = (1/D) (log A + sum_i log max(1, |r_i|)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .arith import factorize
from .report import Check

DEFAULT_PREC = 256


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * d with d squarefree (sign kept on d)."""
    if n == 0:
        return 0, 0
    s, d = 1, (1 if n > 0 else -1)
    for p, e in factorize(abs(n)).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


@dataclass(frozen=True)
class AlgebraicNumber:
    a: Fraction
    b: Fraction = Fraction(0)
    d: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.b == 0 or self.d == 0:
            object.__setattr__(self, "b", Fraction(0))
            object.__setattr__(self, "d", 0)
            return
        s, d = _squarefree_split(self.d)
        if d == 1:
            object.__setattr__(self, "a", self.a + self.b * s)
            object.__setattr__(self, "b", Fraction(0))
            object.__setattr__(self, "d", 0)
        else:
            object.__setattr__(self, "b", self.b * s)
            object.__setattr__(self, "d", d)

    @classmethod
    def rational(cls, value) -> "AlgebraicNumber":
        return cls(Fraction(value))

    @classmethod
    def from_minpoly(cls, A: int, B: int, C: int, root: int = 1) -> "AlgebraicNumber":
        """Root (-B + root * sqrt(B^2 - 4AC)) / (2A) of an irreducible quadratic."""
        disc = B * B - 4 * A * C
        s, d = _squarefree_split(disc)
        if d in (0, 1):
            raise ValueError("polynomial is reducible over Q")
        return cls(Fraction(-B, 2 * A), Fraction(root * s, 2 * A), d)

    @property
    def is_rational(self) -> bool:
        return self.d == 0

    @property
    def degree(self) -> int:
        return 1 if self.is_rational else 2

    def minimal_polynomial(self) -> tuple[int, ...]:
        """Primitive integer coefficients, leading coefficient positive."""
        if self.is_rational:
            return (self.a.denominator, -self.a.numerator)
        coeffs = [Fraction(1), -2 * self.a, self.a * self.a - self.d * self.b * self.b]
        lcm = math.lcm(*(c.denominator for c in coeffs))
        ints = [int(c * lcm) for c in coeffs]
        g = math.gcd(*ints)
        return tuple(c // g for c in ints)

    def conjugate(self) -> "AlgebraicNumber":
        return AlgebraicNumber(self.a, -self.b, self.d)

    def embeddings(self, prec: int = DEFAULT_PREC) -> list:
        with mpmath.workprec(prec):
            a = mpmath.mpf(self.a.numerator) / self.a.denominator
            if self.is_rational:
                return [a]
            b = mpmath.mpf(self.b.numerator) / self.b.denominator
            root = mpmath.sqrt(self.d) if self.d > 0 else mpmath.mpc(0, mpmath.sqrt(-self.d))
            return [a + b * root, a - b * root]

    def value(self, prec: int = DEFAULT_PREC):
        return self.embeddings(prec)[0]

    def _field(self, other: "AlgebraicNumber") -> int:
        if self.d and other.d and self.d != other.d:
            raise ValueError("numbers lie in different quadratic fields")
        return self.d or other.d

    def __add__(self, other):
        other = _coerce(other)
        d = self._field(other)
        return AlgebraicNumber(self.a + other.a, self.b + other.b, d)

    def __neg__(self):
        return AlgebraicNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        d = self._field(other)
        return AlgebraicNumber(self.a * other.a + d * self.b * other.b,
                               self.a * other.b + self.b * other.a, d)

    def inverse(self) -> "AlgebraicNumber":
        norm = self.a * self.a - self.d * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return AlgebraicNumber(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0


def _coerce(value) -> AlgebraicNumber:
    return value if isinstance(value, AlgebraicNumber) else AlgebraicNumber(Fraction(value))


def height(x: AlgebraicNumber, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Absolute logarithmic height; h(0) = 0."""
    x = _coerce(x)
    with mpmath.workprec(prec + 16):
        if x.is_rational:
            p, q = x.a.numerator, x.a.denominator
            out = mpmath.log(max(abs(p), q)) if p else mpmath.mpf(0)
        else:
            A, B, C = x.minimal_polynomial()
            if x.d < 0:
                # complex pair with |r|^2 = C / A
                out = (mpmath.log(A) + max(mpmath.mpf(0), mpmath.log(mpmath.mpf(C) / A))) / 2
            else:
                roots = x.embeddings(prec + 32)
                out = (mpmath.log(A) + mpmath.fsum(max(mpmath.mpf(0), mpmath.log(abs(r)))
                                                   for r in roots)) / 2
    with mpmath.workprec(prec):
        return +out


def mahler_measure(x: AlgebraicNumber, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.exp(x.degree * height(x, prec))


def multiplicative_height(x: AlgebraicNumber, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.exp(height(x, prec))


def unit_height_decomposition(magnitudes: Sequence, D: int, prec: int = DEFAULT_PREC):
    """Both one-sided sums for the height of a unit from |sigma(x)| over D embeddings.

    Returns (sum of log|s| over |s| > 1, -sum of log|s| over |s| < 1), each
    divided by D; for a unit (product of magnitudes 1) both equal h(x).
    """
    if len(magnitudes) != D:
        raise ValueError("need one magnitude per embedding")
    with mpmath.workprec(prec):
        logs = [mpmath.log(mpmath.mpf(m)) for m in magnitudes]
        total = mpmath.fsum(logs)
        if abs(total) > mpmath.ldexp(D, -prec // 2):
            raise ValueError("magnitudes do not multiply to 1")
        upper = mpmath.fsum(v for v in logs if v > 0) / D
        lower = -mpmath.fsum(v for v in logs if v < 0) / D
    if abs(upper - lower) > mpmath.mpf("1e-10") * D:
        raise ArithmeticError("one-sided height sums disagree")
    return upper, lower


def height_arithmetic_checks(x: AlgebraicNumber, y: AlgebraicNumber,
                             prec: int = DEFAULT_PREC) -> list[Check]:
    """H(x - y) <= 2 H(x) H(y) and h(x - y) >= h(x) - h(y) - log 2."""
    diff = _coerce(x) - _coerce(y)
    hx, hy, hd = height(x, prec), height(y, prec), height(diff, prec)
    with mpmath.workprec(prec):
        slack = mpmath.ldexp(1, 16 - prec)
        log2 = mpmath.log(2)
        return [
            Check("difference_upper", hd <= hx + hy + log2 + slack, hd, hx + hy + log2),
            Check("difference_lower", hd + slack >= hx - hy - log2, hd, hx - hy - log2),
        ]
