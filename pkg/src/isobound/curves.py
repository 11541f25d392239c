"""Curves y^2 = 4x^3 - g2 x - g3 over Q, their period lattices, CM points
and the constant c(xi) measuring how far j drifts from j(xi) near xi.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .errors import PrecisionExhausted, PreconditionError
from .halfplane import (DEFAULT_PREC, HPoint, I_POINT, ZETA, ZETA2, UnimodularMatrix,
                        _compare, on_boundary, reduce)
from .heights import AlgebraicNumber, height
from .report import Check
from .modular import eisenstein, j_derivative, j_eval

# j-invariants of the 13 imaginary quadratic orders of class number one
CM_J_INVARIANTS = frozenset([
    0, 1728, -3375, 8000, -32768, 54000, 287496, -884736, -12288000, 16581375,
    -884736000, -147197952000, -262537412640768000,
])

PERIOD_GUARD = 64


def j_invariant(g2, g3) -> Fraction:
    """1728 g2^3 / (g2^3 - 27 g3^2) in exact arithmetic."""
    g2, g3 = Fraction(g2), Fraction(g3)
    den = g2 ** 3 - 27 * g3 ** 2
    if den == 0:
        raise ValueError("singular curve: g2^3 = 27 g3^2")
    return 1728 * g2 ** 3 / den


@dataclass(frozen=True)
class CurveOverQ:
    g2: Fraction
    g3: Fraction
    cm_flag: bool = False          # caller asserts the curve has no CM

    def __post_init__(self):
        object.__setattr__(self, "g2", Fraction(self.g2))
        object.__setattr__(self, "g3", Fraction(self.g3))
        if self.modular_discriminant == 0:
            raise ValueError("singular curve: g2^3 = 27 g3^2")

    @property
    def modular_discriminant(self) -> Fraction:
        return self.g2 ** 3 - 27 * self.g3 ** 2

    @property
    def discriminant(self) -> Fraction:
        return 16 * self.modular_discriminant

    @property
    def j0(self) -> Fraction:
        return j_invariant(self.g2, self.g3)

    @property
    def has_cm(self) -> bool:
        return self.j0 in CM_J_INVARIANTS

    def to_dict(self) -> dict:
        return {"g2": str(self.g2), "g3": str(self.g3), "j0": str(self.j0),
                "discriminant": str(self.discriminant), "has_cm": self.has_cm}


@dataclass(frozen=True)
class Periods:
    """Lattice basis (omega1, omega2) with tau0 = omega2 / omega1 reduced."""

    omega1: mpmath.mpc
    omega2: mpmath.mpc
    tau0: HPoint
    g2_check: mpmath.mpc
    g3_check: mpmath.mpc

    @property
    def omega_max(self) -> mpmath.mpf:
        return max(mpmath.mpf(1), abs(self.omega1), abs(self.omega2))


def _agm(a, b, tol):
    for _ in range(10_000):
        a1, b1 = (a + b) / 2, mpmath.sqrt(a * b)
        if abs(a1 - b1) > abs(a1 + b1):
            b1 = -b1
        a, b = a1, b1
        if abs(a - b) <= tol * abs(a):
            return a
    raise PrecisionExhausted("AGM did not converge")


def lattice_invariants(omega1, tau: mpmath.mpc, prec: int):
    """(g2, g3) of Z omega1 + Z omega1 tau from E4 and E6."""
    with mpmath.workprec(prec):
        pi = mpmath.pi
        g2 = 4 * pi ** 4 / 3 * eisenstein(4, tau, prec) / omega1 ** 4
        g3 = 8 * pi ** 6 / 27 * eisenstein(6, tau, prec) / omega1 ** 6
        return g2, g3


def periods(E: CurveOverQ, prec: int = DEFAULT_PREC) -> Periods:
    """Period lattice from the complex AGM, reduced so that tau0 lies in the
    closed fundamental domain, and checked by recomputing g2 and g3."""
    work = prec + PERIOD_GUARD
    with mpmath.workprec(work):
        g2 = mpmath.mpf(E.g2.numerator) / E.g2.denominator
        g3 = mpmath.mpf(E.g3.numerator) / E.g3.denominator
        roots = mpmath.polyroots([4, 0, -g2, -g3], maxsteps=500, extraprec=2 * work)
        tol = mpmath.ldexp(1, 8 - work)
        accept = mpmath.ldexp(1, 16 - prec)
        for e1, e2, e3 in itertools.permutations(roots):
            a, b, c = mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2), mpmath.sqrt(e2 - e3)
            if abs(a - b) > abs(a + b):
                b = -b
            if abs(a - c) > abs(a + c):
                c = -c
            if min(abs(a), abs(b), abs(c)) == 0:
                continue
            w1 = mpmath.pi / _agm(a, b, tol)
            w2 = mpmath.pi / _agm(c, 1j * b, tol)
            tau = w2 / w1
            if abs(tau.imag) <= tol:
                continue
            if tau.imag < 0:
                w2, tau = -w2, -tau
            point, g = reduce(HPoint(tau.real, tau.imag, work))
            om1 = g.c * w2 + g.d * w1
            om2 = g.a * w2 + g.b * w1
            tau0 = om2 / om1
            G2, G3 = lattice_invariants(om1, tau0, work)
            if abs(G2 - g2) <= accept * max(1, abs(g2)) and abs(G3 - g3) <= accept * max(1, abs(g3)):
                return Periods(om1, om2, HPoint(tau0.real, tau0.imag, work), G2, G3)
    raise PrecisionExhausted("no root ordering reproduced (g2, g3); raise the precision")


def curve_height(E: CurveOverQ) -> mpmath.mpf:
    """max{1, h(1 : g2 : g3), h(j0)}."""
    L = math.lcm(E.g2.denominator, E.g3.denominator)
    ints = [L, int(E.g2 * L), int(E.g3 * L)]
    g = math.gcd(*ints)
    proj = mpmath.log(max(abs(v) // g for v in ints))
    return max(mpmath.mpf(1), proj, height(AlgebraicNumber(E.j0)))


def tau_height_check(lattice: Periods, D: int, h_j0, prec: int = DEFAULT_PREC) -> Check:
    """|tau0| / D <= 3 max{1, h(j0)}."""
    if D < 1:
        raise ValueError("degree must be at least 1")
    with mpmath.workprec(prec):
        lhs = abs(lattice.tau0.value) / D
        rhs = 3 * max(mpmath.mpf(1), mpmath.mpf(h_j0))
        return Check("tau_height", lhs <= rhs, lhs, rhs)


# --- CM points ---------------------------------------------------------------

def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Primitive reduced forms (a, b, c) of discriminant disc < 0.

    Uses |b| <= a <= c with b <= 0 when |b| = a or a = c, so every root
    (-b + sqrt(disc)) / (2a) is the canonical reduced point of its orbit.
    """
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError("need a negative discriminant congruent to 0 or 1 mod 4")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if (abs(b) == a or a == c) and b > 0:
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


@dataclass(frozen=True)
class CMPoint:
    form: tuple[int, int, int]      # reduced primitive form with root ``point``
    disc: int
    point: HPoint

    @property
    def class_number(self) -> int:
        return len(reduced_forms(self.disc))

    @property
    def algebraic(self) -> AlgebraicNumber:
        A, B, C = self.form
        return AlgebraicNumber.from_minpoly(A, B, C, root=1)

    def height_bound_check(self):
        """H(xi) <= sqrt(|disc|), compared as 2 h(xi) <= log |disc|."""
        h = height(self.algebraic, self.point.prec)
        with mpmath.workprec(self.point.prec):
            rhs = mpmath.log(-self.disc) / 2
            return h <= rhs + mpmath.ldexp(1, 8 - self.point.prec), h, rhs

    def to_dict(self) -> dict:
        return {"form": list(self.form), "disc": self.disc, "point": self.point.to_dict()}


def cm_point(A: int, B: int, C: int, prec: int = DEFAULT_PREC) -> CMPoint:
    """Reduced root of A x^2 + B x + C with A > 0 and B^2 - 4AC < 0."""
    disc = B * B - 4 * A * C
    if A <= 0 or disc >= 0:
        raise ValueError("need A > 0 and B^2 - 4AC < 0")
    g = math.gcd(math.gcd(A, B), C)
    A, B, C = A // g, B // g, C // g
    disc = B * B - 4 * A * C
    point, _ = reduce(HPoint.quadratic(A, B, C, prec))
    x, y2 = point.exact
    # root of a X^2 + b X + c: x = -b / 2a, y^2 = |disc| / 4a^2
    a = math.isqrt(Fraction(-disc, 4) // y2) if (Fraction(-disc, 4) / y2).denominator == 1 else None
    if a is None or Fraction(-disc, 4 * a * a) != y2:
        raise ArithmeticError("reduced root does not come from an integral form")
    b = int(-2 * a * x)
    c = (b * b - disc) // (4 * a)
    return CMPoint((a, b, c), disc, point)


def conjugates(xi: CMPoint) -> list[CMPoint]:
    prec = xi.point.prec
    return [CMPoint(f, xi.disc, HPoint.quadratic(*f, prec=prec)) for f in reduced_forms(xi.disc)]


def max_conjugate_abs(disc: int, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """max over reduced roots of |xi|, i.e. sqrt(c / a) maximised."""
    with mpmath.workprec(prec):
        return max(mpmath.sqrt(mpmath.mpf(c) / a) for a, _, c in reduced_forms(disc))


@dataclass(frozen=True)
class CConstant:
    value: mpmath.mpf
    branch: str                    # "i", "boundary" or "interior"
    degenerate: bool
    A: mpmath.mpf
    B: mpmath.mpf
    delta: mpmath.mpf

    def to_dict(self) -> dict:
        return {"value": mpmath.nstr(self.value, 20), "branch": self.branch,
                "degenerate": self.degenerate, "A": mpmath.nstr(self.A, 20),
                "B": mpmath.nstr(self.B, 20), "delta": mpmath.nstr(self.delta, 20)}


def _geodesic_distances(xi: HPoint):
    """Half-distances to the geodesic lines bounding the half of F holding xi,
    skipping the lines through xi."""
    sign, edge, circle = _compare(xi)
    half = mpmath.mpf(1) / 2 if sign >= 0 else -mpmath.mpf(1) / 2
    out = []
    if sign != 0:
        out.append(abs(xi.re))
    if edge != 0 or (sign < 0) != (xi.re < 0):
        out.append(abs(xi.re - half))
    if circle != 0:
        out.append(abs(abs(xi.value) - 1))
    return [d / 2 for d in out]


def c_constant(xi, prec: int = DEFAULT_PREC) -> CConstant:
    """Lower bound for |j(tau) - j(xi)| along the boundary of a small disc at xi.

    With A = |j''(i)| at i and |j'(xi)| otherwise, B = 4e5 max{1, |j(xi)|} and
    delta = min{A / (12 A + 108 B), half-distance to the other boundary
    geodesics}: A delta^2 / 4 at i, A delta / 2 on the boundary of F+ or F-,
    min{|Im j(xi)|, A delta / 2} in the interior.
    """
    point = xi.point if isinstance(xi, CMPoint) else xi
    point = point.with_prec(prec)
    if point == ZETA or point == ZETA2:
        raise PreconditionError("c(xi) is not defined at the orbit of zeta", "xi not in {zeta, zeta^2}")
    with mpmath.workprec(prec):
        is_i = point == I_POINT
        A = abs(j_derivative(point, 2 if is_i else 1))
        jx = j_eval(point)
        B = 4 * 10 ** 5 * max(mpmath.mpf(1), abs(jx))
        delta = min([A / (12 * A + 108 * B)] + _geodesic_distances(point))
        if is_i:
            value, branch = A * delta ** 2 / 4, "i"
        elif on_boundary(point):
            value, branch = A * delta / 2, "boundary"
        else:
            value, branch = min(abs(jx.imag), A * delta / 2), "interior"
        return CConstant(value, branch, value == 0, A, B, delta)


def pen(disc: int, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """log max over conjugates of max{1, 1 / c(xi^sigma)}; +inf if some c vanishes."""
    worst = mpmath.mpf(1)
    for f in reduced_forms(disc):
        cc = c_constant(HPoint.quadratic(*f, prec=prec), prec)
        if cc.degenerate:
            return mpmath.inf
        with mpmath.workprec(prec):
            worst = max(worst, 1 / cc.value)
    with mpmath.workprec(prec):
        return mpmath.log(worst)
