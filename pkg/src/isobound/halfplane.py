"""Points of the upper half-plane, the modular group and reduction into
the standard fundamental domain

    F = { |Re tau| <= 1/2, |tau| >= 1 }.

Points built from rationals or quadratic irrationals carry an exact
shadow ``(Re tau, Im(tau)^2)`` in ``Fraction``; the modular group keeps
that shadow rational, so every boundary decision for such points is exact.
Points given only as binary floats are reduced in floating point with a
tolerance of ``2**(8 - prec)`` on boundary comparisons.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from .errors import PrecisionExhausted
from .report import Check

DEFAULT_PREC = 256
MIN_PREC = 64

ExactShadow = tuple[Fraction, Fraction]


def to_fraction(value) -> Fraction:
    """Exact conversion for int, Fraction and decimal or ratio strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, str)) and not isinstance(value, bool)


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries()} is not 1")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return UnimodularMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "UnimodularMatrix":
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def canonical_sign(self) -> "UnimodularMatrix":
        """Representative of {g, -g} whose first nonzero of (c, d) is positive."""
        lead = self.c if self.c != 0 else self.d
        return self if lead > 0 else -self

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
S_MATRIX = UnimodularMatrix(0, -1, 1, 0)


def translation(k: int) -> UnimodularMatrix:
    return UnimodularMatrix(1, k, 0, 1)


class HPoint:
    """A point of the upper half-plane at a given binary precision.

    ``re`` and ``im`` given as int, Fraction or decimal strings make an
    exact point; floats and mpf values make a floating point.
    """

    __slots__ = ("re", "im", "prec", "exact")

    def __init__(self, re, im, prec: int = DEFAULT_PREC, *, exact: Optional[ExactShadow] = None):
        if prec < MIN_PREC:
            raise ValueError(f"precision must be at least {MIN_PREC} bits")
        if exact is None and _is_exact(re) and _is_exact(im):
            x, y = to_fraction(re), to_fraction(im)
            if y <= 0:
                raise ValueError("imaginary part must be positive")
            exact = (x, y * y)
        self.prec = prec
        self.exact = exact
        with mpmath.workprec(prec):
            if exact is not None:
                x, y2 = exact
                if y2 <= 0:
                    raise ValueError("imaginary part must be positive")
                self.re = mpmath.mpf(x.numerator) / x.denominator
                self.im = mpmath.sqrt(mpmath.mpf(y2.numerator) / y2.denominator)
            else:
                self.re = mpmath.mpf(re)
                self.im = mpmath.mpf(im)
                if not self.im > 0:
                    raise ValueError("imaginary part must be positive")

    @classmethod
    def from_shadow(cls, re: Fraction, im_sq: Fraction, prec: int = DEFAULT_PREC) -> "HPoint":
        return cls(None, None, prec, exact=(Fraction(re), Fraction(im_sq)))

    @classmethod
    def quadratic(cls, A: int, B: int, C: int, prec: int = DEFAULT_PREC) -> "HPoint":
        """Root of A x^2 + B x + C in the upper half-plane (4AC > B^2)."""
        disc = B * B - 4 * A * C
        if A == 0 or disc >= 0:
            raise ValueError("polynomial has no root in the upper half-plane")
        return cls.from_shadow(Fraction(-B, 2 * A), Fraction(-disc, 4 * A * A), prec)

    @property
    def value(self) -> mpmath.mpc:
        with mpmath.workprec(self.prec):
            return mpmath.mpc(self.re, self.im)

    def with_prec(self, prec: int) -> "HPoint":
        if self.exact is not None:
            return HPoint(None, None, prec, exact=self.exact)
        return HPoint(self.re, self.im, prec)

    def conj_reflect(self) -> "HPoint":
        """The mirror point -conj(tau)."""
        if self.exact is not None:
            return HPoint(None, None, self.prec, exact=(-self.exact[0], self.exact[1]))
        return HPoint(-self.re, self.im, self.prec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HPoint):
            return NotImplemented
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash(self.exact) if self.exact is not None else hash((self.re, self.im))

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"HPoint(exact re={self.exact[0]}, im^2={self.exact[1]})"
        return f"HPoint({mpmath.nstr(self.re, 15)}, {mpmath.nstr(self.im, 15)}, prec={self.prec})"

    def to_dict(self, digits: int = 30) -> dict:
        out = {"re": mpmath.nstr(self.re, digits), "im": mpmath.nstr(self.im, digits)}
        if self.exact is not None:
            out["exact_re"] = str(self.exact[0])
            out["exact_im_squared"] = str(self.exact[1])
        return out


ZETA = HPoint.quadratic(1, -1, 1)        # e^{i pi/3}
ZETA2 = HPoint.quadratic(1, 1, 1)        # e^{2 i pi/3}
I_POINT = HPoint(0, 1)


def apply(g: UnimodularMatrix, tau: HPoint) -> HPoint:
    """The Mobius image (a tau + b) / (c tau + d)."""
    a, b, c, d = g.entries()
    if tau.exact is not None:
        x, y2 = tau.exact
        r2 = x * x + y2
        den = c * c * r2 + 2 * c * d * x + d * d
        re = (a * c * r2 + (a * d + b * c) * x + b * d) / den
        return HPoint(None, None, tau.prec, exact=(re, y2 / (den * den)))
    with mpmath.workprec(tau.prec):
        x, y = tau.re, tau.im
        u = c * x + d
        den = u * u + (c * y) ** 2
        re = ((a * x + b) * u + a * c * y * y) / den
        return HPoint(re, y / den, tau.prec)


class Reduction(NamedTuple):
    point: HPoint
    matrix: UnimodularMatrix


def _tolerance(prec: int) -> mpmath.mpf:
    return mpmath.ldexp(1, 8 - prec)


def _reduce_exact(tau: HPoint) -> UnimodularMatrix:
    x, y2 = tau.exact
    g = IDENTITY
    half = Fraction(1, 2)
    for _ in range(10 * tau.prec):
        k = (x + half).__floor__()
        if k:
            x -= k
            g = translation(-k) @ g
        r2 = x * x + y2
        if r2 < 1:
            x, y2 = -x / r2, y2 / (r2 * r2)
            g = S_MATRIX @ g
            continue
        if r2 == 1 and x < 0:
            g = S_MATRIX @ g
            x = -x
        if x == -half:
            g = translation(1) @ g
        return g
    raise PrecisionExhausted("reduction did not terminate within the iteration budget")


def _reduce_float(tau: HPoint) -> UnimodularMatrix:
    prec = tau.prec
    with mpmath.workprec(prec):
        tol = _tolerance(prec)
        x, y = tau.re, tau.im
        g = IDENTITY
        half = mpmath.mpf(0.5)
        for _ in range(10 * prec):
            if abs(x) > half + tol:
                k = int(mpmath.floor(x + half))
                x -= k
                g = translation(-k) @ g
            r2 = x * x + y * y
            if r2 < 1 - tol:
                x, y = -x / r2, y / r2
                g = S_MATRIX @ g
                continue
            if abs(r2 - 1) <= tol and x < -tol:
                g = S_MATRIX @ g
                x = -x
            if abs(x + half) <= tol:
                g = translation(1) @ g
            break
        else:
            raise PrecisionExhausted("reduction did not terminate within the iteration budget")
    # entries of size H cost about 2 log2 H bits when the point is recomputed
    if 2 * matrix_height(g).bit_length() + 16 > prec:
        raise PrecisionExhausted(
            f"reducing matrix of height {matrix_height(g)} exceeds {prec}-bit precision")
    return g


def reduce(tau: HPoint) -> Reduction:
    """Canonical representative of tau in the closed fundamental domain.

    On the boundary the representative with Re >= 0 is chosen, on the dividing
    lines Re = +-1/2 the one with Re = +1/2. The returned point is exactly
    ``apply(matrix, tau)``.
    """
    g = _reduce_exact(tau) if tau.exact is not None else _reduce_float(tau)
    return Reduction(apply(g, tau), g)


def matrix_height(g: UnimodularMatrix) -> int:
    return max(abs(e) for e in g.entries())


def dmeasure(tau: HPoint) -> mpmath.mpf:
    """max{1, |Re tau|, 1/Im tau}."""
    with mpmath.workprec(tau.prec):
        return max(mpmath.mpf(1), abs(tau.re), 1 / tau.im)


# --- fundamental-domain geometry -------------------------------------------

class Region(enum.Enum):
    INTERIOR = "interior"
    PLUS_BOUNDARY = "plus_boundary"
    MINUS_BOUNDARY = "minus_boundary"


@dataclass(frozen=True)
class FundamentalDomainTag:
    """Position of a reduced point.

    Boundary means the boundary of one of the halves F+ = F & {Re >= 0},
    F- = F & {Re <= 0}; the imaginary axis counts as boundary.
    """

    region: Region
    plus_half: bool


def _compare(tau: HPoint):
    """Signs of (Re tau, |Re tau| - 1/2, |tau|^2 - 1) with a tolerance band."""
    if tau.exact is not None:
        x, y2 = tau.exact
        sgn = lambda v: (v > 0) - (v < 0)
        return sgn(x), sgn(abs(x) - Fraction(1, 2)), sgn(x * x + y2 - 1)
    with mpmath.workprec(tau.prec):
        tol = _tolerance(tau.prec)
        sgn = lambda v: 0 if abs(v) <= tol else (1 if v > 0 else -1)
        return sgn(tau.re), sgn(abs(tau.re) - 0.5), sgn(tau.re ** 2 + tau.im ** 2 - 1)


def in_closure(tau: HPoint) -> bool:
    _, edge, circle = _compare(tau)
    return edge <= 0 and circle >= 0


def on_boundary(tau: HPoint) -> bool:
    """On the boundary of F+ or F- (imaginary axis, Re = +-1/2, unit circle)."""
    sign, edge, circle = _compare(tau)
    return sign == 0 or edge == 0 or circle == 0


def fd_tag(tau: HPoint) -> FundamentalDomainTag:
    point = tau if in_closure(tau) else reduce(tau).point
    sign = _compare(point)[0]
    if not on_boundary(point):
        region = Region.INTERIOR
    else:
        region = Region.PLUS_BOUNDARY if sign >= 0 else Region.MINUS_BOUNDARY
    return FundamentalDomainTag(region, sign >= 0)


_NEIGHBOURS = [IDENTITY, translation(1), translation(-1), S_MATRIX,
               translation(1) @ S_MATRIX, translation(-1) @ S_MATRIX,
               S_MATRIX @ translation(1), S_MATRIX @ translation(-1)]


def fd_images(tau: HPoint) -> list[Reduction]:
    """All images of a point of the closed domain that stay in the closed domain.

    Interior points have only themselves; boundary points also have their
    identified partners (tau - 1 on Re = 1/2, -1/tau on the unit circle).
    """
    out = []
    for g in _NEIGHBOURS:
        image = apply(g, tau)
        if in_closure(image):
            out.append(Reduction(image, g))
    return out


def check_reduction_height(tau: HPoint) -> Check:
    """H(rho) <= 264 D(tau)^9, or 1056 D(tau)^9 when tau is equivalent to zeta."""
    point, g = reduce(tau)
    with mpmath.workprec(tau.prec):
        D = dmeasure(tau)
        near_zeta = abs(point.value - ZETA.with_prec(tau.prec).value) < mpmath.ldexp(1, -tau.prec // 2)
        const = 1056 if near_zeta else 264
        rhs = const * D ** 9
        h = matrix_height(g)
        return Check("reduction_height", h <= rhs, h, rhs,
                     {"D": D, "zeta_orbit": near_zeta})


def reduce_array(x: np.ndarray, y: np.ndarray, max_iter: int = 200):
    """Vectorised float64 reduction; returns reduced (x, y) arrays.

    Used as a screen only: results are accurate to about 1e-16 / Im(tau)
    and boundary ties are not canonicalised.
    """
    x = np.array(x, dtype=np.float64)
    y = np.array(y, dtype=np.float64)
    idx = np.arange(x.size)
    for _ in range(max_iter):
        xs, ys = x[idx], y[idx]
        xs -= np.floor(xs + 0.5)
        r2 = xs * xs + ys * ys
        flip = r2 < 1.0
        xs[flip] = -xs[flip] / r2[flip]
        ys[flip] = ys[flip] / r2[flip]
        x[idx], y[idx] = xs, ys
        idx = idx[flip]
        if idx.size == 0:
            break
    else:
        raise PrecisionExhausted("float reduction did not terminate")
    x -= np.floor(x + 0.5)
    return x, y
