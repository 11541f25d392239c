"""Lattice points in ellipses and the matrix counts they control.

Ellipses are {(X, Y) : A X^2 + B X Y + C Y^2 <= s}. Counting walks rows
Y = c and solves the quadratic in X; with exact coefficients the row
ends are fixed by integer arithmetic, otherwise by mpmath with a final
direct evaluation of the form at the boundary candidates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .errors import CapTooSmall, PreconditionError
from .halfplane import DEFAULT_PREC, HPoint, UnimodularMatrix, fd_images, reduce
from .report import Check

MAX_POINTS = 10 ** 9


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


@dataclass(frozen=True)
class Ellipse:
    """Positive definite form A X^2 + B X Y + C Y^2."""

    A: object
    B: object
    C: object

    def __post_init__(self):
        if not (self.A > 0 and 4 * self.A * self.C - self.B * self.B > 0):
            raise ValueError("form is not positive definite (need A > 0, 4AC - B^2 > 0)")

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in (self.A, self.B, self.C))

    def discriminant(self):
        return 4 * self.A * self.C - self.B * self.B

    def form(self, X, Y):
        return self.A * X * X + self.B * X * Y + self.C * Y * Y


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def ellipse_area(e: Ellipse, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Area of {Q <= 1}: 2 pi / sqrt(4AC - B^2)."""
    with mpmath.workprec(prec):
        return 2 * mpmath.pi / mpmath.sqrt(_mp(e.discriminant()))


def circumference_bound(e: Ellipse, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Upper bound sqrt(2 (A + C)) * area for the perimeter of {Q <= 1}."""
    with mpmath.workprec(prec):
        return mpmath.sqrt(2 * (_mp(e.A) + _mp(e.C))) * ellipse_area(e, prec)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-13, depth: int = 50) -> float:
    def simpson(a, fa, b, fb):
        m = (a + b) / 2
        fm = f(m)
        return m, fm, (b - a) / 6 * (fa + 4 * fm + fb)

    def refine(a, fa, b, fb, m, fm, whole, tol, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return (refine(a, fa, m, fm, lm, flm, left, tol / 2, depth - 1)
                + refine(m, fm, b, fb, rm, frm, right, tol / 2, depth - 1))

    fa, fb = f(a), f(b)
    m, fm, whole = simpson(a, fa, b, fb)
    return refine(a, fa, b, fb, m, fm, whole, tol, depth)


def principal_axes(e: Ellipse) -> tuple[float, float]:
    """Coefficients (A', C') after the rotation with cot 2 theta = (A - C) / B."""
    A, B, C = float(e.A), float(e.B), float(e.C)
    theta = 0.5 * math.atan2(B, A - C)
    cs, sn = math.cos(theta), math.sin(theta)
    A1 = A * cs * cs + B * sn * cs + C * sn * sn
    C1 = A * sn * sn - B * sn * cs + C * cs * cs
    return A1, C1


def perimeter_quadrature(e: Ellipse, tol: float = 1e-12) -> float:
    """Perimeter of {Q <= 1} by adaptive Simpson on the rotated ellipse."""
    A1, C1 = principal_axes(e)
    p, q = 1 / math.sqrt(A1), 1 / math.sqrt(C1)
    f = lambda t: math.sqrt((p * math.sin(t)) ** 2 + (q * math.cos(t)) ** 2)
    return 4 * adaptive_simpson(f, 0.0, math.pi / 2, tol * (p + q))


def _row_ranges(e: Ellipse, scale, prec: int):
    """Yield (c, lo, hi): integer X in [lo, hi] satisfy Q(X, c) <= scale."""
    if e.exact and _is_exact(scale):
        vals = [Fraction(e.A), Fraction(e.B), Fraction(e.C), Fraction(scale)]
        L = math.lcm(*(v.denominator for v in vals))
        A, B, C, S = (int(v * L) for v in vals)
        if S < 0:
            return
        disc = 4 * A * C - B * B
        cmax = math.isqrt(4 * A * S // disc) + 1
        Q = lambda X, c: A * X * X + B * X * c + C * c * c <= S
        for c in range(-cmax, cmax + 1):
            rad = B * B * c * c - 4 * A * (C * c * c - S)
            if rad < 0:
                continue
            r = math.isqrt(rad)
            lo = (-B * c - r - 1) // (2 * A)
            hi = (-B * c + r + 1) // (2 * A) + 1
            while not Q(lo, c) and lo <= hi:
                lo += 1
            while not Q(hi, c) and hi >= lo:
                hi -= 1
            if lo <= hi:
                yield c, lo, hi
        return
    with mpmath.workprec(prec):
        A, B, C, S = _mp(e.A), _mp(e.B), _mp(e.C), _mp(scale)
        if S < 0:
            return
        disc = 4 * A * C - B * B
        cmax = int(mpmath.floor(mpmath.sqrt(4 * A * S / disc))) + 1
        Q = lambda X, c: A * X * X + B * X * c + C * c * c <= S
        for c in range(-cmax, cmax + 1):
            rad = B * B * c * c - 4 * A * (C * c * c - S)
            if rad < 0:
                continue
            r = mpmath.sqrt(rad)
            lo = int(mpmath.floor((-B * c - r) / (2 * A))) - 1
            hi = int(mpmath.ceil((-B * c + r) / (2 * A))) + 1
            while lo <= hi and not Q(lo, c):
                lo += 1
            while hi >= lo and not Q(hi, c):
                hi -= 1
            if lo <= hi:
                yield c, lo, hi


def lattice_count(e: Ellipse, scale, prec: int = DEFAULT_PREC) -> int:
    """Number of integer points with Q(X, Y) <= scale."""
    with mpmath.workprec(64):
        expected = ellipse_area(e, 64) * max(_mp(scale), 0)
    if expected > MAX_POINTS:
        raise CapTooSmall(f"about {int(expected)} points exceeds the {MAX_POINTS} guard")
    return sum(hi - lo + 1 for _, lo, hi in _row_ranges(e, scale, prec))


def davenport_check(e: Ellipse, scale, prec: int = DEFAULT_PREC) -> Check:
    """|count - area| < 4 (perimeter + 1) for the region {Q <= scale}."""
    count = lattice_count(e, scale, prec)
    with mpmath.workprec(prec):
        s = _mp(scale)
        area = ellipse_area(e, prec) * s
        perim = mpmath.mpf(perimeter_quadrature(e)) * mpmath.sqrt(s)
        lhs = abs(count - area)
        rhs = 4 * (perim + 1)
    return Check("davenport", lhs < rhs, lhs, rhs, {"count": count, "area": area, "perimeter": perim})


# --- annuli around the ellipses attached to xi -------------------------------

def _xi_parts(xi: HPoint):
    """(|Re xi|, |xi|^2) exactly and (Im xi, |xi|) in mpmath."""
    if xi.exact is None:
        raise ValueError("xi must be an exact point (rational or quadratic)")
    x, y2 = xi.exact
    with mpmath.workprec(xi.prec):
        return abs(x), x * x + y2, xi.im, mpmath.sqrt(_mp(x * x + y2))


@dataclass(frozen=True)
class AnnulusSpec:
    xi: HPoint
    y: object
    eps: object
    nu: int = 1

    def __post_init__(self):
        if self.nu not in (1, -1):
            raise ValueError("nu must be +1 or -1")


def _annulus_width(spec: AnnulusSpec, prec: int):
    _, _, im_xi, abs_xi = _xi_parts(spec.xi)
    with mpmath.workprec(prec):
        y = _mp(spec.y)
        return im_xi / y, 50 * abs_xi ** 3 * mpmath.sqrt(_mp(spec.eps)) / y


def annulus_pairs(spec: AnnulusSpec, prec: int = DEFAULT_PREC) -> list[tuple[int, int]]:
    """Integer (a, c) with |a^2 + 2 nu |Re xi| a c + |xi|^2 c^2 - Im xi / y| <= 50 |xi|^3 sqrt(eps) / y."""
    re_abs, norm, _, _ = _xi_parts(spec.xi)
    e = Ellipse(1, 2 * spec.nu * re_abs, norm)
    center, width = _annulus_width(spec, prec)
    out = []
    with mpmath.workprec(prec):
        for c, lo, hi in _row_ranges(e, center + width, prec):
            for a in range(lo, hi + 1):
                lam = _mp(e.form(a, c))
                if abs(lam - center) <= width:
                    out.append((a, c))
    return out


def annulus_count_bound(spec: AnnulusSpec, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """2 (16 pi (sqrt(2 Im xi) + sqrt y) / sqrt y + 100 pi |xi|^3 sqrt(eps) / (y Im xi))."""
    _, _, im_xi, abs_xi = _xi_parts(spec.xi)
    with mpmath.workprec(prec):
        y, eps = _mp(spec.y), _mp(spec.eps)
        pi = mpmath.pi
        return 2 * (16 * pi * (mpmath.sqrt(2 * im_xi) + mpmath.sqrt(y)) / mpmath.sqrt(y)
                    + 100 * pi * abs_xi ** 3 * mpmath.sqrt(eps) / (y * im_xi))


def matrix_count_bound(xi: HPoint, x, y, eps, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Annulus bound times (4 x + 13 |xi|)."""
    _, _, _, abs_xi = _xi_parts(xi)
    with mpmath.workprec(prec):
        return annulus_count_bound(AnnulusSpec(xi, y, eps), prec) * (4 * abs(_mp(x)) + 13 * abs_xi)


def lemma_eps_limit(xi: HPoint, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """sqrt(3) / (3 |xi| + 2): largest eps for the matrix-entry estimates."""
    _, _, _, abs_xi = _xi_parts(xi)
    with mpmath.workprec(prec):
        return mpmath.sqrt(3) / (3 * abs_xi + 2)


def _segment_conditions(g: UnimodularMatrix, xi: HPoint, y, eps):
    """Quadratics p t^2 + q t + r whose common non-positivity means
    g(t + i y) is in the closed domain and within eps of xi."""
    a, b, c, d = g.entries()
    xr, xim = xi.re, xi.im
    # alpha = a - xi c, beta = b - xi d
    a1, a2 = a - xr * c, -xim * c
    b1, b2 = b - xr * d, -xim * d
    # |alpha tau + beta|^2 with tau = t + i y
    p1 = a1 * a1 + a2 * a2
    q1 = 2 * (a1 * (b1 - a2 * y) + a2 * (b2 + a1 * y))
    r1 = (b1 - a2 * y) ** 2 + (b2 + a1 * y) ** 2
    # den = (c t + d)^2 + c^2 y^2
    pd, qd, rd = c * c, 2 * c * d, d * d + c * c * y * y
    e2 = eps * eps
    # numerator of Re(g tau): (a t + b)(c t + d) + a c y^2
    pn, qn, rn = a * c, a * d + b * c, b * d + a * c * y * y
    # |a tau + b|^2
    pa, qa, ra = a * a, 2 * a * b, b * b + a * a * y * y
    return [
        (p1 - e2 * pd, q1 - e2 * qd, r1 - e2 * rd),
        (2 * pn - pd, 2 * qn - qd, 2 * rn - rd),
        (-2 * pn - pd, -2 * qn - qd, -2 * rn - rd),
        (pd - pa, qd - qa, rd - ra),
    ]


def _segment_feasible(conds, x, tol) -> bool:
    """Is there t in [-x, x] with every quadratic <= 0 (up to tol)?"""
    pts = [-x, x]
    for p, q, r in conds:
        if abs(p) > tol:
            disc = q * q - 4 * p * r
            if disc >= 0:
                s = mpmath.sqrt(disc)
                pts += [(-q - s) / (2 * p), (-q + s) / (2 * p)]
        elif abs(q) > tol:
            pts.append(-r / q)
    pts = sorted(t for t in pts if -x <= t <= x)
    cands = pts + [(u + v) / 2 for u, v in zip(pts, pts[1:])]
    for t in cands:
        if all(p * t * t + q * t + r <= tol * (1 + abs(p * t * t) + abs(q * t) + abs(r))
               for p, q, r in conds):
            return True
    return False


def matrix_count_bruteforce(xi: HPoint, x, y, eps, entry_cap: int = 10 ** 4,
                            prec: int = DEFAULT_PREC) -> int:
    """Exhaustive count of gamma (up to sign) with gamma(t + i y) in the closed
    domain and within eps of xi for some |t| <= x.

    The search box comes from the matrix-entry estimates, which need
    eps <= sqrt(3) / (3 |xi| + 2).
    """
    if not 0 < _mp(eps) <= lemma_eps_limit(xi, prec):
        raise PreconditionError("eps outside the range of the entry estimates",
                                "0 < eps <= sqrt(3)/(3|xi|+2)")
    _, _, _, abs_xi = _xi_parts(xi)
    count = 0
    with mpmath.workprec(prec):
        xi = xi.with_prec(prec)
        x, y, eps = abs(_mp(x)), _mp(y), _mp(eps)
        K = (4 * abs_xi + 1) / mpmath.sqrt(3)
        amax = int(mpmath.floor(mpmath.sqrt(K / y)))
        db_extra = int(mpmath.floor(amax * x + K))
        if max(amax, db_extra) > entry_cap:
            raise CapTooSmall(f"entries up to {max(amax, db_extra)} exceed cap {entry_cap}")
        tol = mpmath.ldexp(1, 24 - prec)
        for c in range(0, amax + 1):
            for a in range(-amax, amax + 1):
                if c == 0 and a != 1:
                    continue
                if math.gcd(a, c) != 1:
                    continue
                # particular solution of a d - b c = 1
                if c == 0:
                    b0, d0 = 0, 1
                else:
                    g_, u, v = _ext_gcd(a, c)
                    b0, d0 = -v, u
                # k ranges so that |b| <= |a| x + K and |d| <= |c| x + K
                bmax, dmax = abs(a) * x + K, c * x + K
                klo, khi = -entry_cap, entry_cap
                for base, step, lim in ((b0, a, bmax), (d0, c, dmax)):
                    if step == 0:
                        if abs(base) > lim:
                            klo, khi = 1, 0
                        continue
                    lo = (-lim - base) / step
                    hi = (lim - base) / step
                    if step < 0:
                        lo, hi = hi, lo
                    klo = max(klo, int(mpmath.ceil(lo)))
                    khi = min(khi, int(mpmath.floor(hi)))
                for k in range(klo, khi + 1):
                    g = UnimodularMatrix(a, b0 + k * a, c, d0 + k * c)
                    if _segment_feasible(_segment_conditions(g, xi, y, eps), x, tol):
                        count += 1
    return count


def _ext_gcd(a: int, b: int):
    """(g, u, v) with a u + b v = g = gcd(a, b) > 0."""
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# --- the matrix-entry lemma ---------------------------------------------------

def ellipse_lemma_check(xi: HPoint, tau: HPoint, eps, prec: int = DEFAULT_PREC) -> list[Check]:
    """Entry estimates for a gamma moving tau to within eps of xi in the closed domain."""
    if not 0 < _mp(eps) <= lemma_eps_limit(xi, prec):
        raise PreconditionError("eps outside the lemma range", "0 < eps <= sqrt(3)/(3|xi|+2)")
    re_abs, norm, im_xi, abs_xi = _xi_parts(xi)
    point, g0 = reduce(tau)
    best = None
    with mpmath.workprec(prec):
        for image, h in fd_images(point):
            dist = abs(image.value - xi.with_prec(prec).value)
            if best is None or dist < best[0]:
                best = (dist, h @ g0)
        dist, g = best
        if dist > _mp(eps) * (1 + mpmath.ldexp(1, 16 - prec)):
            raise PreconditionError("reduced point is farther than eps from xi",
                                    "|reduced tau - xi| <= eps")
        a, b, c, d = g.entries()
        y = tau.im
        K = (4 * abs_xi + 1) / mpmath.sqrt(3)
        slack = mpmath.ldexp(1, 16 - prec)
        lam = [a * a + nu * 2 * _mp(re_abs) * a * c + _mp(norm) * c * c for nu in (1, -1)]
        dev = min(abs(v - im_xi / y) for v in lam)
        rhs_entries = 7 * K * abs_xi ** 2 * mpmath.sqrt(_mp(eps)) / y
        return [
            Check("entries_annulus", dev <= rhs_entries * (1 + slack), dev, rhs_entries),
            Check("entries_first_column", max(a * a, c * c) <= K / y * (1 + slack),
                  max(a * a, c * c), K / y),
            Check("entry_d", abs(d) <= (abs(c) * abs(tau.re) + K) * (1 + slack),
                  abs(d), abs(c) * abs(tau.re) + K),
            Check("entry_b", abs(b) <= (abs(a) * abs(tau.re) + K) * (1 + slack),
                  abs(b), abs(a) * abs(tau.re) + K),
        ]
