"""Hecke matrices and clusters of isogenous points near a fixed xi.

The matrices (m l; 0 n) with mn = N, 0 <= l < n represent the left
cosets of integer matrices of determinant N; those with gcd(m, l, n) = 1
are the cyclic N-isogenies. A cluster is the set of M whose image
tau_M = (m tau0 + l) / n has a representative in the closed
fundamental domain within eps of xi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .arith import dedekind_psi, sigma0
from .errors import PreconditionError
from .halfplane import (DEFAULT_PREC, HPoint, UnimodularMatrix, _NEIGHBOURS, apply,
                        fd_images, in_closure, reduce, reduce_array)
from .lattice import lemma_eps_limit


@dataclass(frozen=True)
class HeckeMatrix:
    m: int
    l: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or not 0 <= self.l < self.n:
            raise ValueError("need m, n >= 1 and 0 <= l < n")

    @property
    def N(self) -> int:
        return self.m * self.n

    @property
    def cyclic(self) -> bool:
        return math.gcd(math.gcd(self.m, self.l), self.n) == 1

    def sort_key(self) -> tuple[int, int, int]:
        return (self.n, self.l, self.m)

    def to_dict(self) -> dict:
        return {"m": self.m, "l": self.l, "n": self.n}


def hecke_matrices(N: int, cyclic_only: bool = False) -> list[HeckeMatrix]:
    """All (m l; 0 n) of determinant N, in (n, l, m) order."""
    out = []
    for n in range(1, N + 1):
        if N % n:
            continue
        m = N // n
        for l in range(n):
            M = HeckeMatrix(m, l, n)
            if not cyclic_only or M.cyclic:
                out.append(M)
    return out


def tau_of(M: HeckeMatrix, tau0: HPoint) -> HPoint:
    if tau0.exact is not None:
        x, y2 = tau0.exact
        return HPoint.from_shadow((M.m * x + M.l) / M.n, Fraction(M.m * M.m, M.n * M.n) * y2,
                                  tau0.prec)
    with mpmath.workprec(tau0.prec):
        return HPoint((M.m * tau0.re + M.l) / M.n, M.m * tau0.im / M.n, tau0.prec)


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _abs_xi(xi: HPoint) -> mpmath.mpf:
    with mpmath.workprec(xi.prec):
        return abs(xi.value)


def cluster_eps_limit(xi: HPoint) -> mpmath.mpf:
    """(Im xi / (100 |xi|^3))^2, the range where the cluster bounds are proven."""
    with mpmath.workprec(xi.prec):
        return (xi.im / (100 * _abs_xi(xi) ** 3)) ** 2


def check_cluster_eps(xi: HPoint, eps, strict: bool = True) -> bool:
    """Validate eps; returns whether it lies in the proven range.

    Outside sqrt(3)/(3|xi|+2) no enumeration is meaningful and an error is
    raised; between the two limits ``strict`` decides.
    """
    e = _mp(eps)
    proven = 0 < e <= cluster_eps_limit(xi)
    if not 0 < e <= lemma_eps_limit(xi):
        raise PreconditionError(
            f"eps = {mpmath.nstr(e, 6)} is outside both admissible ranges",
            "0 < eps <= (Im(xi) / (100 |xi|^3))^2, and at most eps <= sqrt(3)/(3|xi|+2)")
    if strict and not proven:
        raise PreconditionError(
            f"eps = {mpmath.nstr(e, 6)} exceeds {mpmath.nstr(cluster_eps_limit(xi), 6)}",
            "0 < eps <= (Im(xi) / (100 |xi|^3))^2")
    return proven


def within(point: HPoint, xi: HPoint, eps) -> bool:
    """|point - xi| <= eps, exactly when all three are exact.

    Floating inputs use a band of 2^(-prec/2) that counts as inside.
    """
    if point.exact is not None and xi.exact is not None and isinstance(eps, (int, Fraction)):
        (x1, s1), (x2, s2) = point.exact, xi.exact
        lhs = (x1 - x2) ** 2 + s1 + s2 - Fraction(eps) ** 2     # <= 2 sqrt(s1 s2)
        return lhs <= 0 or lhs * lhs <= 4 * s1 * s2
    prec = min(point.prec, xi.prec)
    with mpmath.workprec(prec):
        return abs(point.value - xi.with_prec(prec).value) <= _mp(eps) + mpmath.ldexp(1, -prec // 2)


@dataclass(frozen=True)
class ClusterMember:
    matrix: HeckeMatrix
    reduced: HPoint
    gamma: UnimodularMatrix          # gamma tau_M = reduced
    distance: mpmath.mpf

    def to_dict(self) -> dict:
        return {"matrix": self.matrix.to_dict(), "reduced": self.reduced.to_dict(),
                "gamma": self.gamma.to_dict(), "distance": mpmath.nstr(self.distance, 20)}


def orbit_member(M: HeckeMatrix, tau0: HPoint, xi: HPoint, eps) -> Optional[ClusterMember]:
    tau = tau_of(M, tau0)
    point, g = reduce(tau)
    best = None
    for image, h in fd_images(point):
        if within(image, xi, eps):
            with mpmath.workprec(image.prec):
                dist = abs(image.value - xi.with_prec(image.prec).value)
            if best is None or dist < best.distance:
                best = ClusterMember(M, image, h @ g, dist)
    return best


@dataclass
class ClusterResult:
    tau0: HPoint
    N: int
    eps: object
    xi: HPoint
    members: list[ClusterMember]
    proven_range: bool
    bound_lemma: mpmath.mpf
    bound_prop: Optional[mpmath.mpf]

    def to_dict(self) -> dict:
        return {"tau0": self.tau0.to_dict(), "N": self.N, "eps": str(self.eps),
                "xi": self.xi.to_dict(), "member_count": len(self.members),
                "members": [m.to_dict() for m in self.members],
                "proven_range": self.proven_range,
                "bound_lemma": mpmath.nstr(self.bound_lemma, 20),
                "bound_prop": None if self.bound_prop is None else mpmath.nstr(self.bound_prop, 20)}


def cluster_enumerate(tau0: HPoint, N: int, eps, xi: HPoint, strict: bool = True,
                      cyclic_only: bool = False) -> ClusterResult:
    """All Hecke matrices of determinant N whose image lands within eps of xi."""
    proven = check_cluster_eps(xi, eps, strict)
    members = []
    for M in hecke_matrices(N, cyclic_only):
        hit = orbit_member(M, tau0, xi, eps)
        if hit is not None:
            members.append(hit)
    prop = bound_prop(tau0, N, eps, xi) if in_closure(tau0) else None
    return ClusterResult(tau0, N, eps, xi, members, proven, bound_lemma(tau0, N, eps, xi), prop)


def cluster_factor(tau0: HPoint, xi: HPoint) -> mpmath.mpf:
    """64 pi (4|Re tau0| + 17|xi|)(50 |xi|^2 Im tau0 + 1)
    * max{(sqrt(2 Im xi) + sqrt(Im tau0)) / sqrt(Im tau0), 5 |xi|^2 / Im tau0}."""
    prec = max(tau0.prec, xi.prec)
    with mpmath.workprec(prec):
        ax = _abs_xi(xi)
        y0 = tau0.im
        return (64 * mpmath.pi * (4 * abs(tau0.re) + 17 * ax) * (50 * ax ** 2 * y0 + 1)
                * max((mpmath.sqrt(2 * xi.im) + mpmath.sqrt(y0)) / mpmath.sqrt(y0), 5 * ax ** 2 / y0))


def bound_lemma(tau0: HPoint, N: int, eps, xi: HPoint) -> mpmath.mpf:
    """sqrt(N) sigma0(N) (1 + I) + (pi^2 / 6) I sqrt(eps) psi(N) with I = cluster_factor."""
    with mpmath.workprec(max(tau0.prec, xi.prec)):
        factor = cluster_factor(tau0, xi)
        return (mpmath.sqrt(N) * sigma0(N) * (1 + factor)
                + mpmath.pi ** 2 / 6 * factor * mpmath.sqrt(_mp(eps)) * dedekind_psi(N))


def bound_prop(tau0: HPoint, N: int, eps, xi: HPoint) -> mpmath.mpf:
    """10^7 |tau0| |xi|^5 (sqrt(N) sigma0(N) + sqrt(eps) psi(N))."""
    with mpmath.workprec(max(tau0.prec, xi.prec)):
        return (10 ** 7 * abs(tau0.value) * _abs_xi(xi) ** 5
                * (mpmath.sqrt(N) * sigma0(N) + mpmath.sqrt(_mp(eps)) * dedekind_psi(N)))


def taul_interval_bound(xi: HPoint, m: int, n: int, a: int, c: int, tau0: HPoint) -> mpmath.mpf:
    """Number of l for which tau_M can fall in a set where gamma has first column (a, c):
    min(6 |xi| n / max{a^2, c^2} + 1, 50 |xi|^2 Im(tau0) m + 1)."""
    with mpmath.workprec(max(xi.prec, tau0.prec)):
        ax = _abs_xi(xi)
        big = max(a * a, c * c)
        first = 6 * ax * n / big + 1 if big else mpmath.inf
        return min(first, 50 * ax ** 2 * tau0.im * m + 1)


# --- batched counting for large N ranges ---------------------------------------

def _all_matrices(n_max: int):
    ms, ls, ns = [], [], []
    for n in range(1, n_max + 1):
        mcount = n_max // n
        m = np.repeat(np.arange(1, mcount + 1, dtype=np.int64), n)
        l = np.tile(np.arange(n, dtype=np.int64), mcount)
        ms.append(m)
        ls.append(l)
        ns.append(np.full(m.size, n, dtype=np.int64))
    return np.concatenate(ms), np.concatenate(ls), np.concatenate(ns)


def cluster_counts(tau0: HPoint, n_max: int, xis: Sequence[HPoint], epss: Sequence,
                   chunk: int = 400_000) -> dict:
    """Member counts for every N <= n_max at once.

    A float64 reduction screens all sigma_1(N) points per N; anything within
    1.1 eps + 1e-6 of xi or of an image of xi under the boundary
    identifications is re-decided with ``orbit_member`` (exact for exact
    inputs). Returns {(k, j): counts} with counts[N] for xis[k], epss[j],
    plus "members" mapping the same keys to the confirmed members.
    """
    ms, ls, ns = _all_matrices(n_max)
    x0, y0 = float(tau0.re), float(tau0.im)
    eps_max = max(float(_mp(e)) for e in epss)
    targets = []
    for xi in xis:
        pts = {(float(apply(g, xi).re), float(apply(g, xi).im)) for g in _NEIGHBOURS}
        targets.append(np.array(sorted(pts)))
    radius = 1.1 * eps_max + 1e-6
    cand = [set() for _ in xis]
    for start in range(0, ms.size, chunk):
        m, l, n = ms[start:start + chunk], ls[start:start + chunk], ns[start:start + chunk]
        xr, yr = reduce_array((m * x0 + l) / n, m * y0 / n)
        for k, tgt in enumerate(targets):
            near = np.zeros(xr.size, dtype=bool)
            for tx, ty in tgt:
                near |= (xr - tx) ** 2 + (yr - ty) ** 2 <= radius * radius
            for i in np.nonzero(near)[0]:
                cand[k].add((int(m[i]), int(l[i]), int(n[i])))
    out: dict = {"members": {}}
    for k, xi in enumerate(xis):
        for j, eps in enumerate(epss):
            counts = np.zeros(n_max + 1, dtype=np.int64)
            found = []
            for m, l, n in sorted(cand[k], key=lambda t: (t[0] * t[2], t[2], t[1], t[0])):
                hit = orbit_member(HeckeMatrix(m, l, n), tau0, xi, eps)
                if hit is not None:
                    counts[m * n] += 1
                    found.append(hit)
            out[(k, j)] = counts
            out["members"][(k, j)] = found
    return out
