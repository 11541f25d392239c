"""Seeded verification suites, one per module.

Every suite returns a list of aggregated checks. Each check records how
many cases ran, how many failed, the first failure, and the case with
the least slack so that both sides of the tightest inequality are shown.
Sizes come in two tiers: a modest default and the full sizes used by
the acceptance tests.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from . import arith, bounds, curves, halfplane, heights, hecke, lattice, modular
from .errors import PreconditionError
from .halfplane import HPoint, I_POINT, ZETA, ZETA2, UnimodularMatrix
from .report import Check, render

SUITES = ("heights", "arith", "lattice", "ellipse-lemma", "hecke", "modular", "curves", "bounds")

# (default, full) sizes; ``cases`` overrides the random-case counts marked True
SIZES = {
    "heights": {"rational": (200, 1000, True), "quadratic": (200, 1000, True),
                "units": (200, 1000, True), "cm_disc": (1000, 10 ** 4, False),
                "pairs": (100, 500, True)},
    "arith": {"sigma_range": (10 ** 4, 10 ** 5, False), "mertens_range": (10 ** 4, 10 ** 5, False),
              "oracle_range": (2000, 10 ** 4, False), "gl2_range": (12, 12, False),
              "census_range": (30, 30, False)},
    "lattice": {"davenport": (100, 1000, True), "annulus": (100, 1000, True),
                "bruteforce": (20, 200, True)},
    "ellipse-lemma": {"triples": (50, 500, True)},
    "hecke": {"count_range": (300, 2000, False), "grid": (4, 20, False), "n_max": (200, 2000, False),
              "orbit_samples": (3, 10, True), "dual_range": (20, 40, False)},
    "modular": {"invariance": (100, 1000, True), "reflection": (50, 200, True),
                "derivative": (20, 100, True), "near_grid": (20, 100, False),
                "far_grid": (20, 100, False)},
    "curves": {"random_curves": (20, 100, True), "stabiliser": (10, 40, True)},
    "bounds": {"c3_points": (10 ** 4, 10 ** 5, False), "order_pairs": (1000, 10 ** 4, True),
               "disc_range": (2000, 10 ** 4, False)},
}


class Sizes:
    def __init__(self, suite: str, full: bool, cases: Optional[int]):
        self.table = SIZES[suite]
        self.full = full
        self.cases = cases

    def __getitem__(self, key: str) -> int:
        default, full, scalable = self.table[key]
        if self.cases is not None and scalable:
            return self.cases
        return full if self.full else default


class Tally:
    """Accumulates cases of one property into a single Check."""

    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failures = 0
        self.first_failure = None
        self.tight = None          # (slack, lhs, rhs, info)

    def add(self, passed: bool, lhs=None, rhs=None, info=None, slack=None):
        self.cases += 1
        if not passed:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = {"lhs": render(lhs), "rhs": render(rhs), "case": render(info)}
        if slack is None:
            slack = _relative_slack(lhs, rhs)
        if self.tight is None or (slack is not None and slack < self.tight[0]):
            self.tight = (slack if slack is not None else mpmath.inf, lhs, rhs, info)

    def check(self) -> Check:
        lhs = rhs = info = None
        if self.tight is not None:
            _, lhs, rhs, info = self.tight
        detail = {"cases": self.cases, "failures": self.failures, "tightest_case": info}
        if self.first_failure is not None:
            detail["first_failure"] = self.first_failure
        return Check(self.name, self.failures == 0 and self.cases > 0, lhs, rhs, detail)


def _relative_slack(lhs, rhs):
    try:
        lhs, rhs = mpmath.mpf(lhs), mpmath.mpf(rhs)
    except (TypeError, ValueError):
        return None
    with mpmath.workprec(64):
        return (rhs - lhs) / max(abs(rhs), abs(lhs), mpmath.mpf(10) ** -300)


def _mpq(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def _rand_fraction(rng: random.Random, num: int, den: int) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def _rand_matrix(rng: random.Random, height_cap: int) -> UnimodularMatrix:
    while True:
        a, c = rng.randint(-height_cap, height_cap), rng.randint(-height_cap, height_cap)
        if math.gcd(a, c) != 1:
            continue
        _, u, v = _egcd(a, c)             # a u + c v = 1
        b, d = -v, u
        k = rng.randint(-3, 3)
        b, d = b + k * a, d + k * c
        if max(abs(a), abs(b), abs(c), abs(d)) <= height_cap:
            return UnimodularMatrix(a, b, c, d)


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _squarefree(rng: random.Random) -> int:
    while True:
        d = rng.choice([v for v in range(-60, 61) if v not in (0, 1)])
        if all(d % (p * p) for p in (2, 3, 5, 7)):
            return d


# --- heights -------------------------------------------------------------------

def suite_heights(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    inv_r, inv_q, kron, units, cm_b, cm_e, diff = (Tally(n) for n in (
        "inverse_rational_exact", "inverse_quadratic", "kronecker", "unit_two_sums",
        "cm_height_bound", "cm_height_exact", "difference_heights"))
    for _ in range(size["rational"]):
        x = Fraction(rng.randint(1, 10 ** 12) * rng.choice((1, -1)), rng.randint(1, 10 ** 12))
        a, b = heights.height(heights.AlgebraicNumber(x), prec), heights.height(heights.AlgebraicNumber(1 / x), prec)
        inv_r.add(a == b, a, b, str(x), slack=-abs(a - b))
    tol = mpmath.ldexp(1, -240)
    for _ in range(size["quadratic"]):
        x = heights.AlgebraicNumber(_rand_fraction(rng, 50, 20), _rand_fraction(rng, 50, 20) or 1, _squarefree(rng))
        if x.is_zero():
            continue
        a, b = heights.height(x, prec), heights.height(x.inverse(), prec)
        with mpmath.workprec(prec):
            inv_q.add(abs(a - b) <= tol, abs(a - b), tol, [str(x.a), str(x.b), x.d])
    roots_of_unity = [heights.AlgebraicNumber(0), heights.AlgebraicNumber(1), heights.AlgebraicNumber(-1),
                      heights.AlgebraicNumber(0, 1, -1), heights.AlgebraicNumber(Fraction(1, 2), Fraction(1, 2), -3),
                      heights.AlgebraicNumber(Fraction(-1, 2), Fraction(1, 2), -3)]
    for x in roots_of_unity:
        h = heights.height(x, prec)
        kron.add(h <= mpmath.ldexp(1, 8 - prec), h, 0, [str(x.a), str(x.b), x.d])
    for _ in range(50):
        x = heights.AlgebraicNumber(_rand_fraction(rng, 20, 7), _rand_fraction(rng, 20, 7), _squarefree(rng))
        if x in roots_of_unity or x.is_zero():
            continue
        h = heights.height(x, prec)
        kron.add(h > mpmath.ldexp(1, 8 - prec), 0, h, [str(x.a), str(x.b), x.d])
    with mpmath.workprec(prec):
        for _ in range(size["units"]):
            D = rng.randint(2, 8)
            logs = [mpmath.mpf(rng.uniform(-5, 5)) for _ in range(D - 1)]
            logs.append(-mpmath.fsum(logs))
            mags = [mpmath.exp(v) for v in logs]
            try:
                up, lo = heights.unit_height_decomposition(mags, D, prec)
                gap = abs(up - lo)
                units.add(gap <= mpmath.ldexp(1, 32 - prec), gap, mpmath.ldexp(1, 32 - prec), D)
            except (ArithmeticError, ValueError) as exc:
                units.add(False, None, None, str(exc))
    for disc in range(-3, -size["cm_disc"] - 1, -1):
        if disc % 4 not in (0, 1):
            continue
        for a, b, c in curves.reduced_forms(disc):
            x = heights.AlgebraicNumber.from_minpoly(a, b, c)
            h = heights.height(x, 128)
            with mpmath.workprec(128):
                rhs = mpmath.log(-disc) / 2
                cm_b.add(h <= rhs + mpmath.ldexp(1, -100), h, rhs, [a, b, c])
            # H(xi)^2 = c for a reduced root, so the exact route compares c with |disc|
            cm_e.add(c <= -disc, c, -disc, [a, b, c])
    for _ in range(size["pairs"]):
        d = _squarefree(rng)
        x = heights.AlgebraicNumber(_rand_fraction(rng, 30, 9), _rand_fraction(rng, 30, 9), d)
        y = heights.AlgebraicNumber(_rand_fraction(rng, 30, 9), _rand_fraction(rng, 30, 9), d)
        for chk in heights.height_arithmetic_checks(x, y, prec):
            diff.add(chk.passed, chk.lhs, chk.rhs, chk.name)
    return [t.check() for t in (inv_r, inv_q, kron, units, cm_b, cm_e, diff)]


# --- arith ---------------------------------------------------------------------

def _sieve_tables(n: int):
    sigma0 = [0] * (n + 1)
    sigma1 = [0] * (n + 1)
    for d in range(1, n + 1):
        for m in range(d, n + 1, d):
            sigma0[m] += 1
            sigma1[m] += d
    phi = list(range(n + 1))
    psi = list(range(n + 1))
    omega = [0] * (n + 1)
    for p in range(2, n + 1):
        if phi[p] == p:                      # p is prime
            for m in range(p, n + 1, p):
                phi[m] -= phi[m] // p
                psi[m] += psi[m] // p
                omega[m] += 1
    return sigma0, sigma1, phi, psi, omega


def suite_arith(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    sig, mert, orc, lam, gl2, tri, census, orbit = (Tally(n) for n in (
        "sigma1_vs_psi", "mertens_loglog", "divisor_oracles", "lambda_majorant",
        "gl2_order_enumeration", "triangular_order_enumeration", "cyclic_subgroup_census",
        "orbit_bound"))
    with mpmath.workprec(64):
        zeta2 = mpmath.pi ** 2 / 6
        for N in range(1, size["sigma_range"] + 1):
            s, p = arith.sigma1(N), arith.dedekind_psi(N)
            sig.add(s <= zeta2 * p, s, zeta2 * p, N)
        for n in range(4, size["mertens_range"] + 1):
            m = arith.mertens_sum(n)
            rhs = mpmath.mpf("5.25") * mpmath.log(mpmath.log(n))
            mert.add(m <= rhs, m, rhs, n)
        n_or = size["oracle_range"]
        tables = _sieve_tables(n_or)
        for N in range(1, n_or + 1):
            got = (arith.sigma0(N), arith.sigma1(N), arith.euler_phi(N), arith.dedekind_psi(N), arith.omega(N))
            want = tuple(t[N] for t in tables)
            orc.add(got == want, list(got), list(want), N, slack=0 if got == want else -1)
            lhs = arith.lambda_autissier(N)
            rhs = mpmath.fsum(4 * mpmath.log(p) / (3 * p) for p in arith.factorize(N))
            lam.add(lhs <= rhs + mpmath.ldexp(1, -50), lhs, rhs, N)
    for N in range(1, size["gl2_range"] + 1):
        a, b = arith.gl2_order(N), arith.gl2_order_bruteforce(N)
        gl2.add(a == b, a, b, N, slack=0 if a == b else -1)
        a, b = arith.triangular_order(N), arith.triangular_order_bruteforce(N)
        tri.add(a == b, a, b, N, slack=0 if a == b else -1)
    for N in range(1, size["census_range"] + 1):
        rep = arith.cyclic_subgroup_census(N)
        census.add(rep.passed, rep.count, rep.psi, rep.to_dict(), slack=0 if rep.passed else -1)
    for _ in range(50):
        N, idx = rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 4)
        ob = arith.serre_orbit_lower_bound(N, idx)
        with mpmath.workprec(64):
            ok = ob.bound >= 1 and abs(ob.ratio * idx - arith.dedekind_psi(N)) <= 1e-9 * arith.dedekind_psi(N)
        orbit.add(ok, ob.bound, 1, [N, idx], slack=0 if ok else -1)
    return [t.check() for t in (sig, mert, orc, lam, gl2, tri, census, orbit)]


# --- lattice -------------------------------------------------------------------

def _random_ellipse(rng: random.Random) -> lattice.Ellipse:
    while True:
        A, B, C = rng.randint(1, 60), rng.randint(-60, 60), rng.randint(1, 60)
        if 4 * A * C - B * B > 0:
            return lattice.Ellipse(A, B, C)


def _xi_pool() -> list[HPoint]:
    pool = [ZETA, ZETA2, I_POINT]
    for disc in (-7, -8, -11, -15, -20, -23, -24, -31, -40):
        pool += [HPoint.quadratic(*f) for f in curves.reduced_forms(disc)]
    pool += [HPoint(Fraction(1, 3), Fraction(3, 2)), HPoint(Fraction(-1, 4), 2), HPoint(0, 3)]
    return pool


def suite_lattice(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    dav, circ, ann, mat = (Tally(n) for n in (
        "davenport", "circumference_vs_quadrature", "annulus_count", "matrix_count"))
    for _ in range(size["davenport"]):
        e = _random_ellipse(rng)
        with mpmath.workprec(64):
            s_max = int(10 ** 4 * mpmath.sqrt(e.discriminant()) / (2 * mpmath.pi))
        scale = Fraction(rng.randint(1, max(1, s_max) * 100), 100)
        chk = lattice.davenport_check(e, scale, prec)
        dav.add(chk.passed, chk.lhs, chk.rhs, [e.A, e.B, e.C, str(scale)])
        bound = lattice.circumference_bound(e, prec)
        quad = mpmath.mpf(lattice.perimeter_quadrature(e))
        # circles attain the bound, so allow the quadrature tolerance
        circ.add(bound >= quad * (1 - mpmath.mpf(10) ** -10), quad, bound, [e.A, e.B, e.C])
    pool = _xi_pool()
    for _ in range(size["annulus"]):
        xi = rng.choice(pool)
        y = Fraction(rng.randint(433, 10000), 1000)            # sqrt(3)/4 < 0.433
        with mpmath.workprec(64):
            limit = lattice.lemma_eps_limit(xi, 64)
        eps = Fraction(rng.randint(1, 1000), 1000) * Fraction(int(limit * 10 ** 6), 10 ** 6)
        spec = lattice.AnnulusSpec(xi, y, eps, rng.choice((1, -1)))
        count = len(lattice.annulus_pairs(spec, prec))
        bound = lattice.annulus_count_bound(spec, prec)
        ann.add(count <= bound, count, bound, {"xi": xi.to_dict(12), "y": str(y), "eps": str(eps)})
    cheap = [ZETA, ZETA2, I_POINT, HPoint.quadratic(1, -1, 2), HPoint.quadratic(1, 0, 2)]
    for k in range(size["bruteforce"]):
        xi = cheap[k % len(cheap)]
        x = Fraction(rng.randint(0, 30), 10)
        y = Fraction(rng.randint(5, 200), 100)
        eps = Fraction(1, rng.choice((10, 30, 100, 1000)))
        count = lattice.matrix_count_bruteforce(xi, x, y, eps, prec=prec)
        bound = lattice.matrix_count_bound(xi, x, y, eps, prec)
        mat.add(count <= bound, count, bound, {"xi": xi.to_dict(12), "x": str(x), "y": str(y), "eps": str(eps)})
    return [t.check() for t in (dav, circ, ann, mat)]


# --- ellipse lemma ---------------------------------------------------------------

def suite_ellipse_lemma(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    tallies = {n: Tally(n) for n in ("entries_annulus", "entries_first_column", "entry_d", "entry_b")}
    pool = _xi_pool()
    made = 0
    while made < size["triples"]:
        xi = rng.choice(pool)
        with mpmath.workprec(prec):
            limit = lattice.lemma_eps_limit(xi, prec)
            eps = limit * mpmath.mpf(rng.randint(1, 1000)) / 1000
            r = eps * mpmath.sqrt(mpmath.mpf(rng.random()))
            theta = 2 * mpmath.pi * mpmath.mpf(rng.random())
            p = xi.value + r * mpmath.expj(theta)
            if p.imag <= 0:
                continue
            near = HPoint(p.real, p.imag, prec)
            if not halfplane.in_closure(near):
                continue
            g = _rand_matrix(rng, 40)
            tau = halfplane.apply(g, near)
        try:
            checks = lattice.ellipse_lemma_check(xi, tau, eps, prec)
        except PreconditionError:
            continue                      # rounding moved the reduced point outside the disc
        made += 1
        case = {"xi": xi.to_dict(12), "gamma": g.to_dict(), "eps": render(eps, 12)}
        for chk in checks:
            tallies[chk.name].add(chk.passed, chk.lhs, chk.rhs, case)
    return [t.check() for t in tallies.values()]


# --- hecke ---------------------------------------------------------------------

TAU0_IN_F = [(0, 2), (0, Fraction(3, 2)), (Fraction(1, 4), 1), (Fraction(1, 3), Fraction(5, 4)),
             (Fraction(-1, 3), 2), (Fraction(1, 2), 1), (Fraction(-2, 5), 3), (Fraction(1, 5), Fraction(7, 5)),
             (Fraction(1, 10), Fraction(11, 10)), (Fraction(-1, 2), Fraction(5, 2))]
TAU0_OUTSIDE = [(1, 1), (Fraction(1, 3), Fraction(1, 2)), (2, 3), (Fraction(-3, 2), Fraction(1, 4)),
                (Fraction(1, 7), Fraction(1, 7)), (5, Fraction(1, 3)), (0, Fraction(1, 2)),
                (Fraction(3, 4), Fraction(2, 3)), (Fraction(-5, 6), Fraction(1, 5)), (Fraction(1, 2), Fraction(1, 10))]


def tau0_grid(n: int) -> list[HPoint]:
    """n exact points, half in the fundamental domain and half outside."""
    half = (n + 1) // 2
    return [HPoint(x, y) for x, y in TAU0_IN_F[:half] + TAU0_OUTSIDE[:n - half]]


CLUSTER_XIS = (("zeta", ZETA), ("zeta2", ZETA2), ("i", I_POINT))
CLUSTER_EPS = (Fraction(1, 100), Fraction(1, 1000))


def suite_hecke(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    cnt, lem, prop, ell, orb, dual = (Tally(n) for n in (
        "hecke_counts", "cluster_vs_lemma_bound", "cluster_vs_prop_bound", "members_pass_ellipse_lemma",
        "orbit_invariance", "batch_vs_direct"))
    for N in range(1, size["count_range"] + 1):
        full, cyc = hecke.hecke_matrices(N), hecke.hecke_matrices(N, cyclic_only=True)
        ok = len(full) == arith.sigma1(N) and len(cyc) == arith.dedekind_psi(N)
        cnt.add(ok, [len(full), len(cyc)], [arith.sigma1(N), arith.dedekind_psi(N)], N, slack=0 if ok else -1)
    n_max = size["n_max"]
    xis = [x for _, x in CLUSTER_XIS]
    s0 = [0] + [arith.sigma0(N) for N in range(1, n_max + 1)]
    ps = [0] + [arith.dedekind_psi(N) for N in range(1, n_max + 1)]
    for tau0 in tau0_grid(size["grid"]):
        res = hecke.cluster_counts(tau0, n_max, xis, CLUSTER_EPS)
        inside = halfplane.in_closure(tau0)
        for k, (xname, xi) in enumerate(CLUSTER_XIS):
            with mpmath.workprec(64):
                factor = hecke.cluster_factor(tau0.with_prec(64), xi.with_prec(64))
                ax5 = abs(xi.with_prec(64).value) ** 5
                t0 = abs(tau0.with_prec(64).value)
            for j, eps in enumerate(CLUSTER_EPS):
                counts = res[(k, j)]
                with mpmath.workprec(64):
                    se = mpmath.sqrt(_mpq(eps))
                    worst_l = worst_p = None
                    bad_l = bad_p = 0
                    for N in range(1, n_max + 1):
                        c = int(counts[N])
                        bl = mpmath.sqrt(N) * s0[N] * (1 + factor) + mpmath.pi ** 2 / 6 * factor * se * ps[N]
                        if c > bl:
                            bad_l += 1
                        if worst_l is None or c / bl > worst_l[0]:
                            worst_l = (c / bl, c, bl, N)
                        if inside:
                            bp = 10 ** 7 * t0 * ax5 * (mpmath.sqrt(N) * s0[N] + se * ps[N])
                            if c > bp:
                                bad_p += 1
                            if worst_p is None or c / bp > worst_p[0]:
                                worst_p = (c / bp, c, bp, N)
                case = {"tau0": tau0.to_dict(12), "xi": xname, "eps": str(eps), "N": worst_l[3],
                        "members": int(counts.sum())}
                lem.add(bad_l == 0, worst_l[1], worst_l[2], case)
                if inside:
                    prop.add(bad_p == 0, worst_p[1], worst_p[2], dict(case, N=worst_p[3]))
                for member in res["members"][(k, j)]:
                    tau = hecke.tau_of(member.matrix, tau0)
                    for chk in lattice.ellipse_lemma_check(xi, tau, eps, prec):
                        ell.add(chk.passed, chk.lhs, chk.rhs,
                                {"tau0": tau0.to_dict(12), "M": member.matrix.to_dict(), "check": chk.name})
    grid = tau0_grid(10)
    for _ in range(size["orbit_samples"]):
        tau0 = rng.choice(grid)
        g = _rand_matrix(rng, 6)
        moved = halfplane.apply(g, tau0)
        N = rng.randint(1, 30)
        eps, (xname, xi) = rng.choice(CLUSTER_EPS), rng.choice(CLUSTER_XIS)
        a = len(hecke.cluster_enumerate(tau0, N, eps, xi, strict=False).members)
        b = len(hecke.cluster_enumerate(moved, N, eps, xi, strict=False).members)
        orb.add(a == b, a, b, {"tau0": tau0.to_dict(12), "gamma": g.to_dict(), "N": N, "xi": xname},
                slack=0 if a == b else -1)
    tau0 = HPoint(Fraction(1, 7), Fraction(1, 3))
    res = hecke.cluster_counts(tau0, size["dual_range"], xis, CLUSTER_EPS)
    for N in range(1, size["dual_range"] + 1):
        for k, (xname, xi) in enumerate(CLUSTER_XIS):
            for j, eps in enumerate(CLUSTER_EPS):
                direct = len(hecke.cluster_enumerate(tau0, N, eps, xi, strict=False).members)
                fast = int(res[(k, j)][N])
                dual.add(direct == fast, fast, direct, {"N": N, "xi": xname, "eps": str(eps)},
                         slack=0 if direct == fast else -1)
    return [t.check() for t in (cnt, lem, prop, ell, orb, dual)]


# --- modular -------------------------------------------------------------------

def _rand_exact_point(rng: random.Random) -> HPoint:
    return HPoint(Fraction(rng.randint(-300, 300), rng.randint(1, 60)),
                  Fraction(rng.randint(1, 300), rng.randint(1, 100)))


def corner_grid(corner: HPoint, n_r: int, n_t: int, prec: int) -> list[HPoint]:
    """Polar grid of radius up to 1e-3 inside the closed domain at zeta or zeta^2."""
    with mpmath.workprec(prec):
        base = corner.value
        lo, hi = (mpmath.pi / 2, 5 * mpmath.pi / 6) if corner == ZETA else (mpmath.pi / 6, mpmath.pi / 2)
        out = []
        for i in range(1, n_r + 1):
            r = mpmath.mpf("1e-3") * i / n_r
            for k in range(n_t):
                theta = lo + (hi - lo) * (k + mpmath.mpf(1) / 2) / n_t
                p = base + r * mpmath.expj(theta)
                pt = HPoint(p.real, p.imag, prec)
                if halfplane.in_closure(pt):
                    out.append(pt)
        return out


def far_grid(n_x: int, n_y: int, prec: int) -> list[HPoint]:
    """Grid of the closed domain (Im up to 3) keeping 1e-3 away from zeta and zeta^2."""
    with mpmath.workprec(prec):
        out = []
        for i in range(n_x):
            x = -mpmath.mpf(1) / 2 + mpmath.mpf(i) / (n_x - 1)
            y0 = mpmath.sqrt(1 - x * x)
            for k in range(n_y):
                y = y0 + (3 - y0) * mpmath.mpf(k) / (n_y - 1)
                pt = HPoint(x, y, prec)
                if min(abs(pt.value - ZETA.value), abs(pt.value - ZETA2.value)) >= mpmath.mpf("1e-3"):
                    out.append(pt)
        return out


def suite_modular(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    spec, inv, invf, refl, der, near, far = (Tally(n) for n in (
        "special_values", "invariance_exact_points", "invariance_float_points", "reflection",
        "derivative_vs_difference", "jbound_cubic_near_corners", "jbound_far"))
    tol200 = mpmath.ldexp(1, -200)
    for name, pt, want in (("i", I_POINT, 1728), ("zeta", ZETA, 0), ("zeta2", ZETA2, 0)):
        with mpmath.workprec(prec):
            err = abs(modular.j_eval(pt.with_prec(prec)) - want)
        spec.add(err <= tol200, err, tol200, name)
    tol = mpmath.ldexp(1, -240)
    for _ in range(size["invariance"]):
        tau, g = _rand_exact_point(rng), _rand_matrix(rng, 100)
        tau = tau.with_prec(prec)
        with mpmath.workprec(prec):
            a, b = modular.j_eval(tau), modular.j_eval(halfplane.apply(g, tau))
            err = abs(a - b)
        inv.add(err <= tol, err, tol, {"tau": tau.to_dict(12), "gamma": g.to_dict()})
    for _ in range(size["invariance"] // 10 or 1):
        g = _rand_matrix(rng, 100)
        with mpmath.workprec(prec):
            tau = HPoint(mpmath.mpf(rng.uniform(-0.5, 0.5)), mpmath.mpf(rng.uniform(0.9, 2.0)), prec)
            a, b = modular.j_eval(tau), modular.j_eval(halfplane.apply(g, tau))
            rel = abs(a - b) / max(1, abs(a))
            bound = mpmath.ldexp(1, 40 - prec) * halfplane.matrix_height(g) ** 2
        invf.add(rel <= bound, rel, bound, {"tau": tau.to_dict(12), "gamma": g.to_dict()})
    for _ in range(size["reflection"]):
        tau = _rand_exact_point(rng).with_prec(prec)
        with mpmath.workprec(prec):
            a = modular.j_eval(tau.conj_reflect())
            b = mpmath.conj(modular.j_eval(tau))
            err = abs(a - b) / max(1, abs(b))
        refl.add(err <= tol, err, tol, tau.to_dict(12))
    for _ in range(size["derivative"]):
        with mpmath.workprec(prec):
            x, y = mpmath.mpf(rng.uniform(-0.45, 0.45)), mpmath.mpf(rng.uniform(1.05, 2.5))
            tau = HPoint(x, y, prec)
            d = modular.j_derivative(tau, 1, prec)
            h = mpmath.mpf(10) ** -25
            fd = (modular.j_eval(HPoint(x + h, y, prec)) - modular.j_eval(HPoint(x - h, y, prec))) / (2 * h)
            rel = abs(d - fd) / abs(d)
        der.add(rel <= mpmath.mpf(10) ** -10, rel, mpmath.mpf(10) ** -10, tau.to_dict(12))
    n = size["near_grid"]
    for corner in (ZETA, ZETA2):
        for pt in corner_grid(corner, n, n // 2, prec):
            chk = modular.jbound_check(pt)
            near.add(chk.passed, chk.detail["ratio"], (44000, 47000), pt.to_dict(12), slack=0)
    n = size["far_grid"]
    for pt in far_grid(n, n, prec):
        chk = modular.jbound_check(pt)
        far.add(chk.passed, chk.lhs, chk.rhs, pt.to_dict(12), slack=_relative_slack(chk.rhs, chk.lhs))
    return [t.check() for t in (spec, inv, invf, refl, der, near, far)]


# --- curves --------------------------------------------------------------------

def random_curve(rng: random.Random) -> curves.CurveOverQ:
    while True:
        g2, g3 = _rand_fraction(rng, 60, 12), _rand_fraction(rng, 60, 12)
        if g2 ** 3 != 27 * g3 ** 2:
            return curves.CurveOverQ(g2, g3)


def suite_curves(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    rt, inv, special, tauh, cm, cinv, penc = (Tally(n) for n in (
        "period_round_trip", "lattice_invariants", "special_curves", "tau_height",
        "cm_constant_branches", "cm_constant_stabiliser", "pen_conjugates"))
    tol = mpmath.ldexp(1, -216)
    for _ in range(size["random_curves"]):
        E = random_curve(rng)
        P = curves.periods(E, prec)
        with mpmath.workprec(prec):
            err = abs(modular.j_eval(P.tau0.with_prec(prec)) - _mpq(E.j0))
            rt.add(err <= tol, err, tol, E.to_dict())
            rel = max(abs(P.g2_check - _mpq(E.g2)) / max(1, abs(_mpq(E.g2))),
                      abs(P.g3_check - _mpq(E.g3)) / max(1, abs(_mpq(E.g3))))
            rinv = mpmath.ldexp(1, 40 - prec)
            inv.add(rel <= rinv, rel, rinv, E.to_dict())
        chk = curves.tau_height_check(P, 1, heights.height(heights.AlgebraicNumber(E.j0), prec), prec)
        tauh.add(chk.passed, chk.lhs, chk.rhs, E.to_dict())
    for (g2, g3), target in (((4, 0), I_POINT), ((0, 4), ZETA)):
        P = curves.periods(curves.CurveOverQ(g2, g3), prec)
        with mpmath.workprec(prec):
            err = abs(P.tau0.value - target.with_prec(prec).value)
        special.add(err <= tol, err, tol, [g2, g3])
    for form, branch in (((1, 0, 1), "i"), ((1, -1, 2), "boundary"), ((1, 0, 2), "boundary"),
                         ((2, -1, 3), "interior"), ((3, -1, 5), "interior")):
        cc = curves.c_constant(curves.cm_point(*form, prec), prec)
        ok = cc.branch == branch and cc.value > 0
        cm.add(ok, cc.branch, branch, {"form": list(form), "c": cc.to_dict()}, slack=0 if ok else -1)
    with mpmath.workprec(prec):
        j2 = modular.j_derivative(I_POINT.with_prec(prec), 2, prec)
        h = mpmath.mpf(10) ** -20
        fd = (modular.j_eval(HPoint(0, 1 + h, prec)) - 2 * modular.j_eval(I_POINT.with_prec(prec))
              + modular.j_eval(HPoint(0, 1 - h, prec))) / (h * h)
        rel = abs(abs(j2) - abs(fd)) / abs(j2)
    cm.add(rel <= mpmath.mpf(10) ** -10, rel, mpmath.mpf(10) ** -10, "second derivative at i")
    forms = [(1, -1, 2), (2, -1, 3), (1, 0, 5), (2, 2, 3), (3, 1, 7)]
    for _ in range(size["stabiliser"]):
        A, B, C = rng.choice(forms)
        g = _rand_matrix(rng, 8)
        # the form of g^{-1} xi has the same reduced point as xi
        a, b, c, d = g.a, g.b, g.c, g.d
        A2 = A * a * a + B * a * c + C * c * c
        B2 = 2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d
        C2 = A * b * b + B * b * d + C * d * d
        if A2 < 0:
            A2, B2, C2 = -A2, -B2, -C2
        p1, p2 = curves.cm_point(A, B, C, prec), curves.cm_point(A2, B2, C2, prec)
        v1, v2 = curves.c_constant(p1, prec).value, curves.c_constant(p2, prec).value
        cinv.add(p1.point == p2.point and v1 == v2, v2, v1, {"form": [A, B, C], "moved": [A2, B2, C2]},
                 slack=0 if v1 == v2 else -1)
    for disc in (-4, -7, -8, -15, -20, -23):
        pv = curves.pen(disc, prec)
        values = [curves.c_constant(HPoint.quadratic(*f, prec=prec), prec).value for f in curves.reduced_forms(disc)]
        with mpmath.workprec(prec):
            want = mpmath.log(max([mpmath.mpf(1)] + [1 / v for v in values]))
            err = abs(pv - want)
        penc.add(err <= mpmath.ldexp(1, 16 - prec), pv, want, {"disc": disc, "conjugates": len(values)})
    return [t.check() for t in (rt, inv, special, tauh, cm, cinv, penc)]


# --- bounds --------------------------------------------------------------------

def lombardo_lnln_independent(D: int = 1, hE: int = 1) -> mpmath.mpf:
    """ln ln of exp(120^2 I^2) for the Lombardo index I, computed directly."""
    with mpmath.workprec(bounds.BASE_PREC + 71400):
        lnI = (mpmath.mpf(10) ** 21483 + mpmath.mpf(24) * 10 ** 9 * mpmath.log(D)
               + 2 * mpmath.mpf(24) * 10 ** 9 * mpmath.log(hE))
        return mpmath.log(14400) + 2 * lnI


def suite_bounds(rng: random.Random, size: Sizes, prec: int) -> list[Check]:
    LV = bounds.LogValue
    c3t, cross, lomb, mono, spec, epsu, epst, order, cmon, falt = (Tally(n) for n in (
        "c3_below_26", "crossover", "lombardo_loglog", "monotonicity", "alpha_zero_dispatch",
        "eps_admissible_unit", "eps_admissible_translate", "logvalue_order", "crossover_monotone_index",
        "faltings_chain"))
    n = size["c3_points"]
    with mpmath.workprec(64):
        worst = None
        for k in range(n + 1):
            x = mpmath.mpf(100) * k / n
            v = bounds.c3(x)
            if worst is None or v > worst[0]:
                worst = (v, x)
        c3t.add(worst[0] < 26, worst[0], 26, {"h_j0": worst[1], "points": n + 1})
    base = bounds.BoundInputs(1, 1, 1, LV.of(1))
    cr = bounds.crossover_search(base)
    fb = bounds.final_bound_unit(base)
    for chk in cr.checks:
        cross.add(chk.passed, chk.lhs, chk.rhs, chk.name, slack=0 if chk.passed else -1)
    cross.add(LV.from_log(cr.ln_N) <= fb.value, cr.ln_N, fb.value.ln_mpf(), "N* <= final bound",
              slack=0)
    I = bounds.lombardo_index(1, 1)
    rep = bounds.final_bound_unit(bounds.BoundInputs(1, 1, 1, I))
    want = lombardo_lnln_independent()
    with mpmath.workprec(bounds.BASE_PREC + 71400):
        lead = 2 * mpmath.mpf(10) ** 21483
        got_off, want_off = rep.value.mag - lead, want - lead
        rel = abs(got_off - want_off) / abs(want_off)
        ok = rep.value.level == 2 and rel <= mpmath.mpf(10) ** -40 and abs(rep.value.mag / lead - 1) < 1e-100
    lomb.add(ok, got_off, want_off, {"dominant": rep.dominant, "level": rep.value.level}, slack=0 if ok else -1)
    grid = {"h": (5, 7, 10), "D": (1, 2, 3), "index": (1, 2, 10), "h_j0": (0, 2, 5)}
    keys = list(grid)
    for combo in itertools.product(*grid.values()):
        params = dict(zip(keys, combo))
        here = bounds.final_bound_unit(bounds.BoundInputs(params["D"], params["h"], params["h_j0"], params["index"])).value
        for key in keys:
            vals = grid[key]
            i = vals.index(params[key])
            if i + 1 < len(vals):
                up = dict(params, **{key: vals[i + 1]})
                there = bounds.final_bound_unit(bounds.BoundInputs(up["D"], up["h"], up["h_j0"], up["index"])).value
                mono.add(here <= there, here.to_dict(20), there.to_dict(20), {"at": params, "raise": key}, slack=0)
    c1, c2 = bounds.conjbound_c(1, 1)
    for L in (60, 200, 1000, 10 ** 5):
        N = LV.from_log(L)
        for eps in (mpmath.mpf(10) ** -6, mpmath.mpf(10) ** -9):
            a = bounds.upper_bound_hj_translate(N, eps, 1, 1, 1, -3, 1, 0, c1, c2, alpha_zero=True)
            b = bounds.upper_bound_hj_unit(N, eps, 1, 1, 1, c1, c2)
            spec.add(a == b, a, b, {"ln_N": L}, slack=0 if a == b else -1)
        with mpmath.workprec(bounds.BASE_PREC):
            a = bounds.upper_bound_hj_unit(N, mpmath.mpf(L) ** -12, 1, 1, 1, c1, c2)
            b = bounds.upper_bound_hj_unit_specialised(N, 1, 1, 1, c1, c2)
            err = abs(a - b) / abs(b)
        spec.add(err <= mpmath.ldexp(1, 16 - bounds.BASE_PREC), a, b, {"ln_N": L, "form": "eps=(log N)^-12"})
    with mpmath.workprec(64):
        L0 = mpmath.log(10 ** 7)
        for k in range(200):
            L = L0 * mpmath.mpf(1.25) ** k
            ok = bounds.eps_admissible_unit(LV.from_log(L))
            epsu.add(ok, L ** -12, mpmath.mpf(10) ** -5, {"ln_N": L}, slack=0 if ok else -1)
    for disc in range(-3, -size["disc_range"] - 1, -1):
        if disc % 4 not in (0, 1):
            continue
        L = 3 * -disc
        for label, m in (("sqrt|disc|/2", None), ("sqrt(1+|disc|)/2", mpmath.sqrt(1 - disc) / 2)):
            ok = bounds.eps_admissible_translate(disc, L, m)
            epst.add(ok, None, None, {"disc": disc, "max_reading": label}, slack=0 if ok else -1)
    for disc in (-3, -4, -7, -15, -23, -47, -71):
        m = curves.max_conjugate_abs(disc)
        with mpmath.workprec(64):
            ok = abs(m - mpmath.sqrt(1 - disc) / 2 if disc % 4 else m - mpmath.sqrt(-disc) / 2) < 1e-15
        epst.add(ok, m, None, {"disc": disc, "enumerated_max": True}, slack=0 if ok else -1)
    for _ in range(size["order_pairs"]):
        a, b = _order_sample(rng), _order_sample(rng)
        got = (LV.of(a) > LV.of(b)) - (LV.of(a) < LV.of(b))
        want = (a > b) - (a < b)
        order.add(got == want, str(a), str(b), None, slack=0 if got == want else -1)
    cr10 = bounds.crossover_search(bounds.BoundInputs(1, 1, 1, 10))
    cmon.add(cr10.ln_N > cr.ln_N, cr.ln_N, cr10.ln_N, "index 1 vs 10")
    for N in range(4, 500, 7):
        chk = bounds.faltings_chain_check(N, 1, rng.randint(1, 50))
        falt.add(chk.passed, chk.lhs, chk.rhs, N)
    return [t.check() for t in (c3t, cross, lomb, mono, spec, epsu, epst, order, cmon, falt)]


def _order_sample(rng: random.Random):
    kind = rng.random()
    if kind < 0.4:
        return Fraction(rng.randint(-10 ** 15, 10 ** 15), rng.randint(1, 10 ** 6))
    if kind < 0.8:
        return rng.choice((1, -1)) * rng.randint(2 ** 60, 2 ** 200)
    return rng.choice((1, -1)) * rng.randint(0, 10 ** 4)


SUITE_FUNCS: dict[str, Callable] = {
    "heights": suite_heights, "arith": suite_arith, "lattice": suite_lattice,
    "ellipse-lemma": suite_ellipse_lemma, "hecke": suite_hecke, "modular": suite_modular,
    "curves": suite_curves, "bounds": suite_bounds,
}


@dataclass
class SuiteReport:
    name: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def run_suite(name: str, seed: int = 1, cases: Optional[int] = None, full: bool = False,
              prec: int = halfplane.DEFAULT_PREC) -> SuiteReport:
    if name not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    rng = random.Random(f"{seed}:{name}")
    return SuiteReport(name, SUITE_FUNCS[name](rng, Sizes(name, full, cases), prec))


def run(suite: str, seed: int = 1, cases: Optional[int] = None, full: bool = False,
        prec: int = halfplane.DEFAULT_PREC) -> list[SuiteReport]:
    names = SUITES if suite == "all" else (suite,)
    return [run_suite(n, seed, cases, full, prec) for n in names]
