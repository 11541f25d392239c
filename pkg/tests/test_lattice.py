import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from isobound import lattice
from isobound.errors import CapTooSmall, PreconditionError
from isobound.halfplane import I_POINT, ZETA, HPoint, UnimodularMatrix, apply
from isobound.lattice import (AnnulusSpec, Ellipse, annulus_count_bound, annulus_pairs,
                              circumference_bound, davenport_check, ellipse_area, lattice_count,
                              matrix_count_bound, matrix_count_bruteforce, perimeter_quadrature)


def brute_count(e, scale, r):
    return sum(1 for X in range(-r, r + 1) for Y in range(-r, r + 1) if e.form(X, Y) <= scale)


def test_area_examples():
    with mpmath.workprec(256):
        assert abs(ellipse_area(Ellipse(1, 0, 1)) - mpmath.pi) < 1e-70
        assert abs(ellipse_area(Ellipse(1, 0, 4)) - mpmath.pi / 2) < 1e-70
        assert abs(ellipse_area(Ellipse(1, 1, 1)) - 2 * mpmath.pi / mpmath.sqrt(3)) < 1e-70


def test_circumference_examples():
    with mpmath.workprec(256):
        assert abs(circumference_bound(Ellipse(1, 0, 1)) - 2 * mpmath.pi) < 1e-70
        assert abs(perimeter_quadrature(Ellipse(1, 0, 1)) - 2 * math.pi) < 1e-10
        b = circumference_bound(Ellipse(1, 0, 4))
        assert abs(b - mpmath.sqrt(10) * mpmath.pi / 2) < 1e-70
        assert abs(b - 4.967) < 1e-3
        assert abs(perimeter_quadrature(Ellipse(1, 0, 4)) - 4.8442) < 1e-4
        # sqrt(2 (A + C)) * area = 2 * 2 pi / sqrt 3
        assert abs(circumference_bound(Ellipse(1, 1, 1)) - 4 * mpmath.pi / mpmath.sqrt(3)) < 1e-70
        assert abs(circumference_bound(Ellipse(1, 1, 1)) - 7.2552) < 1e-4
        assert circumference_bound(Ellipse(1, 1, 1)) >= perimeter_quadrature(Ellipse(1, 1, 1))


def test_lattice_count_examples():
    assert lattice_count(Ellipse(1, 0, 1), 100) == 317
    assert lattice_count(Ellipse(3, 1, 5), Fraction(1, 10 ** 6)) == 1
    assert lattice_count(Ellipse(1, 0, 4), 25) == brute_count(Ellipse(1, 0, 4), 25, 6)


def test_davenport_examples():
    chk = davenport_check(Ellipse(1, 0, 1), 100)
    assert chk.passed and chk.detail["count"] == 317
    assert abs(chk.lhs - mpmath.mpf("2.8407")) < 1e-4 and abs(chk.rhs - mpmath.mpf("255.33")) < 1e-2
    chk = davenport_check(Ellipse(1, 0, 1), 1)
    assert chk.passed and chk.detail["count"] == 5
    assert davenport_check(Ellipse(10 ** 4, 0, Fraction(1, 10 ** 4)), 1).passed


def test_invalid_ellipse():
    with pytest.raises(ValueError):
        Ellipse(1, 2, 1)


@given(st.integers(1, 30), st.integers(-30, 30), st.integers(1, 30), st.fractions(0, 400, max_denominator=50))
def test_count_matches_brute_force(A, B, C, scale):
    if 4 * A * C - B * B <= 0:
        return
    e = Ellipse(A, B, C)
    r = int(math.isqrt(int(4 * C * scale / (4 * A * C - B * B)) + 1) + 2)
    r = max(r, int(math.isqrt(int(4 * A * scale / (4 * A * C - B * B)) + 1) + 2))
    assert lattice_count(e, scale) == brute_count(e, scale, r)


@given(st.integers(1, 100), st.integers(-100, 100), st.integers(1, 100), st.integers(1, 10 ** 4))
def test_davenport_property(A, B, C, scale):
    if 4 * A * C - B * B <= 0:
        return
    assert davenport_check(Ellipse(A, B, C), scale).passed


@given(st.integers(1, 100), st.integers(-100, 100), st.integers(1, 100))
def test_circumference_dominates_quadrature(A, B, C):
    if 4 * A * C - B * B <= 0:
        return
    e = Ellipse(A, B, C)
    assert circumference_bound(e) >= perimeter_quadrature(e) * (1 - 1e-12)


def test_annulus_examples():
    y_zeta = ZETA.im
    pairs = annulus_pairs(AnnulusSpec(ZETA, y_zeta, Fraction(1, 10 ** 12), 1))
    assert (1, 0) in pairs and (-1, 0) in pairs
    # lambda = 1/2 has no integer solution
    pairs = annulus_pairs(AnnulusSpec(ZETA, 2 * y_zeta, Fraction(1, 10 ** 12), 1))
    assert pairs == []
    for nu in (1, -1):
        spec = AnnulusSpec(ZETA, y_zeta, Fraction(1, 10 ** 6), nu)
        assert len(annulus_pairs(spec)) <= annulus_count_bound(spec)
        spec = AnnulusSpec(ZETA, 10, Fraction(1, 10 ** 6), nu)
        assert len(annulus_pairs(spec)) <= annulus_count_bound(spec)
    with mpmath.workprec(256):
        limit = 32 * mpmath.pi * (mpmath.sqrt(2 * ZETA.im) + mpmath.sqrt(y_zeta)) / mpmath.sqrt(y_zeta)
        tiny = annulus_count_bound(AnnulusSpec(ZETA, y_zeta, Fraction(1, 10 ** 60)))
        assert abs(tiny - limit) < 1e-20
    with pytest.raises(ValueError):
        AnnulusSpec(ZETA, 1, Fraction(1, 10), 0)


def test_matrix_count_bound_examples():
    with mpmath.workprec(256):
        b = matrix_count_bound(ZETA, Fraction(1, 2), ZETA.im, Fraction(1, 10 ** 6))
        ann = annulus_count_bound(AnnulusSpec(ZETA, ZETA.im, Fraction(1, 10 ** 6)))
        assert abs(b - ann * 15) < 1e-60
        assert matrix_count_bound(ZETA, 0, 1, Fraction(1, 100)) == 13 * annulus_count_bound(
            AnnulusSpec(ZETA, 1, Fraction(1, 100)))


def test_bruteforce_examples():
    # the segment passes through both corners; each carries three matrices onto zeta
    assert matrix_count_bruteforce(ZETA, Fraction(1, 2), ZETA.im, Fraction(1, 10 ** 9)) == 6
    # x = 0 probes only i sqrt(3)/2, whose orbit stays away from zeta
    assert matrix_count_bruteforce(ZETA, 0, ZETA.im, Fraction(1, 10 ** 9)) == 0
    n = matrix_count_bruteforce(ZETA, Fraction(1, 2), ZETA.im / 2, Fraction(1, 1000))
    assert n <= matrix_count_bound(ZETA, Fraction(1, 2), ZETA.im / 2, Fraction(1, 1000))
    assert matrix_count_bruteforce(I_POINT, 0, 50, Fraction(1, 100)) == 0
    with pytest.raises(PreconditionError):
        matrix_count_bruteforce(ZETA, 0, 1, 1)
    with pytest.raises(CapTooSmall):
        matrix_count_bruteforce(ZETA, 0, Fraction(1, 10 ** 6), Fraction(1, 100), entry_cap=10)


def test_bruteforce_matches_direct_search():
    # direct check over all matrices with small entries along a sampled segment
    xi, x, y, eps = I_POINT, Fraction(1, 2), Fraction(1, 2), Fraction(1, 10)
    count = matrix_count_bruteforce(xi, x, y, eps)
    found = set()
    with mpmath.workprec(128):
        eps_m = mpmath.mpf(eps.numerator) / eps.denominator
        for a in range(-6, 7):
            for b in range(-6, 7):
                for c in range(0, 7):
                    for d in range(-6, 7):
                        if a * d - b * c != 1 or (c == 0 and a != 1):
                            continue
                        g = UnimodularMatrix(a, b, c, d)
                        for k in range(401):
                            t = -x + 2 * x * Fraction(k, 400)
                            p = apply(g, HPoint(t, y, 128))
                            if (abs(p.re) <= 0.5 and abs(p.value) >= 1
                                    and abs(p.value - xi.value) <= eps_m):
                                found.add((a, b, c, d))
                                break
    assert len(found) <= count <= len(found) + 2


def test_ellipse_lemma_examples():
    near = HPoint(Fraction(1, 2), Fraction(9, 10))
    g = UnimodularMatrix(1, 0, 3, 1)
    tau = apply(g, near)
    assert tau.im < 0.2
    assert all(lattice.ellipse_lemma_check(ZETA, tau, Fraction(1, 10)))
    checks = lattice.ellipse_lemma_check(ZETA, ZETA, Fraction(1, 10 ** 6))
    assert all(checks) and checks[0].lhs < 1e-70
    with pytest.raises(PreconditionError):
        lattice.ellipse_lemma_check(ZETA, HPoint(0, 3), Fraction(1, 10))
    with pytest.raises(ValueError):
        lattice.annulus_pairs(AnnulusSpec(HPoint(mpmath.mpf("0.1"), mpmath.mpf(2)), 1, Fraction(1, 10)))


def test_ellipse_lemma_random():
    rng = random.Random(9)
    xis = [ZETA, I_POINT, HPoint.quadratic(2, -1, 3), HPoint(Fraction(1, 3), 2)]
    done = 0
    while done < 60:
        xi = rng.choice(xis)
        with mpmath.workprec(256):
            eps = lattice.lemma_eps_limit(xi) * rng.random()
            p = xi.value + eps * rng.random() * mpmath.expj(2 * mpmath.pi * rng.random())
            near = HPoint(p.real, p.imag)
        if not (abs(near.re) <= 0.5 and abs(near.value) >= 1):
            continue
        a, c = rng.choice([(1, 5), (2, 7), (3, 4), (5, 8), (1, 0)])
        u, v = lattice._ext_gcd(a, c)[1:]
        tau = apply(UnimodularMatrix(a, -v, c, u).inverse(), near)
        assert all(lattice.ellipse_lemma_check(xi, tau, eps))
        done += 1
