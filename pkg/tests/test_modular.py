import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from isobound import modular
from isobound.errors import PrecisionExhausted
from isobound.halfplane import I_POINT, ZETA, ZETA2, HPoint, UnimodularMatrix, apply
from isobound.modular import QExpansion, eisenstein, j_derivative, j_eval, jbound_check
from isobound.verify import corner_grid, far_grid

from test_halfplane import sl2

TOL200 = mpmath.ldexp(1, -200)


def test_q_expansion_coefficients():
    q = QExpansion.of_j(6)
    assert [q.coefficient(n) for n in range(-1, 4)] == [1, 744, 196884, 21493760, 864299970]


def test_special_values():
    with mpmath.workprec(256):
        assert abs(j_eval(I_POINT) - 1728) <= TOL200
        assert abs(j_eval(ZETA)) <= TOL200
        assert abs(j_eval(ZETA2)) <= TOL200


def test_value_high_in_the_cusp():
    with mpmath.workprec(256):
        v = j_eval(HPoint(0, 5))
        lead = mpmath.exp(10 * mpmath.pi) + 744
        assert abs(v - lead) < 196884 * mpmath.exp(-10 * mpmath.pi) * 1.01
        assert abs(v.imag) < mpmath.mpf(10) ** -60


def test_error_bound_is_reported():
    value, err = modular.j_eval_with_error(HPoint(Fraction(1, 7), Fraction(11, 10)))
    assert err < mpmath.ldexp(abs(value), -250)


def test_derivative_vanishes_at_elliptic_points():
    with mpmath.workprec(256):
        assert abs(j_derivative(I_POINT, 1)) < mpmath.ldexp(1, -190)
        assert abs(j_derivative(ZETA, 1)) < mpmath.ldexp(1, -190)
        assert abs(j_derivative(ZETA, 2)) < mpmath.ldexp(1, -180)
        assert abs(j_derivative(I_POINT, 2)) > 1


def test_derivative_at_2i_against_difference():
    with mpmath.workprec(256):
        h = mpmath.mpf(10) ** -20
        fd = (j_eval(HPoint(h, 2)) - j_eval(HPoint(-h, 2))) / (2 * h)
        d = j_derivative(HPoint(0, 2), 1)
        assert abs(d - fd) / abs(d) < mpmath.mpf(10) ** -30


def test_derivative_transforms_with_weight_two():
    g = UnimodularMatrix(2, 1, 1, 1)
    tau = HPoint(Fraction(1, 5), Fraction(6, 5))
    with mpmath.workprec(256):
        u = g.c * tau.value + g.d
        lhs = j_derivative(apply(g, tau), 1)
        assert abs(lhs * u ** -2 - j_derivative(tau, 1)) / abs(lhs) < mpmath.ldexp(1, -200)


def test_derivative_order_validated():
    with pytest.raises(ValueError):
        j_derivative(I_POINT, 3)


def test_eisenstein_identity():
    # E4^3 - E6^2 = 1728 eta^24, and j = E4^3 / eta^24
    tau = HPoint(Fraction(1, 4), Fraction(3, 2))
    with mpmath.workprec(256):
        e4, e6 = eisenstein(4, tau.value, 256), eisenstein(6, tau.value, 256)
        j = j_eval(tau)
        assert abs(1728 * e4 ** 3 / (e4 ** 3 - e6 ** 2) - j) / abs(j) < mpmath.ldexp(1, -200)


@given(st.fractions(-20, 20, max_denominator=50), st.fractions(Fraction(1, 20), 3, max_denominator=50),
       sl2(cap=100))
def test_invariance_exact(x, y, g):
    tau = HPoint(x, y)
    with mpmath.workprec(256):
        a, b = j_eval(tau), j_eval(apply(g, tau))
        assert abs(a - b) <= mpmath.ldexp(1, 16 - 256) * max(1, abs(a))


@given(st.fractions(-20, 20, max_denominator=50), st.fractions(Fraction(1, 20), 3, max_denominator=50))
def test_schwarz_reflection(x, y):
    tau = HPoint(x, y)
    with mpmath.workprec(256):
        a, b = j_eval(tau.conj_reflect()), mpmath.conj(j_eval(tau))
        assert abs(a - b) <= mpmath.ldexp(1, -240) * max(1, abs(b))


def test_jbound_examples():
    with mpmath.workprec(256):
        r = mpmath.mpf("5e-4")
        inside_plus = ZETA.value + r * mpmath.expj(2 * mpmath.pi / 3)
        inside_minus = ZETA2.value + r * mpmath.expj(mpmath.pi / 3)
    chk = jbound_check(HPoint(inside_plus.real, inside_plus.imag))
    assert chk.name == "jbound_cubic" and chk.passed
    chk = jbound_check(HPoint(inside_minus.real, inside_minus.imag))
    assert chk.name == "jbound_cubic" and chk.passed
    chk = jbound_check(I_POINT)
    assert chk.name == "jbound_far" and chk.passed
    assert abs(chk.lhs - 1728) < 1e-50


def test_jbound_needs_closure():
    with pytest.raises(ValueError):
        jbound_check(HPoint(2, 1))


def test_jbound_cubic_ratio_near_corner():
    # |j| ~ |j'''(zeta)/6| |tau - zeta|^3 with ratio near 45671
    for corner in (ZETA, ZETA2):
        for pt in corner_grid(corner, 6, 3, 256):
            chk = jbound_check(pt)
            assert chk.passed
            assert 45000 < chk.detail["ratio"] < 46500


def test_jbound_far_grid_sample():
    for pt in far_grid(12, 12, 256):
        assert jbound_check(pt).passed


def test_precision_exhaustion_reported():
    # |j| ~ |tau - zeta|^3 = 2^-900 needs far more than the 4 * 64 + 64 bit budget
    pt = HPoint.from_shadow(Fraction(1, 2), Fraction(3, 4) + Fraction(1, 2 ** 300), 64)
    with pytest.raises(PrecisionExhausted):
        j_eval(pt, require_relative=True)


def test_float_invariance_sample():
    rng = random.Random(2)
    for _ in range(10):
        with mpmath.workprec(256):
            tau = HPoint(mpmath.mpf(rng.uniform(-0.5, 0.5)), mpmath.mpf(rng.uniform(1, 2)))
            g = UnimodularMatrix(7, 3, 2, 1)
            a, b = j_eval(tau), j_eval(apply(g, tau))
            assert abs(a - b) / abs(a) < mpmath.ldexp(1, 40 - 256) * 49
