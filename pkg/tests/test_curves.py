import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from isobound import curves
from isobound.curves import (CurveOverQ, c_constant, cm_point, curve_height, j_invariant,
                             max_conjugate_abs, pen, periods, reduced_forms, tau_height_check)
from isobound.errors import PreconditionError
from isobound.halfplane import I_POINT, ZETA, HPoint, UnimodularMatrix, apply, in_closure
from isobound.heights import height
from isobound.modular import j_derivative, j_eval


def test_j_invariant_examples():
    assert j_invariant(4, 0) == 1728
    assert j_invariant(0, 4) == 0
    assert j_invariant(8, 4) == Fraction(55296, 5)
    with pytest.raises(ValueError):
        j_invariant(3, 1)
    with pytest.raises(ValueError):
        CurveOverQ(3, 1)
    E = CurveOverQ(Fraction(1, 2), Fraction(1, 3))
    assert E.discriminant == 16 * (Fraction(1, 8) - 3) and E.j0 == Fraction(-1728, 23)


def test_period_examples():
    with mpmath.workprec(256):
        P = periods(CurveOverQ(4, 0))
        assert P.tau0 == I_POINT or abs(P.tau0.value - 1j) < 1e-70
        lemniscate = mpmath.gamma(mpmath.mpf(1) / 4) ** 2 / (2 * mpmath.sqrt(2 * mpmath.pi))
        assert abs(abs(P.omega1) - lemniscate) < 1e-70
        assert abs(j_eval(P.tau0) - 1728) < 1e-60
        Q = periods(CurveOverQ(0, 4))
        assert abs(Q.tau0.value - ZETA.value) < 1e-70
        assert abs(j_eval(Q.tau0)) < 1e-60
        assert P.omega_max >= 1


def test_period_round_trip_random():
    rng = random.Random(5)
    for _ in range(12):
        g2 = Fraction(rng.randint(-60, 60), rng.randint(1, 12))
        g3 = Fraction(rng.randint(-60, 60), rng.randint(1, 12))
        if g2 ** 3 == 27 * g3 ** 2:
            continue
        E = CurveOverQ(g2, g3)
        P = periods(E)
        with mpmath.workprec(256):
            assert in_closure(P.tau0)
            j0 = mpmath.mpf(E.j0.numerator) / E.j0.denominator
            assert abs(j_eval(P.tau0.with_prec(256)) - j0) <= mpmath.ldexp(1, -200) * max(1, abs(j0))
            assert abs(P.g2_check - mpmath.mpf(g2.numerator) / g2.denominator) <= mpmath.ldexp(1, -216) * max(1, abs(g2))


def test_curve_height_examples():
    with mpmath.workprec(128):
        assert abs(curve_height(CurveOverQ(4, 0)) - mpmath.log(1728)) < 1e-30
        assert abs(curve_height(CurveOverQ(0, 4)) - mpmath.log(4)) < 1e-30
        # (1 : 1/2 : 1/3) clears to (6 : 3 : 2); j0 = -1728/23 dominates
        E = CurveOverQ(Fraction(1, 2), Fraction(1, 3))
        assert abs(curve_height(E) - max(mpmath.log(6), mpmath.log(1728))) < 1e-30
        assert abs(curve_height(CurveOverQ(Fraction(1, 2), Fraction(1, 3), cm_flag=True)) - curve_height(E)) == 0
        # (1 : 0 : 1) with j0 = 0 only sees the floor
        assert curve_height(CurveOverQ(0, 1)) == 1
        assert abs(curve_height(CurveOverQ(Fraction(-1, 50), Fraction(1, 90))) - max(
            1, mpmath.log(450), height(CurveOverQ(Fraction(-1, 50), Fraction(1, 90)).j0))) < 1e-30


def test_tau_height_examples():
    with mpmath.workprec(256):
        chk = tau_height_check(periods(CurveOverQ(4, 0)), 1, mpmath.log(1728))
        assert chk.passed and abs(chk.rhs - 3 * mpmath.log(1728)) < 1e-60
    synthetic = curves.Periods(1, 10j, HPoint(0, 10), 0, 0)
    assert not tau_height_check(synthetic, 1, 2).passed
    zeta = curves.Periods(1, ZETA.value, ZETA, 0, 0)
    chk = tau_height_check(zeta, 2, 0)
    assert chk.passed and abs(chk.lhs - mpmath.mpf(1) / 2) < 1e-60
    with pytest.raises(ValueError):
        tau_height_check(zeta, 0, 1)


def test_cm_point_examples():
    assert cm_point(1, 0, 1).point == I_POINT and cm_point(1, 0, 1).disc == -4
    assert cm_point(1, -1, 1).point == ZETA and cm_point(1, -1, 1).disc == -3
    xi = cm_point(1, 0, 2)
    assert xi.point == HPoint.from_shadow(Fraction(0), Fraction(2)) and xi.disc == -8
    # non-reduced input moves to its reduced representative
    assert cm_point(2, 2, 3).form == (2, -2, 3) and cm_point(5, 0, 1).form == (1, 0, 5)
    assert cm_point(2, 0, 2).form == (1, 0, 1)
    with pytest.raises(ValueError):
        cm_point(1, 2, 1)
    with pytest.raises(ValueError):
        cm_point(-1, 0, -1)


def test_reduced_forms_examples():
    assert reduced_forms(-4) == [(1, 0, 1)]
    assert reduced_forms(-3) == [(1, -1, 1)]
    assert reduced_forms(-20) == [(1, 0, 5), (2, -2, 3)]
    assert reduced_forms(-23) == [(1, -1, 6), (2, -1, 3), (2, 1, 3)]
    assert len(reduced_forms(-83)) == 3
    class_one = [d for d in range(-200, 0) if d % 4 in (0, 1) and len(reduced_forms(d)) == 1]
    assert class_one == [-163, -67, -43, -28, -27, -19, -16, -12, -11, -8, -7, -4, -3]
    assert len(class_one) == len(curves.CM_J_INVARIANTS)
    with pytest.raises(ValueError):
        reduced_forms(-5)


@given(st.integers(3, 3000))
def test_reduced_forms_give_reduced_points(n):
    disc = -n
    if disc % 4 not in (0, 1):
        return
    for f in reduced_forms(disc):
        p = HPoint.quadratic(*f)
        assert in_closure(p)
        assert cm_point(*f).form == f


def test_cm_height_bound():
    for disc in range(-400, -2):
        if disc % 4 not in (0, 1):
            continue
        for f in reduced_forms(disc):
            ok, h, rhs = cm_point(*f).height_bound_check()
            assert ok


def test_c_constant_branches():
    with mpmath.workprec(256):
        ci = c_constant(cm_point(1, 0, 1))
        assert ci.branch == "i" and not ci.degenerate
        assert abs(ci.A - abs(j_derivative(I_POINT, 2))) < 1e-50
        fd = (j_eval(HPoint(0, 1 + mpmath.mpf(10) ** -20)) - 2 * 1728 + j_eval(HPoint(0, 1 - mpmath.mpf(10) ** -20))) / mpmath.mpf(10) ** -40
        assert abs(abs(fd) - ci.A) / ci.A < 1e-15
        assert abs(ci.value - ci.A * ci.delta ** 2 / 4) < 1e-60
        assert abs(ci.value - mpmath.mpf("5.4925052e-9")) < 1e-15
        cb = c_constant(cm_point(1, -1, 2))
        assert cb.branch == "boundary" and abs(cb.value - cb.A * cb.delta / 2) < 1e-60
        cint = c_constant(cm_point(2, -1, 3))
        assert cint.branch == "interior"
        assert cint.value == min(abs(j_eval(cm_point(2, -1, 3).point).imag), cint.A * cint.delta / 2)
        assert c_constant(cm_point(1, 0, 2)).branch == "boundary"
        with pytest.raises(PreconditionError):
            c_constant(cm_point(1, -1, 1))


def test_c_constant_degenerate_flag():
    # off the symmetry lines j is not real, so the interior branch stays positive
    cc = c_constant(HPoint(Fraction(1, 4), 3))
    assert cc.branch == "interior" and not cc.degenerate and cc.value > 0
    assert pen(-23) < mpmath.inf


def test_pen_examples():
    with mpmath.workprec(128):
        assert abs(pen(-4) - mpmath.mpf("19.0198813621811")) < 1e-12
        assert abs(pen(-4) + mpmath.log(c_constant(cm_point(1, 0, 1)).value)) < 1e-30
        assert abs(pen(-20) - mpmath.mpf("7.11055679")) < 1e-7
        both = [c_constant(HPoint.quadratic(*f)).value for f in reduced_forms(-20)]
        assert abs(pen(-20) - mpmath.log(max(1 / v for v in both))) < 1e-30
    with pytest.raises(PreconditionError):
        pen(-3)


def test_max_conjugate_abs():
    with mpmath.workprec(128):
        assert abs(max_conjugate_abs(-20) - mpmath.sqrt(5)) < 1e-30
        assert abs(max_conjugate_abs(-4) - 1) < 1e-30


@settings(max_examples=15)
@given(st.sampled_from([(1, 0, 1), (1, -1, 2), (2, -1, 3), (1, 0, 5), (3, -1, 5)]),
       st.sampled_from([(1, 1, 0, 1), (0, -1, 1, 0), (2, 1, 1, 1), (3, 2, 4, 3)]))
def test_c_constant_stabiliser_invariance(form, g):
    A, B, C = form
    a, b, c, d = g
    # the form transformed by g^-1 has root g(xi)
    moved = (A * d * d - B * c * d + C * c * c, -2 * A * b * d + B * (a * d + b * c) - 2 * C * a * c,
             A * b * b - B * a * b + C * a * a)
    if moved[0] < 0:
        moved = tuple(-v for v in moved)
    assert apply(UnimodularMatrix(a, b, c, d), HPoint.quadratic(*form)) == HPoint.quadratic(*moved)
    first, second = c_constant(cm_point(*form)), c_constant(cm_point(*moved))
    assert cm_point(*moved).form == cm_point(*form).form
    assert first.value == second.value
