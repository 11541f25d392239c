import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from isobound import arith
from isobound.verify import _sieve_tables


def test_small_values():
    assert [f(1) for f in (arith.sigma0, arith.sigma1, arith.euler_phi, arith.dedekind_psi, arith.omega)] == [1, 1, 1, 1, 0]
    assert [f(12) for f in (arith.sigma0, arith.sigma1, arith.euler_phi, arith.dedekind_psi, arith.omega)] == [6, 28, 4, 24, 2]
    assert arith.dedekind_psi(2) == 3 and arith.euler_phi(2) == 1


def test_mertens_examples():
    with mpmath.workprec(128):
        assert abs(arith.mertens_sum(4) - mpmath.log(2) / 2) < 1e-30
        m30 = arith.mertens_sum(30)
        assert abs(m30 - (mpmath.log(2) / 2 + mpmath.log(3) / 3 + mpmath.log(5) / 5)) < 1e-30
        assert abs(m30 - mpmath.mpf("1.0347")) < 1e-4
        assert m30 <= mpmath.mpf("5.25") * mpmath.log(mpmath.log(30))
        assert abs(arith.mertens_sum(2) - mpmath.log(2) / 2) < 1e-30


def test_lambda_examples():
    with mpmath.workprec(128):
        assert abs(arith.lambda_autissier(2) - mpmath.log(2) / 3) < 1e-30
        assert abs(arith.lambda_autissier(4) - mpmath.log(2) / 2) < 1e-30
        assert abs(arith.lambda_autissier(6) - mpmath.log(2) / 3 - mpmath.log(3) / 4) < 1e-30


def test_group_orders():
    assert (arith.gl2_order(2), arith.triangular_order(2)) == (6, 2)
    assert (arith.gl2_order(1), arith.triangular_order(1)) == (1, 1)
    assert (arith.gl2_order(12), arith.triangular_order(12)) == (4608, 192)
    for N in range(1, 9):
        assert arith.gl2_order_bruteforce(N) == arith.gl2_order(N)
        assert arith.triangular_order_bruteforce(N) == arith.triangular_order(N)


def test_census_examples():
    for N, count in ((1, 1), (2, 3), (12, 24)):
        rep = arith.cyclic_subgroup_census(N)
        assert rep.count == count == arith.dedekind_psi(N) and rep.transitive
    with pytest.raises(ValueError):
        arith.cyclic_subgroup_census(arith.CENSUS_CAP + 1)


def test_orbit_bound_examples():
    assert arith.serre_orbit_lower_bound(12, 1).bound == 24
    ob = arith.serre_orbit_lower_bound(1, 4)
    assert ob.bound == 1 and ob.ratio == mpmath.mpf(1) / 4
    assert arith.serre_orbit_lower_bound(10, 3).bound == 6


def test_factorize_large_and_invalid():
    n = (2 ** 61 - 1) * (2 ** 31 - 1) * 3 ** 4
    assert arith.factorize(n) == {3: 4, 2 ** 31 - 1: 1, 2 ** 61 - 1: 1}
    assert arith.is_probable_prime(2 ** 89 - 1) and not arith.is_probable_prime(2 ** 89 + 1)
    with pytest.raises(ValueError):
        arith.factorize(0)


@given(st.integers(1, 10 ** 12))
def test_factorize_round_trip(n):
    f = arith.factorize(n)
    assert math.prod(p ** a for p, a in f.items()) == n
    assert all(arith.is_probable_prime(p) for p in f)


@given(st.integers(1, 10 ** 6), st.integers(1, 10 ** 6))
def test_multiplicativity(m, n):
    if math.gcd(m, n) != 1:
        return
    for f in (arith.sigma0, arith.sigma1, arith.euler_phi, arith.dedekind_psi):
        assert f(m * n) == f(m) * f(n)


def test_functions_match_sieve():
    tables = _sieve_tables(3000)
    for N in range(1, 3001):
        got = (arith.sigma0(N), arith.sigma1(N), arith.euler_phi(N), arith.dedekind_psi(N), arith.omega(N))
        assert got == tuple(t[N] for t in tables)


@given(st.integers(1, 10 ** 9))
def test_sigma1_vs_psi(N):
    with mpmath.workprec(64):
        assert arith.sigma1(N) <= mpmath.pi ** 2 / 6 * arith.dedekind_psi(N)


@given(st.integers(4, 10 ** 12))
def test_mertens_lemma(n):
    with mpmath.workprec(64):
        assert arith.mertens_sum(n) <= mpmath.mpf("5.25") * mpmath.log(mpmath.log(n))


@given(st.integers(1, 10 ** 9))
def test_lambda_majorant(N):
    with mpmath.workprec(64):
        rhs = mpmath.fsum(4 * mpmath.log(p) / (3 * p) for p in arith.factorize(N))
        assert arith.lambda_autissier(N) <= rhs + mpmath.ldexp(1, -50)
