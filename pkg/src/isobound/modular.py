"""The modular invariant j and its derivatives from q-expansions.

j is summed from its integer q-expansion at the reduced point, where
|q| <= exp(-pi sqrt 3) ~ 0.0043. The tail after K terms is bounded with
c(n) <= exp(4 pi sqrt n), valid for every n >= 1 (Brisebarre and
Philibert give the sharper e^{4 pi sqrt n} / (sqrt 2 n^{3/4})).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .errors import PrecisionExhausted
from .halfplane import DEFAULT_PREC, ZETA, ZETA2, HPoint, in_closure, reduce
from .report import Check

GUARD_BITS = 32


def _series_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for k, y in enumerate(b[: n - i]):
                out[i + k] += x * y
    return out


def _sigma(n: int, k: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _coefficients(n_terms: int) -> tuple[int, ...]:
    """c(-1), c(0), ..., c(n_terms - 2) of j = sum c(n) q^n."""
    n = n_terms
    # prod (1 - q^k) from the pentagonal number theorem
    eta = [0] * n
    k = 0
    while True:
        hit = False
        for s in (1, -1) if k else (1,):
            e = k * (3 * k - s) // 2
            if e < n:
                eta[e] += -1 if k % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    e2 = _series_mul(eta, eta, n)
    e4 = _series_mul(e2, e2, n)
    e8 = _series_mul(e4, e4, n)
    e16 = _series_mul(e8, e8, n)
    p = _series_mul(e16, e8, n)                 # prod (1 - q^k)^24
    E4 = [1] + [240 * _sigma(m, 3) for m in range(1, n)]
    num = _series_mul(_series_mul(E4, E4, n), E4, n)
    inv = [0] * n
    inv[0] = 1
    for m in range(1, n):
        inv[m] = -sum(p[i] * inv[m - i] for i in range(1, m + 1))
    return tuple(_series_mul(num, inv, n))


@dataclass(frozen=True)
class QExpansion:
    """Exact integer q-expansion of j: coefficients[k] is c(k - 1)."""

    coefficients: tuple[int, ...]

    @classmethod
    def of_j(cls, n_terms: int) -> "QExpansion":
        size = 64
        while size < n_terms:
            size *= 2
        return cls(_coefficients(size)[:n_terms])

    def coefficient(self, n: int) -> int:
        return self.coefficients[n + 1]

    @staticmethod
    def coefficient_majorant(n: int) -> mpmath.mpf:
        return mpmath.exp(4 * mpmath.pi * mpmath.sqrt(n))

    @staticmethod
    def tail_bound(K: int, r, order: int = 0) -> mpmath.mpf:
        """Bound for sum_{n > K} n^order c(n) r^n, assuming r < 1 makes the ratio < 1."""
        n = K + 1
        ratio = (1 + mpmath.mpf(1) / n) ** order * mpmath.exp(
            4 * mpmath.pi * (mpmath.sqrt(n + 1) - mpmath.sqrt(n))) * r
        if ratio >= 1:
            return mpmath.inf
        first = mpmath.mpf(n) ** order * mpmath.exp(4 * mpmath.pi * mpmath.sqrt(n)) * r ** n
        return first / (1 - ratio)


def _terms_needed(r, bits: int, order: int) -> int:
    K = 8
    target = mpmath.ldexp(1, -bits)
    while QExpansion.tail_bound(K, r, order) > target:
        K = int(K * 1.25) + 1
    return K


def _series(w: mpmath.mpc, work: int, order: int):
    """sum n^order c(n) q^n at the reduced point w, with an absolute error bound."""
    with mpmath.workprec(work):
        q = mpmath.exp(2j * mpmath.pi * w)
        r = abs(q)
        with mpmath.workprec(64):
            K = _terms_needed(mpmath.mpf(r), work, order)
        coeffs = QExpansion.of_j(K + 2).coefficients
        acc = mpmath.mpc(0)
        for idx in range(len(coeffs) - 1, -1, -1):
            n = idx - 1
            acc = acc * q + coeffs[idx] * n ** order
        value = acc / q
    with mpmath.workprec(64):
        rr = mpmath.mpf(r)
        s_abs = sum(abs(c) * abs(i - 1) ** order * rr ** (i - 1) for i, c in enumerate(coeffs))
        s1_abs = sum(abs(c) * abs(i - 1) ** (order + 1) * rr ** (i - 1) for i, c in enumerate(coeffs))
        u = mpmath.ldexp(1, -work)
        err = (8 * (K + 3) * s_abs + (8 + 2 * mpmath.pi * abs(w)) * s1_abs) * u
        err += QExpansion.tail_bound(K, rr, order)
    return value, err, s_abs


def _evaluate(tau: HPoint, order: int, prec: int, require_relative: bool):
    """Series value at the canonical reduced point, boosting precision on cancellation."""
    point, g = reduce(tau.with_prec(prec + GUARD_BITS))
    work = prec + GUARD_BITS
    cap = 4 * prec + 64
    while True:
        pt = point.with_prec(work)
        value, err, _ = _series(pt.value, work, order)
        with mpmath.workprec(64):
            size = abs(value)
            if err <= mpmath.ldexp(size, -prec - 4):
                return value, err, point, g
            if work >= cap:
                if require_relative:
                    raise PrecisionExhausted(
                        f"cancellation near a zero of j exceeds the {cap}-bit budget")
                return value, err, point, g
            need = 16 if size == 0 else int(mpmath.log(err / size, 2)) + prec + 24
            work = min(cap, work + max(need, 16))


def j_eval_with_error(tau: HPoint, prec: int | None = None, require_relative: bool = False):
    """j(tau) and an absolute error bound for it."""
    prec = tau.prec if prec is None else prec
    value, err, _, _ = _evaluate(tau, 0, prec, require_relative)
    with mpmath.workprec(prec):
        return +value, err


def j_eval(tau: HPoint, prec: int | None = None, require_relative: bool = False) -> mpmath.mpc:
    """j(tau) to relative accuracy 2^-prec away from the zeros of j.

    Near zeta the working precision is raised until the relative target is
    met, up to 4 prec + 64 bits; beyond that the value is returned with its
    absolute accuracy unless ``require_relative`` asks for an error.
    """
    return j_eval_with_error(tau, prec, require_relative)[0]


def j_derivative(tau: HPoint, order: int = 1, prec: int | None = None) -> mpmath.mpc:
    """d^k j / d tau^k for k in {1, 2}, using dj/dtau = 2 pi i q dj/dq."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    prec = tau.prec if prec is None else prec
    work = prec + GUARD_BITS
    point, g = reduce(tau.with_prec(work))
    with mpmath.workprec(work):
        w = point.value
        tpi = 2j * mpmath.pi
        d1 = tpi * _series(w, work, 1)[0]
        if order == 2:
            d2 = tpi ** 2 * _series(w, work, 2)[0]
        # chain rule through w = g tau: dw/dtau = u^-2, d2w/dtau2 = -2c u^-3
        u = g.c * tau.with_prec(work).value + g.d
        if order == 1:
            out = d1 / u ** 2
        else:
            out = d2 / u ** 4 - 2 * g.c * d1 / u ** 3
    with mpmath.workprec(prec):
        return +out


def eisenstein(k: int, tau_value: mpmath.mpc, prec: int) -> mpmath.mpc:
    """Normalised E4 or E6 at a point with Im tau >= 0.8 (series in q)."""
    lead = {4: 240, 6: -504}[k]
    with mpmath.workprec(prec + GUARD_BITS):
        q = mpmath.exp(2j * mpmath.pi * tau_value)
        r = abs(q)
        if r > 0.01:
            raise ValueError("point too far from the reduced region for the q-series")
        target = mpmath.ldexp(1, -prec - GUARD_BITS)
        total = mpmath.mpc(1)
        qn = mpmath.mpc(1)
        n = 0
        while True:
            n += 1
            qn *= q
            total += lead * _sigma(n, k - 1) * qn
            # sigma_{k-1}(n) <= 2 n^{k-1}; geometric tail with ratio <= 2^{k-1} r
            tail = 2 * abs(lead) * (n + 1) ** (k - 1) * r ** (n + 1) / (1 - 2 ** (k - 1) * r)
            if tail < target:
                break
    with mpmath.workprec(prec):
        return +total


def jbound_check(tau: HPoint) -> Check:
    """Cubic bracket for |j| near the nearer corner, lower bound elsewhere.

    For tau in the closed domain within 1e-3 of zeta (zeta^2 on the left half)
    44000 |tau - zeta|^3 <= |j(tau)| <= 47000 |tau - zeta|^3; otherwise
    |j(tau)| >= 4.4e-5.
    """
    if not in_closure(tau):
        raise ValueError("jbound_check expects a point of the closed fundamental domain")
    corner = ZETA if tau.re >= 0 else ZETA2
    with mpmath.workprec(tau.prec):
        dist = abs(tau.value - corner.with_prec(tau.prec).value)
    if dist > mpmath.mpf("1e-3"):
        value = abs(j_eval(tau))
        return Check("jbound_far", value >= mpmath.mpf("4.4e-5"), value, mpmath.mpf("4.4e-5"),
                     {"distance": dist})
    need = max(tau.prec, int(3 * abs(mpmath.log(dist, 2))) + 64 if dist > 0 else tau.prec)
    value = abs(j_eval(tau.with_prec(need), require_relative=dist > 0))
    with mpmath.workprec(need):
        lo, hi = 44000 * dist ** 3, 47000 * dist ** 3
        return Check("jbound_cubic", lo <= value <= hi, value, (lo, hi),
                     {"distance": dist, "ratio": value / dist ** 3 if dist else mpmath.nan})
