"""Multiplicative functions, group orders and the cyclic-subgroup census.

Factorisation is trial division up to 10^6 followed by Pollard-Brent rho,
with Miller-Rabin on the 13 smallest prime bases (deterministic below
3.3e24) and 64 rounds above that.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import mpmath


TRIAL_LIMIT = 10 ** 6
CENSUS_CAP = 60
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC = 3317044064679887385961981


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, v in enumerate(sieve) if v]


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(_small_primes(TRIAL_LIMIT))


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC:
        bases = _MR_BASES
    else:
        rng = random.Random(n)
        bases = _MR_BASES + tuple(rng.randrange(2, n - 1) for _ in range(64))
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation {p: exponent} of a positive integer."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        f = _pollard_brent(m)
        stack.extend((f, m // f))
    return dict(sorted(out.items()))


def sigma0(n: int) -> int:
    return math.prod(e + 1 for e in factorize(n).values())


def sigma1(n: int) -> int:
    return math.prod((p ** (e + 1) - 1) // (p - 1) for p, e in factorize(n).items())


def euler_phi(n: int) -> int:
    return math.prod(p ** (e - 1) * (p - 1) for p, e in factorize(n).items())


def dedekind_psi(n: int) -> int:
    """n prod_{p | n} (1 + 1/p): the number of cyclic subgroups of order n in (Z/n)^2."""
    return math.prod(p ** (e - 1) * (p + 1) for p, e in factorize(n).items())


def omega(n: int) -> int:
    return len(factorize(n))


def mertens_sum(n: int) -> mpmath.mpf:
    """sum over primes p | n of log(p) / p."""
    return mpmath.fsum(mpmath.log(p) / p for p in factorize(n))


def lambda_autissier(N: int) -> mpmath.mpf:
    """sum_{p^a || N} (p^a - 1) / ((p^2 - 1) p^(a-1)) log p."""
    return mpmath.fsum(mpmath.mpf(p ** a - 1) / ((p * p - 1) * p ** (a - 1)) * mpmath.log(p)
                       for p, a in factorize(N).items())


def gl2_order(N: int) -> int:
    """|GL2(Z/N)| = phi(N)^2 psi(N) N."""
    return euler_phi(N) ** 2 * dedekind_psi(N) * N


def triangular_order(N: int) -> int:
    """Upper-triangular invertible matrices mod N: N phi(N)^2."""
    return N * euler_phi(N) ** 2


def _generated(v: tuple[int, int], N: int) -> frozenset:
    return frozenset(((k * v[0]) % N, (k * v[1]) % N) for k in range(N))


def _cyclic_subgroups(N: int) -> set[frozenset]:
    subs = set()
    for x in range(N):
        for y in range(N):
            if math.gcd(math.gcd(x, y), N) == 1:
                subs.add(_generated((x, y), N))
    return subs


def _gl2_generators(N: int) -> list[tuple[int, int, int, int]]:
    # elementary matrices generate SL2(Z/N); diagonal units add every determinant
    gens = [(1, 1, 0, 1), (1, 0, 1, 1)]
    gens += [(u, 0, 0, 1) for u in range(1, N) if math.gcd(u, N) == 1 and u != 1]
    return gens


@dataclass(frozen=True)
class CensusReport:
    N: int
    count: int
    psi: int
    orbit_size: int
    transitive: bool

    @property
    def passed(self) -> bool:
        return self.count == self.psi and self.transitive

    def to_dict(self) -> dict:
        return {"N": self.N, "count": self.count, "psi": self.psi,
                "orbit_size": self.orbit_size, "transitive": self.transitive,
                "passed": self.passed}


def cyclic_subgroup_census(N: int) -> CensusReport:
    """Enumerate cyclic order-N subgroups of (Z/N)^2 and test transitivity.

    Transitivity is the closure of the orbit of <(1, 0)> under generators
    of GL2(Z/N) acting on column vectors.
    """
    if not 1 <= N <= CENSUS_CAP:
        raise ValueError(f"census is limited to 1 <= N <= {CENSUS_CAP}")
    subs = _cyclic_subgroups(N)
    gens = _gl2_generators(N)
    start = _generated((1 % N, 0), N)
    seen = {start}
    frontier = [start]
    while frontier:
        sub = frontier.pop()
        v = min(w for w in sub if math.gcd(math.gcd(*w), N) == 1)
        for a, b, c, d in gens:
            image = _generated(((a * v[0] + b * v[1]) % N, (c * v[0] + d * v[1]) % N), N)
            if image not in seen:
                seen.add(image)
                frontier.append(image)
    return CensusReport(N, len(subs), dedekind_psi(N), len(seen), seen == subs)


class OrbitBound(NamedTuple):
    bound: mpmath.mpf
    ratio: mpmath.mpf


def serre_orbit_lower_bound(N: int, index) -> OrbitBound:
    """Orbit size of a cyclic subgroup under an image of index ``index``.

    The orbit has at least psi(N)/index elements; ``bound`` is max(1, ratio)
    and ``ratio`` the raw quotient.
    """
    ratio = mpmath.mpf(dedekind_psi(N)) / index
    return OrbitBound(max(mpmath.mpf(1), ratio), ratio)


def gl2_order_bruteforce(N: int) -> int:
    """Count invertible 2x2 matrices mod N by enumeration."""
    units = [u for u in range(N) if math.gcd(u, N) == 1]
    unit_set = set(units)
    count = 0
    for a in range(N):
        for d in range(N):
            ad = a * d
            for b in range(N):
                for c in range(N):
                    if (ad - b * c) % N in unit_set:
                        count += 1
    return count if N > 1 else 1


def triangular_order_bruteforce(N: int) -> int:
    """Count invertible upper-triangular matrices mod N by enumeration."""
    if N == 1:
        return 1
    return sum(1 for a in range(N) for b in range(N) for d in range(N) if math.gcd(a * d, N) == 1)
