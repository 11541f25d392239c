"""Explicit constants and bounds for the degree of a minimal isogeny.

Numbers here reach exp(exp(10^21483)), so they are carried as LogValue:
level 0 stores x itself (|x| < 2^62), level 1 stores log|x| and level 2
stores log log|x| (used once log log|x| >= 2^62 or log|x| is itself out of
mpf reach). Working precision grows with the magnitude so that sums such as
10^21483 + 2.4e10 log 2 stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .arith import lambda_autissier
from .errors import PreconditionError
from .report import Check, render

BASE_PREC = 256
PREC_CAP = 1 << 17
LEVEL_LIMIT = mpmath.mpf(2) ** 62

LOMBARDO_LOG_GAMMA1 = 10 ** 21483          # gamma_1 = exp(10^21483)
LOMBARDO_GAMMA2 = 24 * 10 ** 9             # gamma_2 = 2.4e10


class LevelOverflow(OverflowError):
    """A LogValue is too large for an operation that needs a plain real."""


def _bits(m) -> int:
    if not m or not mpmath.isfinite(m):
        return 0
    return max(0, int(mpmath.mag(m)))


def _wp(*mags) -> int:
    return BASE_PREC + min(PREC_CAP, max([0] + [_bits(m) for m in mags]))


def working_prec(*mags) -> int:
    """Bits needed to hold the given magnitudes to BASE_PREC relative accuracy."""
    return _wp(*mags)


def _ln_limit():
    return 62 * mpmath.ln2


@dataclass(frozen=True)
class LogValue:
    sign: int
    level: int
    mag: mpmath.mpf = field(compare=False)

    # --- construction -------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0, 0, mpmath.mpf(0))

    @classmethod
    def of(cls, x) -> "LogValue":
        """Any int, Fraction, float, mpf or LogValue."""
        if isinstance(x, LogValue):
            return x
        if isinstance(x, int):
            with mpmath.workprec(BASE_PREC + x.bit_length()):
                if abs(x) < 2 ** 62:
                    return cls._level0(mpmath.mpf(x))
                with mpmath.workprec(BASE_PREC + x.bit_length().bit_length()):
                    return cls(1 if x > 0 else -1, 1, mpmath.log(abs(x)))
        if isinstance(x, Fraction):
            with mpmath.workprec(BASE_PREC + abs(x.numerator.bit_length() - x.denominator.bit_length())):
                return cls.of(mpmath.mpf(x.numerator) / x.denominator)
        x = mpmath.mpf(x)
        if abs(x) < LEVEL_LIMIT:
            return cls._level0(x)
        with mpmath.workprec(_wp(x)):
            return cls(1 if x > 0 else -1, 1, mpmath.log(abs(x)))

    @classmethod
    def _level0(cls, x) -> "LogValue":
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, 0, abs(x))

    @classmethod
    def from_log(cls, L, sign: int = 1) -> "LogValue":
        """sign * exp(L) for L an mpf or LogValue."""
        if isinstance(L, LogValue):
            if L.level == 0 or L.sign <= 0:
                return cls.from_log(L.sign * L.mag, sign) if L.level == 0 else cls.zero()
            if L.level == 1:
                if L.mag < LEVEL_LIMIT:
                    with mpmath.workprec(BASE_PREC + min(PREC_CAP, int(L.mag * 1.4427) + 1)):
                        return cls(sign, 1, mpmath.exp(L.mag))
                return cls(sign, 2, L.mag)
            raise LevelOverflow("exp of a level-2 value")
        with mpmath.workprec(_wp(L)):
            L = mpmath.mpf(L)
            if L < _ln_limit():
                v = mpmath.exp(L)
                return cls(sign, 0, v) if v else cls.zero()
            return cls(sign, 1, +L)

    @classmethod
    def from_loglog(cls, LL) -> "LogValue":
        """exp(exp(LL))."""
        with mpmath.workprec(_wp(LL)):
            LL = mpmath.mpf(LL)
            if LL < LEVEL_LIMIT:
                return cls.from_log(cls.from_log(LL))
            return cls(1, 2, +LL)

    # --- conversions --------------------------------------------------------

    def to_mpf(self) -> mpmath.mpf:
        if self.sign == 0:
            return mpmath.mpf(0)
        if self.level == 0:
            return self.sign * self.mag
        if self.level == 1 and self.mag < 2 ** 40:
            with mpmath.workprec(_wp(self.mag * 2)):
                return self.sign * mpmath.exp(self.mag)
        raise LevelOverflow(f"level-{self.level} value has no plain real form")

    def ln_mpf(self) -> mpmath.mpf:
        """log|x| as an mpf (levels 0 and 1)."""
        if self.sign == 0:
            return mpmath.ninf
        if self.level == 0:
            with mpmath.workprec(BASE_PREC):
                return mpmath.log(self.mag)
        if self.level == 1:
            return self.mag
        raise LevelOverflow("log of a level-2 value is not an mpf")

    def log10(self) -> "LogValue":
        """log10|x| as a LogValue."""
        return self.ln() * LogValue.of(1 / mpmath.log(10))

    def to_dict(self, digits: int = 30) -> dict:
        with mpmath.workprec(_wp(self.mag)):
            mag = mpmath.nstr(self.mag, digits)
        return {"sign": self.sign, "level": self.level, "magnitude": mag}

    def __repr__(self) -> str:
        d = self.to_dict(12)
        return f"LogValue(sign={d['sign']}, level={d['level']}, magnitude={d['magnitude']})"

    # --- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "LogValue":
        return LogValue(-self.sign, self.level, self.mag)

    def __abs__(self) -> "LogValue":
        return LogValue(abs(self.sign), self.level, self.mag)

    def ln(self) -> "LogValue":
        if self.sign <= 0:
            raise ValueError("log of a non-positive value")
        if self.level == 0:
            with mpmath.workprec(BASE_PREC):
                return LogValue.of(mpmath.log(self.mag))
        if self.level == 1:
            return LogValue.of(self.mag)
        return LogValue.from_log(self.mag)

    def exp(self) -> "LogValue":
        if self.sign == 0:
            return LogValue.of(1)
        if self.sign < 0:
            if self.level == 0:
                with mpmath.workprec(BASE_PREC):
                    return LogValue.of(mpmath.exp(-self.mag))
            return LogValue.zero()
        return LogValue.from_log(self)

    def _key(self):
        return (self.level, self.mag)

    def __mul__(self, other) -> "LogValue":
        other = LogValue.of(other)
        sign = self.sign * other.sign
        if sign == 0:
            return LogValue.zero()
        if self.level == 0 and other.level == 0:
            with mpmath.workprec(BASE_PREC):
                return LogValue.of(sign * self.mag * other.mag)
        if self.level <= 1 and other.level <= 1:
            la, lb = self.ln_mpf(), other.ln_mpf()
            with mpmath.workprec(_wp(la, lb) + 8):
                return LogValue.from_log(la + lb, sign)
        # a level-2 factor dominates: log log(ab) = log(log a + log b)
        return LogValue.from_log(abs(self).ln() + abs(other).ln(), sign)

    __rmul__ = __mul__

    def __add__(self, other) -> "LogValue":
        other = LogValue.of(other)
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        if self.level == 0 and other.level == 0:
            with mpmath.workprec(BASE_PREC + 64):
                return LogValue.of(self.sign * self.mag + other.sign * other.mag)
        big, small = (self, other) if abs(self)._key() >= abs(other)._key() else (other, self)
        same = big.sign == small.sign
        if big.level == 2:
            # the ratio small / big is exp(-huge) unless the magnitudes agree
            if small.level == 2 and small.mag == big.mag and not same:
                return LogValue.zero()
            return big
        A, B = big.ln_mpf(), small.ln_mpf()
        with mpmath.workprec(_wp(A, B) + 8):
            d = B - A
        if d < -(BASE_PREC + 64):
            return big
        with mpmath.workprec(BASE_PREC + 64):
            r = mpmath.exp(d)
            if not same and r == 1:
                return LogValue.zero()
            delta = mpmath.log1p(r if same else -r)
        with mpmath.workprec(_wp(A) + 8):
            return LogValue.from_log(A + delta, big.sign)

    __radd__ = __add__

    def __sub__(self, other) -> "LogValue":
        return self + (-LogValue.of(other))

    def __rsub__(self, other) -> "LogValue":
        return LogValue.of(other) - self

    def __pow__(self, p) -> "LogValue":
        if self.sign <= 0:
            raise ValueError("powers are defined for positive values only")
        p = _plain(p, "exponent")
        if self.level <= 1:
            L = self.ln_mpf()
            with mpmath.workprec(_wp(L) + 8):
                return LogValue.from_log(p * L)
        if p <= 0:
            return LogValue.zero()
        with mpmath.workprec(_wp(self.mag) + 8):
            return LogValue(1, 2, self.mag + mpmath.log(p))

    def _cmp(self, other) -> int:
        other = LogValue.of(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        a, b = self._key(), other._key()
        c = (a > b) - (a < b)
        return c if self.sign > 0 else -c

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (LogValue, int, float, Fraction, mpmath.mpf)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.sign, self.level, float(self.mag) if self.level < 2 else str(self.mag)))


def lv_max(*values) -> LogValue:
    out = None
    for v in values:
        v = LogValue.of(v)
        if out is None or v > out:
            out = v
    return out


def _plain(x, name: str) -> mpmath.mpf:
    """A real argument that may arrive as a LogValue of modest size."""
    if isinstance(x, LogValue):
        try:
            return x.to_mpf()
        except LevelOverflow:
            raise LevelOverflow(f"{name} is too large for a real-valued bound") from None
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _below(L, floor) -> bool:
    """L < floor beyond rounding, so an N sitting exactly on a floor is admitted."""
    return L < floor * (1 - mpmath.ldexp(1, 16 - BASE_PREC))


def _ln_N(N) -> mpmath.mpf:
    if isinstance(N, LogValue):
        return N.ln_mpf()
    if isinstance(N, int):
        with mpmath.workprec(BASE_PREC + N.bit_length().bit_length()):
            return mpmath.log(N)
    return mpmath.log(mpmath.mpf(N))


# --- named constants ---------------------------------------------------------

def lombardo_index(D: int, hE_max) -> LogValue:
    """gamma_1 D^gamma_2 max{1, h(E), log D}^(2 gamma_2), built from its log."""
    if D < 1 or hE_max < 1:
        raise PreconditionError("need D >= 1 and hE_max >= 1", "D >= 1, max{1, h(E), log D} >= 1")
    with mpmath.workprec(BASE_PREC + 71400):
        L = (mpmath.mpf(LOMBARDO_LOG_GAMMA1) + LOMBARDO_GAMMA2 * mpmath.log(D)
             + 2 * LOMBARDO_GAMMA2 * mpmath.log(_plain(hE_max, "hE_max")))
    return LogValue(1, 1, L)


def threshold_N(h, D: int, H_xi=1, reading: str = "max", tau0_abs=None) -> LogValue:
    """Smallest admissible isogeny degree near xi.

    "linform": max{e^(18 pi h), D, (4e11 H(xi))^20}^(1/20).
    "recalled": max{e^(6 pi |tau0| / D), e^(e h), D, (4e11 H(xi))^20}^(1/20);
    without tau0 the bound |tau0| <= 3 D h is used.
    "max" (default) takes the larger of the two.
    """
    if h < 1 or D < 1 or H_xi < 1:
        raise PreconditionError("need h, D, H(xi) >= 1", "h >= 1, D >= 1, H(xi) >= 1")
    with mpmath.workprec(BASE_PREC):
        h = _plain(h, "h")
        common = [mpmath.log(D), 20 * mpmath.log(4 * 10 ** 11 * _plain(H_xi, "H_xi"))]
        lin = max([18 * mpmath.pi * h] + common)
        t = 3 * D * h if tau0_abs is None else _plain(tau0_abs, "tau0")
        rec = max([6 * mpmath.pi * t / D, mpmath.e * h] + common)
        ln = {"linform": lin, "recalled": rec, "max": max(lin, rec)}[reading] / 20
        return LogValue.from_log(ln)


def david_c1(D: int, h) -> LogValue:
    """c1' = 1e54 D^6 h^2 from the linear-forms lower bound."""
    return LogValue.of(10 ** 54) * LogValue.of(D) ** 6 * LogValue.of(h) ** 2


def conjbound_c(D: int, h, omega_max=1) -> tuple[LogValue, LogValue]:
    """(c1, c2) = (4e54 D^6 h^2, 14 + 3 log max{1, omega_max})."""
    c1 = LogValue.of(4 * 10 ** 54) * LogValue.of(D) ** 6 * LogValue.of(h) ** 2
    with mpmath.workprec(BASE_PREC):
        c2 = 14 + 3 * mpmath.log(max(mpmath.mpf(1), _plain(omega_max, "omega_max")))
    return c1, LogValue.of(c2)


def conjbound_c1_intermediate(D: int, h) -> LogValue:
    """The smaller 2e51 D^6 h^2 that also appears for c1; reported alongside."""
    return LogValue.of(2 * 10 ** 51) * LogValue.of(D) ** 6 * LogValue.of(h) ** 2


def c3(h_j0) -> mpmath.mpf:
    with mpmath.workprec(BASE_PREC):
        h0 = _plain(h_j0, "h_j0")
        return 20 - h0 + 6 * mpmath.log(1 + h0)


# --- height bounds for j at degree N ------------------------------------------

def lower_bound_hj(N, h_j0, index) -> mpmath.mpf:
    """h(j0) - 6 log(1 + h(j0)) + 6 log N - 84 index log log N - 16.212."""
    L = _ln_N(N)
    with mpmath.workprec(_wp(L)):
        if not L > 1:
            raise PreconditionError("log log N needs N >= 3", "N >= 3")
        idx = _plain(index, "index")
        if idx < 1:
            raise PreconditionError("index must be at least 1", "index >= 1")
        h0 = _plain(h_j0, "h_j0")
        return h0 - 6 * mpmath.log(1 + h0) + 6 * L - 84 * idx * mpmath.log(L) - mpmath.mpf("16.212")


def _upper_core(L, eps, factor, c1, c2, exponent):
    return factor * (mpmath.exp(-L / 10) + mpmath.sqrt(eps)) * (c1 * L ** exponent + c2)


def upper_bound_hj_unit(N, eps, h, D: int, index, c1, c2, exponent: int = 6) -> mpmath.mpf:
    """6e7 h D index (N^(-1/10) + sqrt(eps)) (c1 (log N)^6 + c2) + 3 |log eps|."""
    L = _ln_N(N)
    with mpmath.workprec(_wp(L)):
        eps, h = _plain(eps, "eps"), _plain(h, "h")
        floor = max(mpmath.log(4 * 10 ** 11), mpmath.log(D), 18 * mpmath.pi * h)
        if _below(L, floor):
            raise PreconditionError("N is below max{4e11, D, e^(18 pi h)}",
                                    "N >= max{4e11, [K:Q], e^(18 pi h)}")
        if not 0 < eps < mpmath.mpf(10) ** -5:
            raise PreconditionError("eps must lie in (0, 1e-5)", "0 < eps < 1e-5")
        factor = 6 * 10 ** 7 * h * D * _plain(index, "index")
        return (_upper_core(L, eps, factor, _plain(c1, "c1"), _plain(c2, "c2"), exponent)
                + 3 * abs(mpmath.log(eps)))


def upper_bound_hj_unit_specialised(N, h, D: int, index, c1, c2) -> mpmath.mpf:
    """The unit bound at eps = (log N)^-12:
    C (N^(-1/10) + (log N)^-6) (c1 (log N)^6 + c2) + 36 log log N."""
    L = _ln_N(N)
    with mpmath.workprec(_wp(L)):
        C = 6 * 10 ** 7 * _plain(h, "h") * D * _plain(index, "index")
        return (C * (mpmath.exp(-L / 10) + L ** -6) * (_plain(c1, "c1") * L ** 6 + _plain(c2, "c2"))
                + 36 * mpmath.log(L))


def eps_admissible_unit(N) -> bool:
    """(log N)^-12 < 1e-5, which holds for every N >= 1e7."""
    L = _ln_N(N)
    with mpmath.workprec(_wp(L)):
        return L ** -12 < mpmath.mpf(10) ** -5


def eps_admissible_translate(disc: int, ln_N, max_abs=None) -> bool:
    """(log N)^12 >= 1e4 max|xi^sigma|^4; max_abs defaults to sqrt(|disc|)/2."""
    with mpmath.workprec(_wp(ln_N)):
        m = mpmath.sqrt(abs(disc)) / 2 if max_abs is None else _plain(max_abs, "max_abs")
        return mpmath.mpf(ln_N) ** 12 >= 10 ** 4 * m ** 4


def upper_bound_hj_translate(N, eps, h, D: int, index, disc: int, deg_alpha: int, pen,
                             c1, c2, alpha_zero: bool = False, max_abs=None,
                             exponent: int = 6) -> mpmath.mpf:
    """1e8 h D^2 |disc|^5 index / deg_alpha (N^(-1/10) + sqrt(eps)) (c1 (log N)^6 + c2)
    + Pen + 2 |log eps|; alpha = 0 uses the unit bound instead."""
    if alpha_zero:
        return upper_bound_hj_unit(N, eps, h, D, index, c1, c2, exponent)
    if disc == -3:
        raise PreconditionError("xi = zeta has alpha = 0; use the unit bound",
                                "xi not in {zeta, zeta^2}")
    if disc >= 0 or disc % 4 not in (0, 1) or deg_alpha < 1:
        raise PreconditionError("need a negative discriminant and deg_alpha >= 1",
                                "disc < 0, disc = 0 or 1 mod 4, [Q(alpha):Q] >= 1")
    L = _ln_N(N)
    with mpmath.workprec(_wp(L)):
        eps, h = _plain(eps, "eps"), _plain(h, "h")
        floor = max(18 * mpmath.pi * h, mpmath.log(D), mpmath.log(4 * 10 ** 11 * mpmath.sqrt(-disc)))
        if _below(L, floor):
            raise PreconditionError("N is below max{e^(18 pi h), D, 4e11 sqrt|disc|}",
                                    "N >= max{e^(18 pi h), [K:Q], 4e11 sqrt|disc|}")
        if max_abs is None:
            from .curves import max_conjugate_abs
            max_abs = max_conjugate_abs(disc)
        if not 0 < eps < mpmath.mpf(10) ** -4 * _plain(max_abs, "max_abs") ** -4:
            raise PreconditionError("eps too large for xi",
                                    "0 < eps < 1e-4 min |xi^sigma|^-4")
        factor = mpmath.mpf(10) ** 8 * h * D ** 2 * (-disc) ** 5 * _plain(index, "index") / deg_alpha
        return (_upper_core(L, eps, factor, _plain(c1, "c1"), _plain(c2, "c2"), exponent)
                + _plain(pen, "pen") + 2 * abs(mpmath.log(eps)))


# --- final bounds --------------------------------------------------------------

@dataclass(frozen=True)
class CMData:
    disc: int
    pen: object                    # mpf, possibly +inf when c(xi) degenerates
    H_xi: object
    deg_alpha: int


@dataclass(frozen=True)
class BoundInputs:
    D: int
    h: object
    h_j0: object
    index: LogValue
    omega_max: object = 1
    cm: Optional[CMData] = None

    def __post_init__(self):
        object.__setattr__(self, "index", LogValue.of(self.index))
        if self.D < 1:
            raise PreconditionError("degree must be at least 1", "D >= 1")
        if LogValue.of(self.h) < 1:
            raise PreconditionError("curve height must be at least 1", "h >= 1")
        if LogValue.of(self.h) < LogValue.of(self.h_j0):
            raise PreconditionError("h is a maximum that includes h(j0)", "h >= h(j0)")
        if self.index < 1:
            raise PreconditionError("index must be at least 1", "index >= 1")


@dataclass
class BoundReport:
    kind: str
    constants: dict
    terms: dict
    value: Optional[LogValue]
    dominant: Optional[str]
    reason: str = ""

    @property
    def available(self) -> bool:
        return self.value is not None

    def order(self) -> list[str]:
        """Term names from largest to smallest."""
        names = list(self.terms)
        for i in range(len(names)):          # insertion sort on LogValue order
            j = i
            while j > 0 and self.terms[names[j - 1]] < self.terms[names[j]]:
                names[j - 1], names[j] = names[j], names[j - 1]
                j -= 1
        return names

    def to_dict(self) -> dict:
        return {"kind": self.kind, "available": self.available, "reason": self.reason,
                "constants": {k: render(v) for k, v in self.constants.items()},
                "terms": {k: v.to_dict() for k, v in self.terms.items()},
                "dominant": self.dominant, "order": self.order() if self.terms else [],
                "bound": None if self.value is None else self.value.to_dict()}


def _shared(inp: BoundInputs, C: LogValue, cname: str = "C"):
    c1, c2 = conjbound_c(inp.D, inp.h, inp.omega_max)
    k3 = c3(inp.h_j0)
    if not k3 < 26:
        raise ArithmeticError("c3 < 26 failed")
    Cc1, Cc2 = C * c1, C * c2
    terms = {
        f"1e180 ({cname} c1)^20": LogValue.of(10 ** 180) * Cc1 ** 20,
        f"({cname} c2)^10": Cc2 ** 10,
        "exp(120^2 index^2)": (LogValue.of(120 ** 2) * inp.index ** 2).exp(),
        "exp(18 pi h)": LogValue.from_log(18 * mpmath.pi * _plain(inp.h, "h")),
        "D": LogValue.of(inp.D),
    }
    constants = {"c1": c1, "c1_prime": david_c1(inp.D, inp.h),
                 "c1_intermediate": conjbound_c1_intermediate(inp.D, inp.h),
                 "c2": c2, "c3": k3, "index": inp.index}
    return terms, constants, Cc1 + Cc2 + LogValue.of(k3)


def _finish(kind, terms, constants):
    dominant = max(terms, key=lambda k: _SortKey(terms[k]))
    return BoundReport(kind, constants, terms, terms[dominant], dominant)


class _SortKey:
    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v


def final_bound_unit(inp: BoundInputs) -> BoundReport:
    """Six-term maximum bounding the minimal isogeny degree when j is a unit."""
    C = LogValue.of(6 * 10 ** 7) * LogValue.of(inp.h) * LogValue.of(inp.D) * inp.index
    terms, constants, expo = _shared(inp, C)
    terms["exp(C c1 + C c2 + c3)"] = expo.exp()
    constants["C"] = C
    constants["N_threshold"] = threshold_N(inp.h, inp.D)
    return _finish("unit", terms, constants)


def final_bound_translate(inp: BoundInputs) -> BoundReport:
    """Eight-term maximum when j - j(xi) is a unit for a CM point xi."""
    if inp.cm is None:
        raise PreconditionError("CM data required", "disc, Pen, H(xi), [Q(alpha):Q] given")
    cm = inp.cm
    if cm.disc == -3:
        raise PreconditionError("xi = zeta has alpha = 0; use the unit bound",
                                "xi not in {zeta, zeta^2}")
    Chat = (LogValue.of(10 ** 8) * LogValue.of(inp.h) * LogValue.of(inp.D) ** 2
            * LogValue.of(-cm.disc) ** 5 * inp.index * LogValue.of(Fraction(1, cm.deg_alpha)))
    with mpmath.workprec(BASE_PREC):
        pen = mpmath.mpf(cm.pen)
    if mpmath.isinf(pen):
        return BoundReport("translate", {"C_hat": Chat, "Pen": pen}, {}, None, None,
                           "c(xi) vanishes at some conjugate, so Pen(xi) is unbounded")
    terms, constants, expo = _shared(inp, Chat, "Chat")
    terms["exp(Chat c1 + Chat c2 + c3 + Pen)"] = (expo + LogValue.of(pen)).exp()
    terms["exp(3 |disc|)"] = LogValue.from_log(3 * -cm.disc)
    with mpmath.workprec(BASE_PREC):
        terms["4e11 sqrt|disc|"] = LogValue.of(4 * 10 ** 11 * mpmath.sqrt(-cm.disc))
    constants.update({"C_hat": Chat, "Pen": pen,
                      "N_threshold": threshold_N(inp.h, inp.D, cm.H_xi)})
    return _finish("translate", terms, constants)


# --- crossover and the Faltings-height chain -----------------------------------

@dataclass
class Crossover:
    ln_N: mpmath.mpf
    checks: list[Check]

    @property
    def log10_N(self) -> mpmath.mpf:
        with mpmath.workprec(_wp(self.ln_N)):
            return self.ln_N / mpmath.log(10)

    @property
    def certified(self) -> bool:
        return all(self.checks)

    def to_dict(self) -> dict:
        return {"ln_N": render(self.ln_N), "log10_N": render(self.log10_N),
                "certified": self.certified, "checks": [c.to_dict() for c in self.checks]}


def crossover_search(inp: BoundInputs, doublings: int = 10) -> Crossover:
    """Smallest log N (to within log 2) where the lower bound for h(j) exceeds
    the unit upper bound at eps = (log N)^-12, by doubling and bisection on log N."""
    if inp.index.level != 0:
        raise LevelOverflow("crossover search needs a modest index")
    c1, c2 = conjbound_c(inp.D, inp.h, inp.omega_max)
    h = _plain(inp.h, "h")

    def gap(L):
        N = LogValue.from_log(L)
        return lower_bound_hj(N, inp.h_j0, inp.index) - upper_bound_hj_unit_specialised(
            N, inp.h, inp.D, inp.index, c1, c2)

    with mpmath.workprec(BASE_PREC):
        lo = max(mpmath.log(4 * 10 ** 11), mpmath.log(inp.D), 18 * mpmath.pi * h, mpmath.log(10 ** 7))
    if gap(lo) > 0:
        hi = lo
    else:
        hi = 2 * lo
        while gap(hi) <= 0:
            lo, hi = hi, 2 * hi
        while True:
            with mpmath.workprec(_wp(hi)):
                if hi - lo <= mpmath.ln2 / 4:
                    break
                mid = (lo + hi) / 2
            if gap(mid) > 0:
                hi = mid
            else:
                lo = mid
    with mpmath.workprec(_wp(hi)):
        ln2 = mpmath.ln2
        checks = [Check("crossover_holds", gap(hi) > 0, gap(hi), 0)]
        if hi > lo or gap(lo) <= 0:
            below = hi - ln2
            checks.append(Check("fails_at_half", gap(below) <= 0, gap(below), 0))
        for k in range(1, doublings + 1):
            g = gap(hi + k * ln2)
            checks.append(Check(f"holds_after_{k}_doublings", g > 0, g, 0))
        admissible = eps_admissible_unit(LogValue.from_log(hi))
        checks.append(Check("eps_admissible", admissible, None, None))
        return Crossover(+hi, checks)


def faltings_chain_check(N: int, h_E0, index) -> Check:
    """h(E0) + (1/2) log N - 7 index log log N must stay below h(E0) + (1/2) log N."""
    if N < 4:
        raise PreconditionError("the chain needs N >= 4", "N >= 4")
    with mpmath.workprec(BASE_PREC):
        L = mpmath.log(N)
        h0 = _plain(h_E0, "h_E0")
        rhs = h0 + L / 2 - 7 * _plain(index, "index") * mpmath.log(L)
        ceiling = h0 + L / 2
        return Check("faltings_chain", rhs <= ceiling, rhs, ceiling,
                     {"average_form": h0 + L / 2 - lambda_autissier(N)})


def faltings_average(N: int, h_E0) -> mpmath.mpf:
    """h(E0) + (1/2) log N - lambda_N, the mean Faltings height over the psi(N) quotients."""
    with mpmath.workprec(BASE_PREC):
        return _plain(h_E0, "h_E0") + mpmath.log(N) / 2 - lambda_autissier(N)
