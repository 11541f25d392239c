"""Check results and their plain-data rendering."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath

DIGITS = 30


def render(value: Any, digits: int = DIGITS) -> Any:
    """Turn numbers into JSON-safe values; reals become decimal strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        value = mpmath.mpf(value)
    if isinstance(value, mpmath.mpf):
        if mpmath.isinf(value):
            return "inf" if value > 0 else "-inf"
        return mpmath.nstr(value, digits, min_fixed=-6, max_fixed=12)
    if isinstance(value, mpmath.mpc):
        return {"re": render(value.real, digits), "im": render(value.imag, digits)}
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(k): render(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v, digits) for v in value]
    return str(value)


@dataclass
class Check:
    """One inequality or identity with both sides recorded."""

    name: str
    passed: bool
    lhs: Any = None
    rhs: Any = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed,
               "lhs": render(self.lhs), "rhs": render(self.rhs)}
        if self.detail:
            out["detail"] = render(self.detail)
        return out
