"""Log-domain arithmetic for nonnegative magnitudes of extreme dynamic range.

Every measure, observer count, and probability in this package is carried as
its natural logarithm, so magnitudes like exp(1.4e13) stay finite and ratios
spanning a hundred decades keep full relative precision. Zero is encoded as
-inf and behaves as the additive identity and multiplicative annihilator.
Subtraction is deliberately absent: differences of measures never arise here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import logsumexp

from .errors import DomainError

__all__ = [
    "LN10",
    "LogWeight",
    "add",
    "mul",
    "ratio",
    "combine",
    "normalize",
    "render",
]

LN10 = math.log(10.0)

# Beyond this |log10| the magnitude no longer fits in a float and rendering
# falls back to an explicit power of ten.
_RENDER_LOG10_BOUND = 300.0


@dataclass(frozen=True, order=True)
class LogWeight:
    """A nonnegative magnitude stored as its natural logarithm.

    ``ln_value`` is -inf for zero and finite otherwise; NaN and +inf are
    rejected at construction. Instances are immutable and ordered by
    magnitude, so they are safe to share across threads and to sort.
    """

    ln_value: float

    def __post_init__(self) -> None:
        v = float(self.ln_value)
        if math.isnan(v):
            raise DomainError("LogWeight ln_value must not be NaN")
        if v == math.inf:
            raise DomainError("LogWeight cannot represent an infinite magnitude")
        object.__setattr__(self, "ln_value", v)

    @classmethod
    def from_value(cls, value: float) -> "LogWeight":
        """Build from a plain nonnegative number, exact to float log precision."""
        v = float(value)
        if math.isnan(v) or v < 0.0:
            raise DomainError(f"magnitude must be nonnegative, got {value!r}")
        if v == 0.0:
            return cls(-math.inf)
        return cls(math.log(v))

    @classmethod
    def from_log10(cls, exponent: float) -> "LogWeight":
        """Build 10**exponent without ever forming the magnitude itself."""
        return cls(float(exponent) * LN10)

    @classmethod
    def zero(cls) -> "LogWeight":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogWeight":
        return cls(0.0)

    @property
    def is_zero(self) -> bool:
        return self.ln_value == -math.inf

    @property
    def log10(self) -> float:
        return self.ln_value / LN10

    def __add__(self, other: "LogWeight") -> "LogWeight":
        if not isinstance(other, LogWeight):
            return NotImplemented
        return add(self, other)

    def __mul__(self, other: "LogWeight") -> "LogWeight":
        if not isinstance(other, LogWeight):
            return NotImplemented
        return mul(self, other)

    def __truediv__(self, other: "LogWeight") -> "LogWeight":
        if not isinstance(other, LogWeight):
            return NotImplemented
        return ratio(self, other)

    def __str__(self) -> str:
        return render(self)


def add(a: LogWeight, b: LogWeight) -> LogWeight:
    """Sum of two magnitudes via the max-anchored log1p form.

    Neither operand is exponentiated at its own scale, so the result is exact
    to float precision even when the logs are ~1e13 apart.
    """
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    hi, lo = (a.ln_value, b.ln_value) if a.ln_value >= b.ln_value else (b.ln_value, a.ln_value)
    return LogWeight(hi + math.log1p(math.exp(lo - hi)))


def mul(a: LogWeight, b: LogWeight) -> LogWeight:
    """Product of two magnitudes (sum of logs; zero annihilates)."""
    return LogWeight(a.ln_value + b.ln_value)


def ratio(a: LogWeight, b: LogWeight) -> LogWeight:
    """Quotient a / b (difference of logs). The denominator must be nonzero."""
    if b.is_zero:
        raise DomainError(
            f"ratio undefined: zero denominator (numerator={render(a)}, denominator={render(b)})"
        )
    if a.is_zero:
        return LogWeight.zero()
    return LogWeight(a.ln_value - b.ln_value)


def combine(a: LogWeight, b: LogWeight, mode: str) -> LogWeight:
    """Dispatch to add / mul / ratio by name."""
    if mode == "add":
        return add(a, b)
    if mode == "mul":
        return mul(a, b)
    if mode == "ratio":
        return ratio(a, b)
    raise ValueError(f"unknown combine mode {mode!r}")


def normalize(weights: Sequence[LogWeight]) -> list[LogWeight]:
    """Scale weights so they sum to one, entirely in log space.

    Ordering is preserved and zero inputs map to zero outputs. Raises
    DomainError when there is nothing to normalize.
    """
    if not weights:
        raise DomainError("no support: cannot normalize an empty weight list")
    lns = [w.ln_value for w in weights]
    if all(v == -math.inf for v in lns):
        raise DomainError("no support: all weights are zero")
    total = float(logsumexp(lns))
    return [LogWeight(v - total) if v != -math.inf else LogWeight.zero() for v in lns]


def render(w: LogWeight) -> str:
    """Human-readable magnitude: scientific notation while the value fits in a
    float, otherwise an explicit power of ten with six significant digits."""
    if w.is_zero:
        return "0"
    e = w.log10
    if abs(e) <= _RENDER_LOG10_BOUND:
        return f"{math.exp(w.ln_value):.6g}"
    return f"10^{e:.6g}"
