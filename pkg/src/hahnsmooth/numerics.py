"""Shared numeric plumbing for the two arithmetic paths.

Everything in this package runs in one of two modes:

* ``rational`` -- `fractions.Fraction` end to end, no rounding ever;
* ``float`` -- IEEE doubles, with factorial-scale magnitudes carried as
  log-magnitude + sign so nothing overflows before the final step.

This module also provides exact rational enclosures of ``exp``, used to
decide inequalities of the form ``rational <= exp(rational)`` with no
floating-point leap of faith.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

RATIONAL = "rational"
FLOAT = "float"

_LN10 = math.log(10.0)


class ParameterError(ValueError):
    """A call violated a documented parameter-domain constraint."""


def check_mode(mode: str) -> str:
    if mode not in (RATIONAL, FLOAT):
        raise ParameterError(f"unknown arithmetic mode {mode!r}; expected 'rational' or 'float'")
    return mode


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and decimal strings like '1e-3' or '1/100'."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(str(value))


def log_factorial(m: int) -> float:
    return math.lgamma(m + 1)


def log_binomial(n: int, k: int) -> float:
    if k < 0 or k > n:
        return float("-inf")
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as sign and natural log of its magnitude.

    ``sign`` is -1, 0 or +1; ``log`` is -inf when the value is zero.
    Only the operations needed by the factorial-scale paths are defined.
    """

    sign: int
    log: float

    @classmethod
    def zero(cls) -> "SignedLog":
        return cls(0, float("-inf"))

    @classmethod
    def from_float(cls, x: float) -> "SignedLog":
        if x == 0.0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log: float, sign: int = 1) -> "SignedLog":
        return cls(0 if log == float("-inf") else sign, log)

    def __mul__(self, other: "SignedLog") -> "SignedLog":
        if self.sign == 0 or other.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.log + other.log)

    def __truediv__(self, other: "SignedLog") -> "SignedLog":
        if other.sign == 0:
            raise ZeroDivisionError("SignedLog division by zero")
        if self.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.log - other.log)

    def sqrt(self) -> "SignedLog":
        if self.sign < 0:
            raise ValueError("sqrt of negative SignedLog")
        if self.sign == 0:
            return SignedLog.zero()
        return SignedLog(1, 0.5 * self.log)

    @property
    def log10(self) -> float:
        return self.log / _LN10

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log > 709.0:  # exp overflow threshold for doubles
            return self.sign * float("inf")
        return self.sign * math.exp(self.log)


def exp_enclosure(x: Fraction, terms: int = 0) -> tuple[Fraction, Fraction]:
    """Rational lower/upper bounds for exp(x), tight to the Taylor tail.

    For x >= 0 the partial sum is a lower bound and the tail is bounded by a
    geometric series; negative arguments go through the reciprocal.
    """
    x = Fraction(x)
    if x == 0:
        return Fraction(1), Fraction(1)
    if x < 0:
        lo, hi = exp_enclosure(-x, terms)
        return 1 / hi, 1 / lo
    n = terms if terms else (2 * (int(x) + 1) + 24)
    while n + 1 <= 2 * x:  # need the geometric ratio < 1
        n *= 2
    term = Fraction(1)
    total = Fraction(1)
    for i in range(1, n + 1):
        term = term * x / i
        total += term
    ratio = x / (n + 1)
    tail = term * ratio / (1 - ratio)
    return total, total + tail


def le_exp(lhs: Fraction, x: Fraction, max_terms: int = 4096) -> bool:
    """Decide lhs <= exp(x) exactly, refining the enclosure as needed."""
    lhs = Fraction(lhs)
    terms = 0
    while True:
        lo, hi = exp_enclosure(x, terms)
        if lhs <= lo:
            return True
        if lhs > hi:
            return False
        terms = max(2 * (terms or 32), 64)
        if terms > max_terms:
            raise ArithmeticError(f"exp enclosure at {terms} terms cannot separate {lhs} from exp({x})")


def format_sig(x: float, digits: int = 12) -> str:
    """Fixed significant-digit scientific formatting for report columns."""
    if x != x:
        return "nan"
    if x == 0.0:
        return "0"
    return f"{x:.{digits - 1}e}"


def format_sig_log10(log10_value: float, sign: int = 1, digits: int = 12) -> str:
    """Scientific formatting straight from log10, for magnitudes that
    underflow doubles (exponents beyond ~±308)."""
    if sign == 0 or log10_value == float("-inf"):
        return "0"
    if math.isfinite(log10_value) and abs(log10_value) < 250:
        return format_sig(sign * 10.0 ** log10_value, digits)
    exponent = math.floor(log10_value)
    mantissa = 10.0 ** (log10_value - exponent)
    # keep the mantissa in [1, 10) after rounding
    rounded = round(mantissa, digits - 1)
    if rounded >= 10.0:
        rounded /= 10.0
        exponent += 1
    prefix = "-" if sign < 0 else ""
    return f"{prefix}{rounded:.{digits - 1}f}e{exponent:+d}"
