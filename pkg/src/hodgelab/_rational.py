"""Exact rational backend: gmpy2's ``mpq`` when importable, else ``Fraction``."""

from __future__ import annotations

from fractions import Fraction

try:  # pragma: no cover - depends on the environment
    from gmpy2 import mpq as Q

    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover
    Q = Fraction
    BACKEND = "fractions"


def to_q(value) -> "Q":
    """Exact conversion of ints, floats, Fractions and 'a/b' strings."""
    if isinstance(value, str):
        return Q(Fraction(value.strip()))
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    if isinstance(value, float):
        f = Fraction(value)
        return Q(f.numerator, f.denominator)
    return Q(value)


def to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def q_str(value) -> str:
    f = to_fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
