"""Small helpers shared by the arbitrary-precision modules."""

from __future__ import annotations

from fractions import Fraction

import mpmath

GUARD_BITS = 64


def to_mpf(value):
    """Convert ints, Fractions, decimal strings or floats to ``mpf``.

    Floats go through ``str`` so that ``1.2`` means the decimal 1.2, not the
    nearest double.
    """
    if isinstance(value, mpmath.mpf):
        return value
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    if isinstance(value, float):
        return mpmath.mpf(repr(value))
    return mpmath.mpf(value)


def mpf_to_fraction(value):
    """Exact rational value of a binary ``mpf``."""
    man, exp = mpmath.mpf(value).man_exp
    if exp >= 0:
        return Fraction(int(man) << exp)
    return Fraction(int(man), 1 << -exp)


def digits_for(bits):
    return max(1, int(bits * 0.30103))


def fmt(value, bits):
    """Deterministic decimal string carrying ``bits`` of precision."""
    with mpmath.workprec(bits):
        return mpmath.nstr(mpmath.mpf(value), digits_for(bits), strip_zeros=False,
                           min_fixed=-6, max_fixed=digits_for(bits))
