"""Exact rational scalars and their p/q wire format.

Every number in this package is a ``fractions.Fraction``: stored in lowest
terms with a positive denominator, compared exactly, never rounded. This
module only adds the strict string format used by the JSON file formats.
"""

from __future__ import annotations

import re
from fractions import Fraction

# "p" or "p/q" with integer p and positive integer q. Decimal points,
# exponents, signs inside the denominator and a zero denominator are all
# rejected, even though Fraction() itself would accept some of them.
_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse a "p/q" (or bare "p") literal into an exact Fraction."""
    if not isinstance(text, str) or _RATIONAL_RE.match(text) is None:
        raise ValueError(f"not a rational literal of the form p/q: {text!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "p/q", or just "p" when the denominator is 1."""
    return str(value)


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction or p/q string to a Fraction.

    Floats are refused on purpose: admitting them would silently smuggle
    binary rounding into an exact kernel.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def ceil_fraction(value: Fraction) -> int:
    """Smallest integer >= value."""
    return -((-value.numerator) // value.denominator)
