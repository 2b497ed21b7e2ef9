"""Exact rational parsing and formatting for wire formats.

Probabilities and money amounts travel through JSON/CSV as strings such as
``"21/100"``, ``"4/25"``, ``"1"``, or ``"77/2"``.  Decimal strings like
``"38.5"`` are accepted on input; output is always the reduced fraction form
produced by :class:`fractions.Fraction`.

Floats are converted *exactly*: every binary float is a dyadic rational, so
``as_fraction(0.75) == Fraction(3, 4)`` with no rounding step.  Callers that
mean a decimal other than a dyadic one (e.g. one third) should pass a string
or a ``Fraction`` directly.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def as_fraction(value: int | float | str | Fraction | Rational) -> Fraction:
    """Convert ``value`` to an exact ``Fraction``.

    Accepts ints, Fractions (and other Rationals), strings in any form the
    ``Fraction`` constructor understands (``"3/4"``, ``"0.21"``, ``"7"``),
    and floats (converted exactly via their binary representation).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):  # bool is an int subclass; reject explicitly
        raise TypeError("cannot interpret a bool as a rational number")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact: floats are dyadic rationals
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational number")


def format_rational(value: Fraction) -> str:
    """Render a ``Fraction`` in reduced wire form (``"21/100"``, ``"1"``)."""
    return str(value)


def parse_rational(text: str) -> Fraction:
    """Parse a wire-form rational string; raises ``ValueError`` if malformed."""
    if not isinstance(text, str):
        raise TypeError(f"expected a string, got {type(text).__name__}")
    return as_fraction(text)
