"""Parsing and formatting of exact rationals for the JSON formats."""

from fractions import Fraction
from numbers import Rational


def to_fraction(value):
    """Convert an int, Fraction or ``"p/q"`` string to a :class:`Fraction`.

    Floats and booleans are rejected: every exact input must be lossless.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r} (use an integer or a 'p/q' string)")


def fmt(value):
    """Lowest-terms ``"p/q"`` string, or ``"p"`` for integers."""
    return str(Fraction(value))


def fmt_matrix(rows):
    return [[fmt(v) for v in row] for row in rows]
