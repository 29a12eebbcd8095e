"""Strict parsing of rational parameters such as ``2/3`` or ``-5``."""

from __future__ import annotations

import re
from fractions import Fraction

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")
_DECIMAL = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class RationalSyntaxError(ValueError):
    """Malformed rational; ``column`` is 1-based within the offending text."""

    def __init__(self, text: str, column: int, reason: str):
        self.text = text
        self.column = column
        self.reason = reason
        super().__init__(f"malformed rational {text!r} at line 1, column {column}: {reason}")


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` exactly; decimals are refused."""
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    m = _RATIONAL.match(s)
    if m is None:
        raise RationalSyntaxError(text, offset + 1, "expected an integer numerator")
    if m.end() != len(s):
        bad = s[m.end()]
        reason = "decimal values are not accepted here, write p/q" if bad in ".eE" else f"unexpected {bad!r}"
        raise RationalSyntaxError(text, offset + m.end() + 1, reason)
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise RationalSyntaxError(text, offset + len(num) + 2, "zero denominator")
    return Fraction(int(num), int(den) if den else 1)


def parse_number(text: str):
    """Rational if written as ``p/q`` or an integer, float if decimal."""
    s = text.strip()
    if _DECIMAL.fullmatch(s) and not _RATIONAL.fullmatch(s):
        return float(s)
    return parse_rational(text)


def parse_list(text: str, parser=parse_rational) -> list:
    """Comma separated values; column numbers refer to the whole string."""
    out = []
    pos = 0
    for piece in text.split(","):
        try:
            out.append(parser(piece))
        except RationalSyntaxError as err:
            raise RationalSyntaxError(text, pos + err.column, err.reason) from None
        pos += len(piece) + 1
    return out


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"
