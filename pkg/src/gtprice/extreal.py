"""Exact rationals extended with +inf and -inf.

Finite values are ``fractions.Fraction``; the infinities are the float
sentinels ``INF`` and ``NEG_INF``, which compare correctly against
fractions.  Nothing else in the package ever holds a float.

Subtraction is pessimistic: ``inf - inf`` and ``-inf - (-inf)`` are both
``+inf``.  Adding ``inf`` to ``-inf`` is refused.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

INF = float("inf")
NEG_INF = float("-inf")

ExtReal = Union[Fraction, float]


class IndeterminateSum(ValueError):
    """Raised for inf + (-inf)."""


class EmptyDomain(ValueError):
    """Raised when a supremum over nothing is requested."""


def is_inf(x: ExtReal) -> bool:
    return isinstance(x, float) and (x == INF or x == NEG_INF)


def is_finite(x: ExtReal) -> bool:
    return isinstance(x, Fraction)


def ext(x) -> ExtReal:
    """Coerce ``x`` to an ExtReal.

    Accepts ints, Fractions, the strings understood by :func:`parse_ext`,
    and the two float infinities.  Finite floats are rejected so inexact
    values cannot leak in.

    >>> ext(3), ext("1/2"), ext("-inf")
    (Fraction(3, 1), Fraction(1, 2), -inf)
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not extended reals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x == INF or x == NEG_INF:
            return x
        raise TypeError(f"finite float {x!r} is not exact; pass a Fraction or string")
    if isinstance(x, str):
        return parse_ext(x)
    raise TypeError(f"cannot interpret {x!r} as an extended real")


_NUM = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_ext(text: str) -> ExtReal:
    """Parse ``inf``, ``-inf``, ``n`` or ``p/q``."""
    s = text.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return NEG_INF
    m = _NUM.match(s)
    if not m:
        raise ValueError(f"not an extended rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_ext(x: ExtReal) -> str:
    if x == INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    x = ext(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def neg(x: ExtReal) -> ExtReal:
    if x == INF:
        return NEG_INF
    if x == NEG_INF:
        return INF
    return -x


def add(a: ExtReal, b: ExtReal) -> ExtReal:
    if is_inf(a) or is_inf(b):
        if (a == INF and b == NEG_INF) or (a == NEG_INF and b == INF):
            raise IndeterminateSum(f"{format_ext(a)} + {format_ext(b)}")
        return a if is_inf(a) else b
    return a + b


def sub_pessimistic(a: ExtReal, b: ExtReal) -> ExtReal:
    """``a - b`` with both indeterminate differences resolved to ``+inf``."""
    if a == INF:
        return INF
    if a == NEG_INF:
        return INF if b == NEG_INF else NEG_INF
    if b == INF:
        return NEG_INF
    if b == NEG_INF:
        return INF
    return a - b


def mul_pos(c: Fraction, x: ExtReal) -> ExtReal:
    """Multiply by a strictly positive rational."""
    if c <= 0:
        raise ValueError("mul_pos needs c > 0")
    if is_inf(x):
        return x
    return c * x


def sup_finite_list(xs: Iterable[ExtReal]) -> ExtReal:
    xs = list(xs)
    if not xs:
        raise EmptyDomain("supremum over an empty list")
    return max(xs)


def inf_finite_list(xs: Iterable[ExtReal]) -> ExtReal:
    xs = list(xs)
    if not xs:
        raise EmptyDomain("infimum over an empty list")
    return min(xs)
