"""Rigorous rational enclosures from mpmath interval arithmetic."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import mpmath


def mpf_fraction(x, bits: int) -> Fraction:
    # exact: the working precision exceeds the endpoint's own precision
    with mpmath.workprec(bits):
        v = mpmath.mpf(x)
    if not mpmath.isfinite(v):
        raise ValueError(f"interval endpoint {v} is not finite")
    sign, m, e, _ = v._mpf_  # man_exp drops the sign
    q = Fraction(int(m)) * (Fraction(2) ** int(e))
    return -q if sign else q


def bracket(expr: Callable, bits: int = 64) -> tuple:
    """Rational (lo, hi) enclosing ``expr(iv)`` evaluated in interval arithmetic,
    snapped outward to the grid 2**-bits."""
    ctx = mpmath.iv
    saved = ctx.prec
    ctx.prec = bits + 64
    try:
        r = expr(ctx)
        lo, hi = mpf_fraction(r.a, 2 * ctx.prec), mpf_fraction(r.b, 2 * ctx.prec)
    finally:
        ctx.prec = saved
    scale = 2**bits
    lo_s = Fraction((lo * scale).__floor__(), scale)
    hi_s = Fraction(-((-hi * scale).__floor__()), scale)
    return lo_s, hi_s
