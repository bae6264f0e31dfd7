"""Path-level betting on outcomes in [-1, 1].

A strategy maps the observed history and current capital to a stake; the
capital then moves by ``stake * y``.  Exponentials in the Azuma strategy are
bracketed with interval arithmetic and stored as rational bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .gamblespace import GambleSpace, dcl_membership
from .intervals import bracket


class Bankrupt(ValueError):
    pass


@dataclass(frozen=True)
class BettingStrategy:
    """``stake(history, capital)``; ``history`` holds the outcomes so far."""

    stake: Callable[[tuple, Fraction], Fraction]
    label: str


@dataclass(frozen=True)
class CapitalPath:
    outcomes: tuple
    capitals: tuple
    stakes: tuple

    @property
    def bankrupt(self) -> bool:
        return any(c < 0 for c in self.capitals)


def run_capital(strategy: BettingStrategy, ys: Sequence, initial) -> CapitalPath:
    ys = tuple(Fraction(y) for y in ys)
    if any(abs(y) > 1 for y in ys):
        raise ValueError("outcomes must lie in [-1, 1]")
    initial = Fraction(initial)
    if initial < 0:
        raise ValueError("initial capital must be nonnegative")
    caps = [initial]
    stakes = []
    for t, y in enumerate(ys):
        b = Fraction(strategy.stake(ys[:t], caps[-1]))
        stakes.append(b)
        caps.append(caps[-1] + b * y)
    return CapitalPath(ys, tuple(caps), tuple(stakes))


def to_multiplicative(path: CapitalPath) -> list:
    if path.bankrupt:
        raise Bankrupt("capital went negative")
    es = []
    for prev, cur in zip(path.capitals, path.capitals[1:]):
        es.append(cur / prev if prev > 0 else Fraction(0))
    c = path.capitals[0]
    for e, cur in zip(es, path.capitals[1:]):
        c = c * e
        if c != cur:
            raise AssertionError("multiplicative reconstruction failed")
    return es


def from_multiplicative(initial, es) -> tuple:
    caps = [Fraction(initial)]
    for e in es:
        caps.append(caps[-1] * e)
    return tuple(caps)


def evariable_check(space: GambleSpace, E) -> bool:
    E = space.var(E)
    if any(e < 0 for e in E):
        raise ValueError("an e-variable candidate must be nonnegative")
    Z = tuple(e - 1 for e in E)
    return all(z >= -1 for z in Z) and dcl_membership(space, Z)


def zero_strategy() -> BettingStrategy:
    return BettingStrategy(lambda h, c: Fraction(0), "zero")


def kt_alpha(history: Sequence) -> Fraction:
    """Betting fraction for round ``len(history) + 1``: sum(history) / (len + 1)."""
    return Fraction(sum(history, Fraction(0)), len(history) + 1)


def kt_strategy() -> BettingStrategy:
    return BettingStrategy(lambda h, c: kt_alpha(h) * c, "kt")


def constant_fraction(a) -> BettingStrategy:
    a = Fraction(a)
    if abs(a) > 1:
        raise ValueError("fraction must lie in [-1, 1]")
    return BettingStrategy(lambda h, c: a * c, f"constant_fraction({a})")


# --- Azuma ------------------------------------------------------------------------------


@dataclass(frozen=True)
class AzumaPlan:
    """Constants of the Azuma strategy.

    ``initial`` is a rational upper bound on ``exp(-eps^2/(2T))`` and
    ``fraction`` a rational stand-in for ``sinh(eps/T) exp(-eps^2/(2T^2))``
    taken from the enclosing interval ``fraction_bounds``.
    """

    eps: Fraction
    T: int
    initial: Fraction
    initial_bounds: tuple
    fraction: Fraction
    fraction_bounds: tuple
    initial_expr: str = "exp(-eps^2/(2T))"
    fraction_expr: str = "sinh(eps/T) * exp(-eps^2/(2T^2))"


def azuma_strategy(eps, T: int):
    """Multiplicative strategy that turns ``initial`` into at least 1 on every
    path with ``sum(y) >= eps``: stake ``fraction * capital * y`` each round.

    Per round ``1 + f y >= exp(k y - k^2/2)`` for ``k = eps/T`` and
    ``f = sinh(k) exp(-k^2/2)``, so the final capital dominates
    ``initial * exp(k sum(y) - T k^2/2) >= 1``.
    """
    eps = Fraction(eps)
    if eps <= 0 or T < 1:
        raise ValueError("need eps > 0 and T >= 1")
    e_n, e_d, t = int(eps.numerator), int(eps.denominator), int(T)

    def init(iv):
        x = iv.mpf(e_n) / e_d
        return iv.exp(-(x * x) / (2 * t))

    def frac(iv):
        k = iv.mpf(e_n) / (e_d * t)
        return (iv.exp(k) - iv.exp(-k)) / 2 * iv.exp(-(k * k) / 2)

    ib = bracket(init)
    fb = bracket(frac)
    plan = AzumaPlan(eps, T, ib[1], ib, fb[0], fb)
    return plan, constant_fraction(plan.fraction)


# --- LLN growth -------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthCheck:
    capital: Fraction
    bound: Fraction | None
    applicable: bool
    passes: bool | None


def lln_growth_check(a, ys: Sequence, delta) -> GrowthCheck:
    """Exact ``prod(1 + a y)`` compared with ``(1 + a delta - a^2)^T``.

    The comparison applies when the mean of ``ys`` is at least ``delta`` and
    ``0 < a <= delta``; otherwise it is reported as skipped.
    """
    a, delta = Fraction(a), Fraction(delta)
    if abs(a) >= 1:
        raise ValueError("need |a| < 1")
    ys = [Fraction(y) for y in ys]
    cap = Fraction(1)
    for y in ys:
        cap *= 1 + a * y
    if not ys:
        return GrowthCheck(cap, None, False, None)
    mean = sum(ys, Fraction(0)) / len(ys)
    if mean < delta or not 0 < a <= delta:
        return GrowthCheck(cap, None, False, None)
    bound = (1 + a * delta - a * a) ** len(ys)
    return GrowthCheck(cap, bound, True, cap >= bound)
