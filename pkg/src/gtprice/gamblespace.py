"""Finite gamble spaces.

A :class:`GambleSpace` pairs outcome labels with a gamble set in one of three
representations:

* :class:`Explicit` - a finite list of gambles, possibly with ``+inf`` entries;
* :class:`Cone` - all nonnegative combinations of real generators;
* :class:`Hull` - all convex combinations of real generators.

Variables are plain tuples of extended reals indexed like the outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .extreal import INF, NEG_INF, ext, is_finite, sub_pessimistic
from .ratlp import EQ, LE, Constraint, LinearProgram, Polytope, simplex_constraints, solve_lp

Variable = tuple  # tuple[ExtReal, ...]


class UnsupportedRepresentation(ValueError):
    pass


def variable(values: Iterable) -> Variable:
    return tuple(ext(v) for v in values)


def real_variable(values: Iterable) -> tuple[Fraction, ...]:
    out = variable(values)
    if not all(is_finite(v) for v in out):
        raise ValueError("expected a real-valued variable")
    return out


@dataclass(frozen=True)
class Explicit:
    gambles: tuple

    def __post_init__(self):
        gs = tuple(variable(g) for g in self.gambles)
        # gambles taking -inf anywhere can never help Gambler
        object.__setattr__(self, "gambles", tuple(g for g in gs if NEG_INF not in g))

    @property
    def rows(self) -> tuple:
        return self.gambles


@dataclass(frozen=True)
class Cone:
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(real_variable(g) for g in self.generators))

    @property
    def rows(self) -> tuple:
        return self.generators


@dataclass(frozen=True)
class Hull:
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(real_variable(g) for g in self.generators))

    @property
    def rows(self) -> tuple:
        return self.generators


GambleSet = Union[Explicit, Cone, Hull]


@dataclass(frozen=True)
class GambleSpace:
    outcomes: tuple
    gambles: GambleSet

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(str(o) for o in self.outcomes))
        if not self.outcomes:
            raise ValueError("a gamble space needs at least one outcome")
        if not isinstance(self.gambles, (Explicit, Cone, Hull)):
            raise TypeError("gambles must be Explicit, Cone or Hull")
        for g in self.gambles.rows:
            if len(g) != self.n:
                raise ValueError(f"gamble {g} has {len(g)} entries for {self.n} outcomes")

    @property
    def n(self) -> int:
        return len(self.outcomes)

    @property
    def kind(self) -> str:
        return type(self.gambles).__name__.lower()

    def var(self, values) -> Variable:
        v = variable(values)
        if len(v) != self.n:
            raise ValueError(f"variable has {len(v)} entries for {self.n} outcomes")
        return v

    def index(self, outcome) -> int:
        if isinstance(outcome, int):
            return outcome
        return self.outcomes.index(str(outcome))

    def indicator(self, event: Iterable) -> Variable:
        idx = {self.index(o) for o in event}
        return tuple(Fraction(1) if i in idx else Fraction(0) for i in range(self.n))


def cone_space(outcomes, generators) -> GambleSpace:
    return GambleSpace(tuple(outcomes), Cone(tuple(generators)))


def hull_space(outcomes, generators) -> GambleSpace:
    return GambleSpace(tuple(outcomes), Hull(tuple(generators)))


def explicit_space(outcomes, gambles) -> GambleSpace:
    return GambleSpace(tuple(outcomes), Explicit(tuple(gambles)))


# --- structural predicates ------------------------------------------------------


def _max_min_payoff(space: GambleSpace, normalize: bool) -> Fraction | None:
    """max t with sum(c g) >= t pointwise over the admissible coefficients,
    or None when there are no generators."""
    gens = space.gambles.rows
    k = len(gens)
    if k == 0:
        return None
    lp = LinearProgram([0] * k + [1], "max", bounds=[(0, None)] * k + [(None, None)])
    for w in range(space.n):
        lp.add([-g[w] for g in gens] + [1], LE, 0)
    if normalize:
        lp.add([1] * k + [0], EQ, 1)
    res = solve_lp(lp)
    return res.value


def is_arbitrage_free(space: GambleSpace) -> bool:
    gs = space.gambles
    if isinstance(gs, Explicit):
        return all(min(g) <= 0 for g in gs.gambles)
    t = _max_min_payoff(space, normalize=True)
    return t is None or t <= 0


def sum_is_arbitrage_free(space: GambleSpace) -> bool:
    gs = space.gambles
    if isinstance(gs, Hull):
        raise UnsupportedRepresentation("sum_is_arbitrage_free takes Explicit or Cone gambles")
    if isinstance(gs, Cone):
        return is_arbitrage_free(space)
    for a in gs.gambles:
        for b in gs.gambles:
            if min(x + y for x, y in zip(a, b)) > 0:
                return False
    return True


def contains_zero(space: GambleSpace) -> bool:
    gs = space.gambles
    if isinstance(gs, Cone):
        return True
    zero = tuple([Fraction(0)] * space.n)
    if isinstance(gs, Explicit):
        return zero in gs.gambles
    if not gs.generators:
        return False
    k = len(gs.generators)
    lp = LinearProgram([0] * k, "min", bounds=[(0, None)] * k)
    lp.add([1] * k, EQ, 1)
    for w in range(space.n):
        lp.add([g[w] for g in gs.generators], EQ, 0)
    return solve_lp(lp).optimal


def is_scalable(space: GambleSpace) -> bool:
    """Closed under positive scaling; asserted structurally for cones only."""
    return isinstance(space.gambles, Cone)


def is_positive_linear(space: GambleSpace) -> bool:
    return isinstance(space.gambles, Cone)


def prune_useless(space: GambleSpace, X) -> GambleSpace:
    gs = space.gambles
    if not isinstance(gs, Explicit):
        raise UnsupportedRepresentation("prune_useless takes Explicit gambles")
    X = space.var(X)
    keep = []
    for g in gs.gambles:
        if NEG_INF in g:
            continue
        if max(sub_pessimistic(x, z) for x, z in zip(X, g)) == INF:
            continue
        keep.append(g)
    return GambleSpace(space.outcomes, Explicit(tuple(keep)))


def restrict_bounded_below(space: GambleSpace) -> GambleSpace:
    """Keep the gambles whose infimum exceeds -inf (all of them, after pruning)."""
    gs = space.gambles
    if not isinstance(gs, Explicit):
        raise UnsupportedRepresentation("restrict_bounded_below takes Explicit gambles")
    keep = tuple(g for g in gs.gambles if min(g) > NEG_INF)
    return GambleSpace(space.outcomes, Explicit(keep))


def dcl_membership(space: GambleSpace, Z) -> bool:
    from .pricing import upper_expectation

    Z = space.var(Z)
    if not all(is_finite(z) for z in Z):
        raise ValueError("dcl_membership needs a real-valued Z")
    return upper_expectation(space, Z) <= 0


# --- consistent measures -----------------------------------------------------------


def delta0_constraints(space: GambleSpace) -> list[Constraint]:
    """H-representation of the consistent measures: the probability simplex cut
    by <g, p> <= 0 for each gamble, with p null on every +inf entry."""
    rows = simplex_constraints(space.n)
    for g in space.gambles.rows:
        finite = [z if is_finite(z) else Fraction(0) for z in g]
        for w, z in enumerate(g):
            if z == INF:
                e = [Fraction(0)] * space.n
                e[w] = Fraction(1)
                rows.append(Constraint(e, EQ, 0))
        rows.append(Constraint(finite, LE, 0))
    return rows


def delta0_polytope(space: GambleSpace) -> Polytope:
    return Polytope(space.n, delta0_constraints(space))


def max_mass(space: GambleSpace, outcome: int) -> Fraction | None:
    """Largest probability a consistent measure can put on ``outcome``
    (None when there is no consistent measure)."""
    e = [0] * space.n
    e[outcome] = 1
    res = delta0_polytope(space).maximize(e)
    return res.value if res.optimal else None


def has_full_support(space: GambleSpace) -> bool:
    """Every outcome is charged by some consistent measure.

    Decided exactly by one LP per outcome (max p(w) over the consistent set),
    so no denominator search is needed.
    """
    for w in range(space.n):
        m = max_mass(space, w)
        if m is None or m <= 0:
            return False
    return True


def outcomes_in(space: GambleSpace, event: Sequence) -> list[int]:
    return sorted({space.index(o) for o in event})
