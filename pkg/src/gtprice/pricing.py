"""One-shot prices on a finite gamble space.

``upper_expectation`` is the Gambler-first price: the least starting capital
from which some available gamble covers ``X``.  ``consistent_upper`` and
``measure_upper`` are World-first prices, a supremum over probability
vectors.  All values are exact rationals or signed infinities.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .extreal import (
    INF,
    NEG_INF,
    ExtReal,
    add,
    format_ext,
    is_finite,
    mul_pos,
    neg,
    sub_pessimistic,
)
from .gamblespace import (
    Cone,
    Explicit,
    GambleSpace,
    Hull,
    delta0_polytope,
    is_arbitrage_free,
    is_positive_linear,
    sum_is_arbitrage_free,
)
from .ratlp import (
    EQ,
    LE,
    Constraint,
    LinearProgram,
    Polytope,
    UNBOUNDED,
    enumerate_vertices,
    simplex_constraints,
    solve_lp,
)

_ZERO = Fraction(0)


class TheoremViolation(AssertionError):
    """A proven inequality failed; never expected."""


class NoFiniteCertificate(ValueError):
    pass


def _negate(X) -> tuple:
    return tuple(neg(x) for x in X)


# --- Gambler-first price ------------------------------------------------------------


def _upper_lp(space: GambleSpace, X, shift: Fraction) -> LinearProgram:
    """LP for a Cone/Hull upper expectation over the rows where X is finite.

    The price variable is stored as ``t - shift`` with ``shift = max X`` so
    every row starts slack-feasible and phase one is skipped.
    """
    gens = space.gambles.rows
    k = len(gens)
    lp = LinearProgram([0] * k + [1], "min", bounds=[(0, None)] * k + [(None, None)])
    for w, x in enumerate(X):
        if x == NEG_INF:
            continue
        lp.add([-g[w] for g in gens] + [-1], LE, shift - x)
    if isinstance(space.gambles, Hull):
        lp.add([1] * k + [0], EQ, 1)
    return lp


def _upper_solve(space: GambleSpace, X, lexicographic: bool = False):
    """(value, coefficients or explicit index) for the upper expectation."""
    gs = space.gambles
    if isinstance(gs, Explicit):
        best, arg = INF, None
        for j, g in enumerate(gs.gambles):
            v = max(sub_pessimistic(x, z) for x, z in zip(X, g))
            if v < best:
                best, arg = v, j
        return best, arg
    if INF in X:
        return INF, None
    if isinstance(gs, Hull) and not gs.generators:
        return INF, None
    finite = [x for x in X if x != NEG_INF]
    if not finite:
        return NEG_INF, None
    shift = max(finite)
    res = solve_lp(_upper_lp(space, X, shift), lexicographic=lexicographic)
    if res.status == UNBOUNDED:
        return NEG_INF, None
    return res.value + shift, res.point[:-1]


def upper_expectation(space: GambleSpace, X) -> ExtReal:
    return _upper_solve(space, space.var(X))[0]


def lower_expectation(space: GambleSpace, X) -> ExtReal:
    return neg(upper_expectation(space, _negate(space.var(X))))


def upper_probability(space: GambleSpace, event) -> ExtReal:
    return upper_expectation(space, space.indicator(event))


def lower_probability(space: GambleSpace, event) -> ExtReal:
    idx = {space.index(o) for o in event}
    complement = [w for w in range(space.n) if w not in idx]
    return sub_pessimistic(Fraction(1), upper_probability(space, complement))


@dataclass(frozen=True)
class ReplicationCertificate:
    """``gamble + alpha >= X`` pointwise.  ``coefficients`` is a vector for
    Cone/Hull spaces; ``index`` names the chosen gamble for Explicit ones."""

    alpha: Fraction
    gamble: tuple
    coefficients: Optional[tuple] = None
    index: Optional[int] = None
    slack: Fraction = _ZERO

    def covers(self, X) -> bool:
        for z, x in zip(self.gamble, X):
            if z == INF or x == NEG_INF:
                continue
            if x == INF or z == NEG_INF or z + self.alpha < x:
                return False
        return True


def gamble_from(space: GambleSpace, choice) -> tuple:
    gs = space.gambles
    if isinstance(gs, Explicit):
        return gs.gambles[choice]
    return tuple(
        sum((c * g[w] for c, g in zip(choice, gs.generators)), _ZERO) for w in range(space.n)
    )


def replication_certificate(space: GambleSpace, X, slack: Fraction = _ZERO) -> ReplicationCertificate:
    """Certificate at the exact price (the reported slack is always 0)."""
    X = space.var(X)
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    value, choice = _upper_solve(space, X, lexicographic=True)
    if not is_finite(value):
        raise NoFiniteCertificate(f"upper expectation is {format_ext(value)}")
    gamble = gamble_from(space, choice)
    if isinstance(space.gambles, Explicit):
        cert = ReplicationCertificate(value, gamble, index=choice)
    else:
        cert = ReplicationCertificate(value, gamble, coefficients=tuple(choice))
    if not cert.covers(X):
        raise TheoremViolation("extracted gamble does not replicate X")
    return cert


# --- World-first prices ----------------------------------------------------------------


def consistent_polytope(space: GambleSpace) -> Polytope:
    return delta0_polytope(space)


def consistent_upper_argmax(space: GambleSpace, X, lexicographic: bool = True):
    """(sup over consistent P of E_P X, a maximizing P or None)."""
    X = space.var(X)
    n = space.n
    rows = list(consistent_polytope(space).h_rep)
    for w, x in enumerate(X):
        if x == INF:
            e = [0] * n
            e[w] = 1
            res = Polytope(n, rows).maximize(e, lexicographic=lexicographic)
            if not res.optimal:
                return NEG_INF, None
            if res.value > 0:
                return INF, res.point
    # no consistent P charges a +inf entry; P must also avoid -inf entries
    for w, x in enumerate(X):
        if not is_finite(x):
            e = [0] * n
            e[w] = 1
            rows.append(Constraint(e, EQ, 0))
    obj = [x if is_finite(x) else _ZERO for x in X]
    res = Polytope(n, rows).maximize(obj, lexicographic=lexicographic)
    if not res.optimal:
        return NEG_INF, None
    return res.value, res.point


def consistent_upper(space: GambleSpace, X) -> ExtReal:
    return consistent_upper_argmax(space, X, lexicographic=False)[0]


def consistent_lower(space: GambleSpace, X) -> ExtReal:
    return neg(consistent_upper(space, _negate(space.var(X))))


def _measure_upper_lp(space: GambleSpace, X, lexicographic: bool):
    gs = space.gambles
    n = space.n
    rows = gs.rows
    if not rows:
        return INF, None
    blocked = {w for g in rows for w, z in enumerate(g) if z == INF}
    if len(blocked) == n:
        return NEG_INF, None
    # variables p_0..p_{n-1}, v ; max v
    cons = [Constraint(list(c.row) + [0], c.rel, c.rhs) for c in simplex_constraints(n)]
    for w in sorted(blocked):
        e = [0] * (n + 1)
        e[w] = 1
        cons.append(Constraint(e, EQ, 0))
    for g in rows:
        r = [-(x - z) if w not in blocked else _ZERO for w, (x, z) in enumerate(zip(X, g))]
        cons.append(Constraint(r + [1], LE, 0))
    res = solve_lp(LinearProgram([0] * n + [1], "max", cons), lexicographic=lexicographic)
    return res.value, res.point[:n]


def measure_upper_argmax(space: GambleSpace, X, lexicographic: bool = True):
    X = space.var(X)
    if not all(is_finite(x) for x in X):
        raise ValueError("measure_upper is restricted to real-valued X; use upper_expectation")
    if isinstance(space.gambles, Cone):
        value, p = consistent_upper_argmax(space, X, lexicographic)
        check = upper_expectation(space, X)
        if check != value:
            raise TheoremViolation(
                f"cone prices disagree: consistent {format_ext(value)} vs gambler {format_ext(check)}"
            )
        return value, p
    return _measure_upper_lp(space, X, lexicographic)


def measure_upper(space: GambleSpace, X) -> ExtReal:
    return measure_upper_argmax(space, X, lexicographic=False)[0]


def measure_lower(space: GambleSpace, X) -> ExtReal:
    return neg(measure_upper(space, _negate(space.var(X))))


# --- chains and gaps -------------------------------------------------------------------


@dataclass(frozen=True)
class PriceChain:
    lower_g: ExtReal
    lower_p: ExtReal
    lower_p0: ExtReal
    upper_p0: ExtReal
    upper_p: ExtReal
    upper_g: ExtReal
    delta0_nonempty: bool

    def as_list(self) -> list:
        return [self.lower_g, self.lower_p, self.lower_p0, self.upper_p0, self.upper_p, self.upper_g]

    def ordering_holds(self) -> bool:
        lg, lp, lp0, up0, up, ug = self.as_list()
        outer = lg <= lp <= lp0 and up0 <= up <= ug
        if not self.delta0_nonempty:
            return outer
        return outer and lp0 <= up0


def price_chain(space: GambleSpace, X) -> PriceChain:
    X = space.var(X)
    if not all(is_finite(x) for x in X):
        raise ValueError("price_chain needs a real-valued X")
    nonempty = not consistent_polytope(space).is_empty()
    chain = PriceChain(
        lower_expectation(space, X),
        measure_lower(space, X),
        consistent_lower(space, X),
        consistent_upper(space, X),
        measure_upper(space, X),
        upper_expectation(space, X),
        nonempty,
    )
    if not chain.ordering_holds():
        raise TheoremViolation(f"price chain out of order: {[format_ext(v) for v in chain.as_list()]}")
    return chain


def minimax_gap(space: GambleSpace, X) -> ExtReal:
    return sub_pessimistic(upper_expectation(space, X), measure_upper(space, X))


def char_lower_leq_upper(space: GambleSpace) -> bool:
    """True iff lower <= upper expectation for every variable, which holds
    exactly when pairwise sums of gambles admit no sure gain."""
    return sum_is_arbitrage_free(space)


# --- effective gamble sets --------------------------------------------------------------


LEVELS = ("dcl_closure", "conv_dcl", "polar_polar")


@dataclass
class EffectiveSet:
    """Gamble set seen by one price level, in plot-ready form.

    The set is ``union(apex - nonnegative orthant)`` when ``apexes`` is given,
    otherwise ``{z : normal . z <= rhs}`` over ``halfspaces``.  ``generators``
    lists the gambles it was built from.
    """

    level: str
    outcomes: tuple
    generators: list = field(default_factory=list)
    halfspaces: list = field(default_factory=list)
    apexes: Optional[list] = None
    empty: bool = False

    def upper(self, X) -> ExtReal:
        """Gambler-first price when Gambler may pick any gamble of this set."""
        if self.empty:
            return INF
        if self.apexes is not None:
            return min(
                (max(sub_pessimistic(x, z) for x, z in zip(X, a)) for a in self.apexes),
                default=INF,
            )
        n = len(self.outcomes)
        lp = LinearProgram([0] * n + [1], "min")
        for w, x in enumerate(X):
            e = [0] * (n + 1)
            e[w] = -1
            e[n] = -1
            lp.add(e, LE, -x)
        for normal, rhs in self.halfspaces:
            lp.add(list(normal) + [0], LE, rhs)
        res = solve_lp(lp)
        return NEG_INF if res.status == UNBOUNDED else res.value


def _primitive(v) -> tuple:
    """Scale a nonzero rational vector to coprime integers."""
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for a in ints:
        g = math.gcd(g, abs(a))
    return tuple(Fraction(a // g) for a in ints) if g else tuple(Fraction(a) for a in ints)


def _polar_halfspaces(space: GambleSpace, cap: int) -> list:
    return [(_primitive(v), _ZERO) for v in enumerate_vertices(consistent_polytope(space), cap)]


def _support_halfspaces(space: GambleSpace, rows, cap: int) -> list:
    """Facets of conv(rows) minus the orthant: <p, z> <= h(p) at the vertices
    p of the linearity regions of the support function h."""
    n = space.n
    top = max(max(r) for r in rows) + 1
    cons = [Constraint(list(c.row) + [0], c.rel, c.rhs) for c in simplex_constraints(n)]
    for r in rows:
        cons.append(Constraint(list(r) + [-1], LE, 0))
    cons.append(Constraint([0] * n + [1], LE, top))
    out = []
    for vert in enumerate_vertices(Polytope(n + 1, cons), cap):
        p, h = vert[:n], vert[n]
        if h == top:
            continue
        scale = _primitive(p)
        k = next(a / b for a, b in zip(scale, p) if b)
        out.append((scale, h * k))
    return sorted(set(out))


def effective_gambles(space: GambleSpace, level: str, cap: int = 8) -> EffectiveSet:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    gs = space.gambles
    rows = list(gs.rows)
    if any(not is_finite(z) for r in rows for z in r):
        raise ValueError("effective_gambles needs real-valued gambles")
    eff = EffectiveSet(level, space.outcomes, generators=rows)
    if level == "polar_polar":
        eff.halfspaces = _polar_halfspaces(space, cap)
        return eff
    if isinstance(gs, Cone):
        eff.halfspaces = _polar_halfspaces(space, cap)
        return eff
    if not rows:
        eff.empty = True
        return eff
    if level == "dcl_closure" and isinstance(gs, Explicit):
        eff.apexes = rows
        return eff
    eff.halfspaces = _support_halfspaces(space, rows, cap + 1)
    return eff


# --- axioms -------------------------------------------------------------------------


@dataclass
class AxiomResult:
    status: str  # "pass", "fail" or "not applicable"
    checked: int = 0
    witness: Optional[dict] = None


def _random_variable(rng: random.Random, n: int) -> tuple:
    return tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 6)) for _ in range(n))


def audit_axioms(space: GambleSpace, sample_count: int = 100, seed: int = 0) -> dict:
    """Sample variables and test E1 (subadditivity), E2 (positive homogeneity),
    E3 (monotonicity) and E4 (constants) for the upper expectation."""
    rng = random.Random(seed)
    n = space.n
    cache: dict = {}

    def U(X):
        X = tuple(X)
        if X not in cache:
            cache[X] = upper_expectation(space, X)
        return cache[X]

    applicable_e1 = is_positive_linear(space) and is_arbitrage_free(space)
    report = {
        "E1": AxiomResult("pass" if applicable_e1 else "not applicable"),
        "E2": AxiomResult("pass"),
        "E3": AxiomResult("pass"),
        "E4": AxiomResult("pass"),
    }

    def fail(name, **witness):
        r = report[name]
        if r.status != "fail":
            r.status = "fail"
            r.witness = {k: _show(v) for k, v in witness.items()}

    for _ in range(sample_count):
        X = _random_variable(rng, n)
        Y = _random_variable(rng, n)
        if applicable_e1:
            lhs = U(tuple(a + b for a, b in zip(X, Y)))
            try:
                rhs = add(U(X), U(Y))
            except ValueError:
                rhs = INF
            report["E1"].checked += 1
            if not lhs <= rhs:
                fail("E1", X=X, Y=Y, lhs=lhs, rhs=rhs)
        for c in (Fraction(1, 2), Fraction(2), Fraction(3)):
            lhs = U(tuple(c * x for x in X))
            rhs = mul_pos(c, U(X))
            report["E2"].checked += 1
            if lhs != rhs:
                fail("E2", X=X, c=c, lhs=lhs, rhs=rhs)
        D = tuple(x - Fraction(rng.randint(0, 6), rng.randint(1, 3)) for x in X)
        report["E3"].checked += 1
        if not U(D) <= U(X):
            fail("E3", X=X, Y=D, lhs=U(D), rhs=U(X))
    for c in (Fraction(0), Fraction(1), Fraction(-3, 2), Fraction(rng.randint(-9, 9), rng.randint(1, 4))):
        report["E4"].checked += 1
        v = U(tuple([c] * n))
        if v != c:
            fail("E4", X=tuple([c] * n), value=v, expected=c)
    return report


def _show(v):
    if isinstance(v, tuple):
        return [format_ext(x) for x in v]
    return format_ext(v)
