"""Finite-horizon sequential gamble spaces on product trees.

A situation is a tuple of outcome indices of length ``0..T``; leaves have
length ``T``.  Each non-leaf situation carries its own gamble set over the
shared alphabet.  Both players' values are computed by backward induction,
one small LP per node.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

from .extreal import INF, NEG_INF, ExtReal, IndeterminateSum, add, ext, format_ext, is_finite, neg, sub_pessimistic
from .gamblespace import Cone, Explicit, GambleSet, GambleSpace, Hull, delta0_polytope
from .pricing import TheoremViolation, _upper_solve, consistent_upper_argmax, gamble_from, upper_expectation

Situation = tuple
ProcessTable = dict

DEFAULT_NODE_CAP = 10**6


class NodeCapExceeded(ValueError):
    pass


class InconsistentNode(ValueError):
    def __init__(self, situation):
        super().__init__(f"no consistent measure at situation {situation}")
        self.situation = situation


class PreconditionError(ValueError):
    pass


def node_cap() -> int:
    raw = os.environ.get("GW_NODE_CAP")
    return int(raw) if raw else DEFAULT_NODE_CAP


class SequentialSpace:
    """Alphabet, horizon and a gamble set for every non-leaf situation.

    ``gambles`` is either a mapping from situation to gamble set or a callable
    rule; a single gamble set means "the same gambles every round".
    """

    def __init__(
        self,
        alphabet,
        horizon: int,
        gambles: Union[GambleSet, Mapping, Callable],
        cap: Optional[int] = None,
    ):
        self.alphabet = tuple(str(a) for a in alphabet)
        if not self.alphabet:
            raise ValueError("empty alphabet")
        if horizon < 0:
            raise ValueError("horizon must be nonnegative")
        self.horizon = horizon
        self.cap = node_cap() if cap is None else cap
        if self.node_count > self.cap:
            raise NodeCapExceeded(f"{self.node_count} nodes exceed the cap {self.cap}")
        if isinstance(gambles, (Explicit, Cone, Hull)):
            fixed = gambles
            self._rule = lambda s: fixed
        elif isinstance(gambles, Mapping):
            table = {tuple(k): v for k, v in gambles.items()}
            self._rule = lambda s: table[s]
        else:
            self._rule = gambles
        self._cache: dict = {}

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @property
    def node_count(self) -> int:
        return sum(self.size**t for t in range(self.horizon + 1))

    def gambles_at(self, s: Situation) -> GambleSet:
        s = tuple(s)
        if len(s) >= self.horizon:
            raise KeyError(f"{s} is a leaf")
        if s not in self._cache:
            gs = self._rule(s)
            for g in gs.rows:
                if len(g) != self.size:
                    raise ValueError(f"gamble at {s} has wrong length")
            self._cache[s] = gs
        return self._cache[s]

    def space_at(self, s: Situation) -> GambleSpace:
        return GambleSpace(self.alphabet, self.gambles_at(s))

    def situations(self, depth: int):
        return itertools.product(range(self.size), repeat=depth)

    def all_situations(self):
        for t in range(self.horizon + 1):
            yield from self.situations(t)

    def internal(self):
        for t in range(self.horizon):
            yield from self.situations(t)

    def leaves(self):
        return self.situations(self.horizon)

    def label(self, s: Situation) -> str:
        return ",".join(self.alphabet[i] for i in s) if s else "()"


def tabulate(space: SequentialSpace, X) -> dict:
    """Leaf table from a callable, a mapping, or a list in lexicographic leaf order."""
    leaves = list(space.leaves())
    if callable(X):
        return {s: ext(X(s)) for s in leaves}
    if isinstance(X, Mapping):
        return {tuple(s): ext(v) for s, v in X.items()}
    vals = list(X)
    if len(vals) != len(leaves):
        raise ValueError(f"expected {len(leaves)} leaf values, got {len(vals)}")
    return {s: ext(v) for s, v in zip(leaves, vals)}


@dataclass
class Strategy:
    """Gambler's choice per situation: LP coefficients (Cone/Hull) or an
    explicit index, together with the resulting payoff vector."""

    choices: dict = field(default_factory=dict)
    gambles: dict = field(default_factory=dict)

    def payoff(self, s: Situation) -> tuple:
        if s not in self.gambles or self.gambles[s] is None:
            raise KeyError(f"strategy undefined at {s}")
        return self.gambles[s]

    @classmethod
    def zero(cls, space: SequentialSpace) -> "Strategy":
        z = tuple([Fraction(0)] * space.size)
        return cls({s: None for s in space.internal()}, {s: z for s in space.internal()})

    @classmethod
    def from_payoffs(cls, space: SequentialSpace, rule: Callable) -> "Strategy":
        return cls({}, {s: tuple(ext(v) for v in rule(s)) for s in space.internal()})


@dataclass
class Kernel:
    table: dict = field(default_factory=dict)
    rule: Optional[Callable] = None

    def at(self, s: Situation) -> tuple:
        s = tuple(s)
        if s in self.table:
            return self.table[s]
        if self.rule is None:
            raise KeyError(f"kernel undefined at {s}")
        return tuple(Fraction(v) for v in self.rule(s))

    @classmethod
    def constant(cls, p) -> "Kernel":
        p = tuple(Fraction(v) for v in p)
        return cls(rule=lambda s: p)

    @classmethod
    def uniform(cls, size: int) -> "Kernel":
        return cls.constant([Fraction(1, size)] * size)

    def is_stochastic(self, space: SequentialSpace) -> bool:
        for s in space.internal():
            p = self.at(s)
            if len(p) != space.size or any(v < 0 for v in p) or sum(p) != 1:
                return False
        return True


# --- backward induction -------------------------------------------------------------


def _induct(space: SequentialSpace, leaf: dict, node_fn, root=(), parallel=False):
    values: dict = {}
    choices: dict = {}

    def walk(s):
        if len(s) == space.horizon:
            values[s] = leaf[s]
            return leaf[s]
        vec = tuple(walk(s + (y,)) for y in range(space.size))
        v, ch = node_fn(s, vec)
        values[s] = v
        choices[s] = ch
        return v

    root = tuple(root)
    if parallel and len(root) < space.horizon:
        with ThreadPoolExecutor() as pool:
            kids = list(pool.map(lambda y: walk(root + (y,)), range(space.size)))
        v, ch = node_fn(root, tuple(kids))
        values[root] = v
        choices[root] = ch
    else:
        walk(root)
    return values, choices


def _gambler_node(space: SequentialSpace, extract: bool):
    def fn(s, vec):
        sp = space.space_at(s)
        v, ch = _upper_solve(sp, vec, lexicographic=extract)
        if not extract or ch is None or not is_finite(v):
            return v, None
        return v, (ch, gamble_from(sp, ch))

    return fn


def _world_node(space: SequentialSpace, extract: bool):
    def fn(s, vec):
        sp = space.space_at(s)
        v, p = consistent_upper_argmax(sp, vec, lexicographic=extract)
        if p is None and v == NEG_INF and delta0_polytope(sp).is_empty():
            raise InconsistentNode(s)
        return v, p

    return fn


def gambler_table(space, X, root=(), extract=True, parallel=False):
    return _induct(space, tabulate(space, X), _gambler_node(space, extract), root, parallel)


def gambler_value(space: SequentialSpace, X, parallel: bool = False, extract: bool = True):
    """Root value of Gambler-first backward induction and the optimal strategy."""
    values, choices = gambler_table(space, X, extract=extract, parallel=parallel)
    strat = Strategy()
    for s, ch in choices.items():
        strat.choices[s] = None if ch is None else ch[0]
        strat.gambles[s] = None if ch is None else ch[1]
    return values[()], strat


def world_value(space: SequentialSpace, X, parallel: bool = False, extract: bool = True):
    """sup over sequentially consistent kernels of E X, and a maximizing kernel."""
    values, choices = _induct(space, tabulate(space, X), _world_node(space, extract), (), parallel)
    return values[()], Kernel(dict(choices))


def check_minimax(space: SequentialSpace, X) -> ExtReal:
    g, _ = gambler_value(space, X, extract=False)
    w, _ = world_value(space, X, extract=False)
    return sub_pessimistic(g, w)


def conditional_upper(space: SequentialSpace, X, s: Situation) -> ExtReal:
    s = tuple(s)
    if len(s) > space.horizon:
        raise ValueError("situation deeper than the horizon")
    values, _ = gambler_table(space, X, root=s, extract=False)
    return values[s]


def doob_process(space: SequentialSpace, X) -> ProcessTable:
    values, _ = gambler_table(space, X, extract=False)
    return dict(values)


def _children(space, proc, s):
    return tuple(proc[s + (y,)] for y in range(space.size))


def is_gt_supermartingale(space: SequentialSpace, proc: ProcessTable) -> bool:
    for s in space.internal():
        if not upper_expectation(space.space_at(s), _children(space, proc, s)) <= proc[s]:
            return False
    return True


def strategy_capital(space: SequentialSpace, strategy: Strategy, initial) -> ProcessTable:
    table = {(): ext(initial)}
    for t in range(space.horizon):
        for s in space.situations(t):
            z = strategy.payoff(s)
            for y in range(space.size):
                table[s + (y,)] = add(table[s], z[y])
    return table


def _dominates(c: ExtReal, x: ExtReal) -> bool:
    return x == NEG_INF or c == INF or c >= x


def verify_replication(space: SequentialSpace, strategy: Strategy, alpha, X) -> bool:
    leaf = tabulate(space, X)
    cap = strategy_capital(space, strategy, alpha)
    return all(_dominates(cap[s], leaf[s]) for s in space.leaves())


def is_sequentially_consistent(space: SequentialSpace, kernel: Kernel) -> bool:
    memo: dict = {}
    for s in space.internal():
        gs = space.gambles_at(s)
        p = kernel.at(s)
        key = (gs, p)
        if key not in memo:
            memo[key] = delta0_polytope(space.space_at(s)).contains(p)
        if not memo[key]:
            return False
    return True


def kernel_expectation(space: SequentialSpace, kernel: Kernel, X) -> ExtReal:
    leaf = tabulate(space, X)
    total: ExtReal = Fraction(0)

    def walk(s, prob):
        nonlocal total
        if len(s) == space.horizon:
            v = leaf[s]
            total = add(total, v if not is_finite(v) else prob * v)
            return
        p = kernel.at(s)
        for y, q in enumerate(p):
            if q:
                walk(s + (y,), prob * q)

    try:
        walk((), Fraction(1))
    except IndeterminateSum:
        return INF
    return total


@dataclass(frozen=True)
class SeqPriceChain:
    lower_g: ExtReal
    lower_star: ExtReal
    upper_star: ExtReal
    upper_g: ExtReal


def seq_price_chain(space: SequentialSpace, X) -> SeqPriceChain:
    leaf = tabulate(space, X)
    negX = {s: neg(v) for s, v in leaf.items()}
    chain = SeqPriceChain(
        neg(gambler_value(space, negX, extract=False)[0]),
        neg(world_value(space, negX, extract=False)[0]),
        world_value(space, leaf, extract=False)[0],
        gambler_value(space, leaf, extract=False)[0],
    )
    if not (chain.lower_g <= chain.lower_star <= chain.upper_star <= chain.upper_g):
        raise TheoremViolation(f"sequential chain out of order: {chain}")
    return chain


# --- Ville -----------------------------------------------------------------------------


def ville_bound(space: SequentialSpace, proc: ProcessTable, alpha) -> tuple:
    """Largest probability, over sequentially consistent kernels, that the
    process ever reaches ``1/alpha``; returned with the check ``<= alpha``."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise PreconditionError("alpha must lie in (0, 1]")
    if proc[()] != 1:
        raise PreconditionError("process must start at 1")
    if any(not (v >= 0) for v in proc.values()):
        raise PreconditionError("process must be nonnegative")
    if not is_gt_supermartingale(space, proc):
        raise PreconditionError("process is not a game-theoretic supermartingale")
    level = 1 / alpha
    world = _world_node(space, extract=False)
    memo: dict = {}

    def hit_prob(s):
        # probability of reaching the level from s, given it was not reached before s
        if proc[s] >= level:
            return Fraction(1)
        if len(s) == space.horizon:
            return Fraction(0)
        if s not in memo:
            vec = tuple(hit_prob(s + (y,)) for y in range(space.size))
            memo[s] = world(s, vec)[0]
        return memo[s]

    sup_prob = hit_prob(())
    return sup_prob, sup_prob <= alpha * proc[()]


# --- global view ----------------------------------------------------------------------


def global_space(space: SequentialSpace, cap: int = 10_000) -> GambleSpace:
    """One-shot space on the leaves whose gambles are the cumulative payoffs of
    all strategies.  Cone nodes give a cone; Explicit nodes give the product
    of choices (refused beyond ``cap`` strategies)."""
    leaves = list(space.leaves())
    labels = [space.label(s) for s in leaves]
    sets = {s: space.gambles_at(s) for s in space.internal()}
    if all(isinstance(g, Cone) for g in sets.values()):
        gens = []
        for s, gs in sets.items():
            d = len(s)
            for g in gs.generators:
                gens.append(tuple(g[l[d]] if l[:d] == s else Fraction(0) for l in leaves))
        return GambleSpace(tuple(labels), Cone(tuple(gens)))
    if all(isinstance(g, Explicit) for g in sets.values()):
        nodes = list(sets)
        count = 1
        for s in nodes:
            count *= len(sets[s].gambles)
        if count > cap:
            raise NodeCapExceeded(f"{count} strategies exceed the cap {cap}")
        out = []
        for pick in itertools.product(*(sets[s].gambles for s in nodes)):
            chosen = dict(zip(nodes, pick))
            vec = []
            for l in leaves:
                acc: ExtReal = Fraction(0)
                for t in range(space.horizon):
                    acc = add(acc, chosen[l[:t]][l[t]])
                vec.append(acc)
            out.append(tuple(vec))
        return GambleSpace(tuple(labels), Explicit(tuple(out)))
    raise ValueError("global_space needs all-Cone or all-Explicit nodes")


# --- CLT counterexample ---------------------------------------------------------------


@dataclass(frozen=True)
class CLTResult:
    n: int
    k: int
    kernel: tuple
    consistent: bool
    prob_at_zero: Fraction
    gap: Fraction  # prob_at_zero - 1/2


def clt_space(k: int, n: int) -> SequentialSpace:
    ys = (Fraction(-1), Fraction(0), Fraction(k))
    gens = [ys, tuple(-y for y in ys), tuple(y * y - 1 for y in ys), tuple(1 - y * y for y in ys)]
    return SequentialSpace([format_ext(y) for y in ys], n, Cone(tuple(gens)))


def clt_kernel(k: int) -> tuple:
    p_neg = Fraction(1, k + 1)
    p_k = Fraction(1, k * (k + 1))
    return (p_neg, 1 - p_neg - p_k, p_k)


def clt_counterexample(n: int, target) -> CLTResult:
    """Least k with (1 - 1/(k(k+1)))^n > target, and the exact probability
    that n i.i.d. draws on {-1, 0, k} sum to at most 0."""
    target = Fraction(target)
    k = 1
    while (1 - Fraction(1, k * (k + 1))) ** n <= target:
        k += 1
    p = clt_kernel(k)
    ys = (-1, 0, k)
    space = clt_space(k, n)
    consistent = is_sequentially_consistent(space, Kernel.constant(p))
    dist = {0: Fraction(1)}
    for _ in range(n):
        nxt: dict = {}
        for total, q in dist.items():
            for y, py in zip(ys, p):
                if py:
                    nxt[total + y] = nxt.get(total + y, Fraction(0)) + q * py
        dist = nxt
    prob = sum((q for total, q in dist.items() if total <= 0), Fraction(0))
    return CLTResult(n, k, p, consistent, prob, prob - Fraction(1, 2))
