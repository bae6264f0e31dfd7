"""Seeded random instances and small worked examples.

Full-support cones are built around a strictly positive probability vector
``p*``: every generator is shifted so that ``<g, p*> <= 0``.  Then ``p*`` is
a consistent measure charging every outcome, which doubles as a cheap
certificate of full support.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .gamblespace import Cone, Explicit, GambleSpace, Hull, cone_space, explicit_space
from .sequential import SequentialSpace

F = Fraction


def rand_q(rng: random.Random, lo: int = -6, hi: int = 6, den: int = 4) -> Fraction:
    return F(rng.randint(lo, hi), rng.randint(1, den))


def rand_vector(rng: random.Random, n: int, **kw) -> tuple:
    return tuple(rand_q(rng, **kw) for _ in range(n))


def rand_interior_point(rng: random.Random, n: int) -> tuple:
    w = [rng.randint(1, 6) for _ in range(n)]
    s = sum(w)
    return tuple(F(x, s) for x in w)


def full_support_generators(rng: random.Random, n: int, k: int, p_star: Optional[tuple] = None):
    """``k`` generators with ``<g, p*> <= 0``; about a third are made tight,
    and tight ones sometimes come with their negation."""
    p = p_star or rand_interior_point(rng, n)
    gens = []
    while len(gens) < k:
        g = rand_vector(rng, n)
        m = sum(a * b for a, b in zip(g, p))
        tight = rng.random() < 0.35
        shift = m if tight else m + F(rng.randint(0, 3), 2)
        g = tuple(a - shift for a in g)
        gens.append(g)
        if tight and len(gens) < k and rng.random() < 0.5:
            gens.append(tuple(-a for a in g))
    return tuple(gens), p


def random_full_support_cone(rng: random.Random, n: int, k: int) -> tuple:
    gens, p = full_support_generators(rng, n, k)
    return cone_space([f"w{i}" for i in range(n)], gens), p


def random_sequential_cone(rng: random.Random, size: int, horizon: int, max_gens: int = 3, seed_tag=""):
    """Sequential space with an independent full-support cone per situation.

    Returns the space and a dict of the per-situation witnesses ``p*``.
    """
    base = rng.random()
    witnesses: dict = {}

    def rule(s):
        r = random.Random(f"{seed_tag}:{base}:{s}")
        gens, p = full_support_generators(r, size, r.randint(1, max_gens))
        witnesses[s] = p
        return Cone(gens)

    space = SequentialSpace([f"y{i}" for i in range(size)], horizon, rule)
    for s in space.internal():
        space.gambles_at(s)
    return space, witnesses


def random_leaf_table(rng: random.Random, space: SequentialSpace, lo=-6, hi=6) -> dict:
    return {s: rand_q(rng, lo, hi) for s in space.leaves()}


def random_one_shot(rng: random.Random) -> GambleSpace:
    """Arbitrary small space: Explicit, Cone or Hull with unconstrained entries."""
    n = rng.randint(2, 4)
    k = rng.randint(1, 3)
    kind = rng.choice(("explicit", "cone", "hull"))
    rows = [rand_vector(rng, n, lo=-4, hi=4, den=3) for _ in range(k)]
    if kind == "explicit" and rng.random() < 0.4:
        rows.append(tuple([F(0)] * n))
    labels = [f"w{i}" for i in range(n)]
    if kind == "explicit":
        return GambleSpace(tuple(labels), Explicit(tuple(rows)))
    if kind == "cone":
        return GambleSpace(tuple(labels), Cone(tuple(rows)))
    return GambleSpace(tuple(labels), Hull(tuple(rows)))


# --- worked examples ----------------------------------------------------------------


def fair_coin() -> GambleSpace:
    """Outcomes T, H as -1, 1; gambles beta * omega for any real beta."""
    return cone_space(["T", "H"], [(-1, 1), (1, -1)])


def biased_coin(eps) -> GambleSpace:
    eps = F(eps)
    g = (F(-1) - 2 * eps, F(1) - 2 * eps)
    return cone_space(["T", "H"], [g, tuple(-v for v in g)])


CUBIC_GRID = (F(-1), F(-1, 2), F(0), F(1, 2), F(1))


def outcome_interval_grid(grid=CUBIC_GRID) -> GambleSpace:
    return cone_space([str(w) for w in grid], [grid, tuple(-w for w in grid)])


def variance_grid(grid, c, v) -> GambleSpace:
    c, v = F(c), F(v)
    g1 = tuple(w - c for w in grid)
    g2 = tuple((w - c) ** 2 - v for w in grid)
    gens = [g1, tuple(-a for a in g1), g2, tuple(-a for a in g2)]
    return cone_space([str(w) for w in grid], gens)


def crossing_gambles() -> GambleSpace:
    return explicit_space(["w1", "w2"], [(2, -1), (-1, 2)])


def lopsided_gambles() -> GambleSpace:
    return explicit_space(["w1", "w2"], [(4, -2), (-1, 2)])


def pascal_fermat() -> SequentialSpace:
    """Alphabet (L, W) read as (-1, 1); even-odds bets on W each round."""
    return SequentialSpace(["L", "W"], 2, Cone(((-1, 1), (1, -1))))


def pascal_fermat_payoff(s) -> Fraction:
    return F(100) if tuple(s) == (1, 1) else F(0)


def azuma_space(horizon: int) -> SequentialSpace:
    """Alphabet {-1, 0, 1}; Gambler may only bet that y goes up."""
    return SequentialSpace(["-1", "0", "1"], horizon, Cone(((-1, 0, 1),)))


def azuma_event(eps):
    eps = F(eps)
    vals = (-1, 0, 1)
    return lambda s: F(1) if sum(vals[i] for i in s) >= eps else F(0)
