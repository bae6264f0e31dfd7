"""Prediction with expert advice as a sequential gamble space.

Learner plays a distribution ``q`` over actions; World reveals ``y``.  The
expected loss ``E_q l(., y)`` becomes the gamble ``y -> -E_q l(., y)`` so the
minimax expected regret is Gambler's price of the benchmark
``X(y_1..T) = -min_f sum_t l(f, y_t)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from .extreal import ExtReal, ext, format_ext
from .gamblespace import Hull
from .intervals import bracket
from .ratlp import LE, EQ, LinearProgram, solve_lp
from .sequential import SequentialSpace, doob_process, gambler_value, is_gt_supermartingale

MAX_EXHAUSTIVE_T = 8


@dataclass(frozen=True)
class OnlineGame:
    actions: tuple
    alphabet: tuple
    loss: tuple  # loss[f][y]
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(str(a) for a in self.actions))
        object.__setattr__(self, "alphabet", tuple(str(a) for a in self.alphabet))
        table = tuple(tuple(Fraction(v) for v in row) for row in self.loss)
        if len(table) != len(self.actions) or any(len(r) != len(self.alphabet) for r in table):
            raise ValueError("loss table must be |actions| x |alphabet|")
        object.__setattr__(self, "loss", table)
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")

    @property
    def loss_bound(self) -> Fraction:
        return max((abs(v) for r in self.loss for v in r), default=Fraction(0))

    def cumulative(self, history) -> tuple:
        return tuple(sum((row[y] for y in history), Fraction(0)) for row in self.loss)

    def benchmark(self, history) -> Fraction:
        return -min(self.cumulative(history))


def zero_one_experts(horizon: int) -> OnlineGame:
    """Two experts on binary outcomes; expert ``f`` predicts ``f``."""
    return OnlineGame(("0", "1"), ("0", "1"), ((0, 1), (1, 0)), horizon)


def game_to_space(game: OnlineGame):
    gens = tuple(tuple(-v for v in row) for row in game.loss)
    space = SequentialSpace(game.alphabet, game.horizon, Hull(gens))
    return space, game.benchmark


def minimax_regret(game: OnlineGame) -> ExtReal:
    space, X = game_to_space(game)
    return gambler_value(space, X, extract=False)[0]


@dataclass(frozen=True)
class Relaxation:
    """``value(history)`` for histories of length 0..T.  ``exact`` marks
    rational relaxations; others return certified upper bounds."""

    value: Callable[[tuple], ExtReal]
    label: str
    exact: bool = True


def doob_relaxation(game: OnlineGame) -> Relaxation:
    space, X = game_to_space(game)
    table = doob_process(space, X)
    return Relaxation(lambda h: table[tuple(h)], "doob", True)


def constant_relaxation(c=0) -> Relaxation:
    c = ext(c)
    return Relaxation(lambda h: c, f"constant({format_ext(c)})", True)


# --- exponential weights --------------------------------------------------------------


def _ew_float(losses, lam, steps_left):
    m = min(losses)
    s = sum(math.exp(-lam * (L - m)) for L in losses)
    return -m + math.log(s) / lam + 2 * lam * steps_left


def _golden(f, lo, hi, iterations):
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return c if fc <= fd else d


def _ew_upper(losses: tuple, lam: Fraction, steps_left: int, bits: int = 96) -> Fraction:
    """Certified rational upper bound of (1/lam) log sum exp(-lam L) + 2 lam steps_left."""
    m = min(losses)
    shifted = [L - m for L in losses]

    def expr(iv):
        lam_iv = iv.mpf(lam.numerator) / lam.denominator
        total = iv.mpf(0)
        for d in shifted:
            total += iv.exp(-lam_iv * (iv.mpf(d.numerator) / d.denominator))
        return iv.log(total) / lam_iv

    return -m + bracket(expr, bits)[1] + 2 * lam * steps_left


def exp_weights_relaxation(
    game: OnlineGame, lam_lo: float = 1e-3, lam_hi: float = 10.0, iterations: int = 96
) -> Relaxation:
    """inf over lambda of (1/lambda) log sum_f exp(-lambda L_f) + 2 lambda (T - t),
    bounded above: lambda is located by golden-section search in floating
    point, then the expression is evaluated at that exact rational lambda in
    interval arithmetic."""
    if game.loss_bound > 1:
        raise ValueError("exponential weights relaxation assumes |loss| <= 1")
    T = game.horizon

    @lru_cache(maxsize=None)
    def by_state(losses: tuple, steps_left: int) -> Fraction:
        fl = [float(L) for L in losses]
        lam = _golden(lambda x: _ew_float(fl, x, steps_left), lam_lo, lam_hi, iterations)
        return _ew_upper(losses, Fraction(lam), steps_left)

    def value(history):
        h = tuple(history)
        return by_state(game.cumulative(h), T - len(h))

    return Relaxation(value, "exp_weights", False)


# --- admissibility -------------------------------------------------------------------------


def _inner(game: OnlineGame, rel: Relaxation, history: tuple, lexicographic: bool):
    """inf_q max_y E_q l(., y) + Rel(history + y): (value, argmin q)."""
    k = len(game.actions)
    lp = LinearProgram([0] * k + [1], "min", bounds=[(0, None)] * k + [(None, None)])
    lp.add([1] * k + [0], EQ, 1)
    for y in range(len(game.alphabet)):
        r = ext(rel.value(history + (y,)))
        lp.add([game.loss[f][y] for f in range(k)] + [-1], LE, -r)
    res = solve_lp(lp, lexicographic=lexicographic)
    return res.value, res.point[:k]


@dataclass
class AdmissibilityReport:
    admissible: bool
    tolerance: Fraction
    violations: list = field(default_factory=list)
    checked: int = 0


def check_admissible(game: OnlineGame, rel: Relaxation, tolerance=0) -> AdmissibilityReport:
    tol = Fraction(tolerance)
    rep = AdmissibilityReport(True, tol)
    n = len(game.alphabet)
    for t in range(game.horizon + 1):
        for h in itertools.product(range(n), repeat=t):
            rep.checked += 1
            have = ext(rel.value(h))
            if t == game.horizon:
                need, kind = game.benchmark(h), "terminal"
            else:
                need, kind = _inner(game, rel, h, False)[0], "step"
            if have + tol < need:
                rep.admissible = False
                rep.violations.append(
                    {"history": h, "kind": kind, "relaxation": have, "required": need}
                )
    return rep


def meta_step(game: OnlineGame, rel: Relaxation, history) -> tuple:
    return tuple(_inner(game, rel, tuple(history), True)[1])


@dataclass
class MasterReport:
    passes: bool
    root: ExtReal
    sequences: int
    worst_regret: Fraction
    worst_sequence: Optional[tuple]
    failures: list = field(default_factory=list)
    supermartingale: bool = False


def master_bound_check(game: OnlineGame, rel: Relaxation) -> MasterReport:
    """Play the meta algorithm against every outcome sequence and compare the
    realized expected regret with the root relaxation value."""
    T = game.horizon
    if T > MAX_EXHAUSTIVE_T:
        raise ValueError(f"exhaustive play is capped at T = {MAX_EXHAUSTIVE_T}")
    n = len(game.alphabet)
    root = ext(rel.value(()))
    memo: dict = {}

    def q_at(h):
        if h not in memo:
            memo[h] = meta_step(game, rel, h)
        return memo[h]

    worst, worst_seq = None, None
    failures = []
    count = 0
    for seq in itertools.product(range(n), repeat=T):
        count += 1
        loss = Fraction(0)
        for t, y in enumerate(seq):
            q = q_at(seq[:t])
            loss += sum((qf * game.loss[f][y] for f, qf in enumerate(q)), Fraction(0))
        regret = loss - min(game.cumulative(seq))
        if worst is None or regret > worst:
            worst, worst_seq = regret, seq
        if regret > root:
            failures.append({"sequence": seq, "regret": regret})
    space, _ = game_to_space(game)
    table = {s: ext(rel.value(s)) for s in space.all_situations()}
    sm = is_gt_supermartingale(space, table)
    return MasterReport(not failures and sm, root, count, worst, worst_seq, failures, sm)
