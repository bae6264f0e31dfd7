"""The twelve acceptance criteria as runnable checks.

Each criterion returns a :class:`CriterionResult` made of named sub-checks.
``python -m gtprice selftest`` and ``tests/test_acceptance.py`` both run
these functions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .intervals import bracket
from .extreal import format_ext
from .gamblespace import Explicit, cone_space, delta0_polytope, explicit_space
from .instances import (
    CUBIC_GRID,
    azuma_event,
    azuma_space,
    biased_coin,
    crossing_gambles,
    lopsided_gambles,
    fair_coin,
    full_support_generators,
    pascal_fermat,
    pascal_fermat_payoff,
    rand_q,
    random_leaf_table,
    random_one_shot,
    random_sequential_cone,
    outcome_interval_grid,
)
from .onlinelearn import (
    check_admissible,
    doob_relaxation,
    exp_weights_relaxation,
    master_bound_check,
    minimax_regret,
    zero_one_experts,
)
from .pricing import (
    audit_axioms,
    char_lower_leq_upper,
    consistent_polytope,
    lower_expectation,
    lower_probability,
    measure_upper_argmax,
    price_chain,
    replication_certificate,
    upper_expectation,
    upper_probability,
)
from .ratlp import enumerate_vertices
from .sequential import (
    Kernel,
    SequentialSpace,
    clt_counterexample,
    conditional_upper,
    doob_process,
    gambler_value,
    global_space,
    kernel_expectation,
    tabulate,
    ville_bound,
    world_value,
)

F = Fraction
SEED = 20240601


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        failed = [c.name for c in self.checks if not c.passed]
        tail = f" (failed: {'; '.join(failed)})" if failed else ""
        return f"[{tag}] criterion {self.number:2d}: {self.title}{tail}"


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return format_ext(v)


# --- 1 ---------------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    r = CriterionResult(1, "fair and biased coin prices")
    coin = fair_coin()
    up, lo = upper_probability(coin, ["H"]), lower_probability(coin, ["H"])
    r.add("fair coin upper P(H) = 1/2", up == F(1, 2), _fmt(up))
    r.add("fair coin lower P(H) = 1/2", lo == F(1, 2), _fmt(lo))
    verts = enumerate_vertices(consistent_polytope(coin))
    r.add("consistent set is {(1/2, 1/2)}", verts == [(F(1, 2), F(1, 2))], _fmt(verts))
    for eps in (F(1, 8), F(1, 4), F(1, 2)):
        sp = biased_coin(eps)
        u, l = upper_probability(sp, ["H"]), lower_probability(sp, ["H"])
        r.add(f"biased eps={eps}: price 1/2+eps", u == l == F(1, 2) + eps, f"{_fmt(u)}, {_fmt(l)}")
    return r


# --- 2 ---------------------------------------------------------------------------------


def criterion_2() -> CriterionResult:
    r = CriterionResult(2, "outcome-interval cubic on a five-point grid")
    sp = outcome_interval_grid()
    X = tuple(w**3 for w in CUBIC_GRID)
    u, l = upper_expectation(sp, X), lower_expectation(sp, X)
    r.add("upper = 1/4", u == F(1, 4), _fmt(u))
    r.add("lower = -1/4", l == F(-1, 4), _fmt(l))
    cert = replication_certificate(sp, X)
    beta = cert.coefficients[0] - cert.coefficients[1]
    r.add("certificate beta = 3/4", cert.alpha == F(1, 4) and beta == F(3, 4), f"beta={_fmt(beta)}")
    return r


# --- 3 ---------------------------------------------------------------------------------


def criterion_3() -> CriterionResult:
    r = CriterionResult(3, "crossing and lopsided two-gamble spaces")
    crossing, lopsided = crossing_gambles(), lopsided_gambles()
    X = (F(2), F(-1))
    l, u = lower_expectation(crossing, X), upper_expectation(crossing, X)
    r.add("crossing: lower = 1 > 0 = upper", l == 1 and u == 0, f"{_fmt(l)} vs {_fmt(u)}")
    r.add("crossing: lower<=upper characterization is false", char_lower_leq_upper(crossing) is False)
    zero = (F(0), F(0))
    v, p = measure_upper_argmax(lopsided, zero)
    r.add("lopsided: measure upper of 0 = -2/3", v == F(-2, 3), _fmt(v))
    r.add("lopsided: optimal P = (4/9, 5/9)", tuple(p) == (F(4, 9), F(5, 9)), _fmt(p))
    lg, ug = lower_expectation(lopsided, zero), upper_expectation(lopsided, zero)
    r.add("lopsided: lower_G 0 = -1, upper_G 0 = 1", lg == -1 and ug == 1, f"{_fmt(lg)}, {_fmt(ug)}")
    return r


# --- 4 ---------------------------------------------------------------------------------


def _stake_on_w(strategy, s):
    return strategy.payoff(s)[1]


def criterion_4() -> CriterionResult:
    r = CriterionResult(4, "Pascal-Fermat game")
    sp = pascal_fermat()
    g, strat = gambler_value(sp, pascal_fermat_payoff)
    w, kern = world_value(sp, pascal_fermat_payoff)
    r.add("gambler value = world value = 25", g == w == 25, f"{_fmt(g)}, {_fmt(w)}")
    stakes = {(): F(25), (1,): F(50), (0,): F(0)}
    got = {s: _stake_on_w(strat, s) for s in stakes}
    r.add("stakes 25 at root, 50 after W, 0 after L", got == stakes, _fmt([got[s] for s in stakes]))
    half = (F(1, 2), F(1, 2))
    r.add("optimal kernel uniform", all(kern.at(s) == half for s in sp.internal()))
    best4 = (0, 50, 50, 100)
    g4, strat4 = gambler_value(sp, best4)
    w4, _ = world_value(sp, best4)
    r.add("best-of-4 value 50", g4 == w4 == 50, f"{_fmt(g4)}, {_fmt(w4)}")
    root = _stake_on_w(strat4, ())
    r.add("best-of-4 root stake 0", root == 0, f"root stake {_fmt(root)}")
    later = [_stake_on_w(strat4, (y,)) for y in (0, 1)]
    r.add("best-of-4 stake 25 after either first outcome", later == [25, 25], _fmt(later))
    return r


# --- 5 ---------------------------------------------------------------------------------


def vertex_oracle_world(space: SequentialSpace, X, product_cap: int = 4096):
    """World value from vertices of each node's consistent polytope.

    Small trees enumerate every vertex kernel and take the best forward
    expectation; larger ones maximize over vertices node by node.
    """
    nodes = list(space.internal())
    verts = {s: enumerate_vertices(delta0_polytope(space.space_at(s))) for s in nodes}
    count = 1
    for s in nodes:
        count *= len(verts[s])
    leaf = tabulate(space, X)
    if count <= product_cap:
        best = None
        for pick in itertools.product(*(verts[s] for s in nodes)):
            v = kernel_expectation(space, Kernel(dict(zip(nodes, pick))), leaf)
            best = v if best is None or v > best else best
        return best, "product"
    val = dict(leaf)
    for t in range(space.horizon - 1, -1, -1):
        for s in space.situations(t):
            kids = [val[s + (y,)] for y in range(space.size)]
            val[s] = max(sum((p * k for p, k in zip(v, kids)), F(0)) for v in verts[s])
    return val[()], "nodewise"


def criterion_5(count: int = 200) -> CriterionResult:
    r = CriterionResult(5, "finite sequential minimax on random full-support cones")
    rng = random.Random(SEED + 5)
    gaps = oracle_runs = oracle_bad = support_bad = 0
    for i in range(count):
        size = rng.randint(2, 4)
        T = rng.randint(1, 4 if size <= 3 else 3)
        sp, wit = random_sequential_cone(rng, size, T, seed_tag=f"c5-{i}")
        for s, p in wit.items():
            if not (all(x > 0 for x in p) and delta0_polytope(sp.space_at(s)).contains(p)):
                support_bad += 1
        X = random_leaf_table(rng, sp)
        g, _ = gambler_value(sp, X, extract=False)
        w, _ = world_value(sp, X, extract=False)
        if g != w:
            gaps += 1
        if T <= 3 and size <= 3:
            oracle_runs += 1
            ov, _ = vertex_oracle_world(sp, X)
            if ov != w:
                oracle_bad += 1
    r.add("every node has a strictly positive consistent witness", support_bad == 0, f"{support_bad} bad nodes")
    r.add(f"gap exactly 0 on {count} instances", gaps == 0, f"{gaps} nonzero gaps")
    r.add("world value matches the vertex oracle", oracle_bad == 0, f"{oracle_bad}/{oracle_runs} mismatches")
    return r


# --- 6 ---------------------------------------------------------------------------------


def criterion_6(count: int = 500) -> CriterionResult:
    r = CriterionResult(6, "one-shot price chains")
    rng = random.Random(SEED + 6)
    full = empty = bad_full = bad_empty = 0
    while full < count:
        sp = random_one_shot(rng)
        X = tuple(rand_q(rng, -5, 5, 3) for _ in range(sp.n))
        try:
            chain = price_chain(sp, X)
        except AssertionError:
            chain = None
        nonempty = not consistent_polytope(sp).is_empty()
        if nonempty:
            full += 1
            bad_full += chain is None
        else:
            empty += 1
            bad_empty += chain is None
    r.add(f"six-term chain on {count} instances with consistent measures", bad_full == 0, f"{bad_full} violations")
    r.add(f"outer chains on {empty} instances without", empty > 0 and bad_empty == 0, f"{bad_empty} violations")
    return r


# --- 7 ---------------------------------------------------------------------------------


def exp_lower_bound(eps: Fraction, T: int) -> Fraction:
    n, d = int(eps.numerator), int(eps.denominator)
    return bracket(lambda iv: iv.exp(-((iv.mpf(n) / d) ** 2) / (2 * T)))[0]


def criterion_7() -> CriterionResult:
    r = CriterionResult(7, "game-theoretic Azuma-Hoeffding")
    worst = []
    for T in range(2, 6):
        sp = azuma_space(T)
        for eps in (F(1, 2), F(1), F(3, 2)):
            w, _ = world_value(sp, azuma_event(eps), extract=False)
            bound = exp_lower_bound(eps, T)
            if not w <= bound:
                worst.append(f"T={T} eps={eps}: {_fmt(w)}")
    r.add("world value <= exp(-eps^2/2T) (lower-rounded bound)", not worst, "; ".join(worst))
    w, _ = world_value(azuma_space(2), azuma_event(1), extract=False)
    r.add("T=2, eps=1 equals 1/2", w == F(1, 2), _fmt(w))
    return r


# --- 8 ---------------------------------------------------------------------------------


def random_supermartingale(rng: random.Random, tag: str):
    size = rng.randint(2, 3)
    T = rng.randint(1, 5 if size == 2 else 4)
    sp, _ = random_sequential_cone(rng, size, T, seed_tag=tag)
    X = random_leaf_table(rng, sp, 0, 8)
    first = next(iter(X))
    if all(v == 0 for v in X.values()):
        X[first] = F(1)
    proc = doob_process(sp, X)
    if rng.random() < 0.5:
        drift = sorted((F(rng.randint(0, 4), 2) for _ in range(T + 1)), reverse=True)
        proc = {s: v + drift[len(s)] for s, v in proc.items()}
    root = proc[()]
    return sp, {s: v / root for s, v in proc.items()}


def criterion_8(count: int = 100) -> CriterionResult:
    r = CriterionResult(8, "Ville bound for nonnegative supermartingales")
    rng = random.Random(SEED + 8)
    bad = []
    hits = 0
    for i in range(count):
        sp, proc = random_supermartingale(rng, f"c8-{i}")
        for alpha in (F(1, 4), F(1, 2), F(1)):
            p, ok = ville_bound(sp, proc, alpha)
            hits += p > 0
            if not (ok and p <= alpha):
                bad.append(f"#{i} alpha={alpha}: {_fmt(p)}")
    r.add(f"sup probability <= alpha on {count} processes", not bad, "; ".join(bad[:5]))
    r.add("some thresholds are reached with positive probability", hits > 0, f"{hits} positive")
    return r


# --- 9 ---------------------------------------------------------------------------------


def random_two_round(rng: random.Random, tag: str):
    size = rng.randint(2, 3)
    if rng.random() < 0.7:
        sp, _ = random_sequential_cone(rng, size, 2, seed_tag=tag)
        return sp
    table = {}
    for s in [()] + [(y,) for y in range(size)]:
        k = rng.randint(1, 3)
        table[s] = Explicit(tuple(tuple(rand_q(rng, -4, 4, 2) for _ in range(size)) for _ in range(k)))
    return SequentialSpace([f"y{i}" for i in range(size)], 2, table)


def criterion_9(count: int = 200) -> CriterionResult:
    r = CriterionResult(9, "tower property on two-round spaces")
    rng = random.Random(SEED + 9)
    bad = []
    for i in range(count):
        sp = random_two_round(rng, f"c9-{i}")
        X = random_leaf_table(rng, sp)
        inner = tuple(conditional_upper(sp, X, (y,)) for y in range(sp.size))
        nested = upper_expectation(sp.space_at(()), inner)
        flat = upper_expectation(global_space(sp), tuple(X[s] for s in sp.leaves()))
        if nested != flat:
            bad.append(f"#{i}: {_fmt(nested)} vs {_fmt(flat)}")
    r.add(f"nested price equals the global price on {count} instances", not bad, "; ".join(bad[:5]))
    return r


# --- 10 --------------------------------------------------------------------------------


def criterion_10() -> CriterionResult:
    r = CriterionResult(10, "online learning with two experts")
    v = minimax_regret(zero_one_experts(1))
    r.add("T=1 minimax regret = 1/2", v == F(1, 2), _fmt(v))
    tol = F(1, 2**32)
    bad = [T for T in range(1, 7) if not check_admissible(g := zero_one_experts(T), exp_weights_relaxation(g), tol).admissible]
    r.add("exponential weights admissible within 2^-32 for T <= 6", not bad, f"failing T: {bad}")
    bad = []
    for T in range(1, 9):
        g = zero_one_experts(T)
        rep = master_bound_check(g, exp_weights_relaxation(g))
        if not rep.passes or rep.sequences != 2**T:
            bad.append(T)
    r.add("master bound on all 2^T sequences for T <= 8", not bad, f"failing T: {bad}")
    bad = [T for T in range(1, 7) if not check_admissible(g := zero_one_experts(T), doob_relaxation(g), 0).admissible]
    r.add("Doob relaxation admissible at tolerance 0", not bad, f"failing T: {bad}")
    return r


# --- 11 --------------------------------------------------------------------------------


def criterion_11() -> CriterionResult:
    r = CriterionResult(11, "CLT non-uniformity family")
    res = clt_counterexample(10, F(9, 10))
    r.add("least k is 10", res.k == 10, str(res.k))
    r.add("P(sum <= 0) >= 9/10", res.prob_at_zero >= F(9, 10), _fmt(res.prob_at_zero))
    ys = (F(-1), F(0), F(res.k))
    mean = sum((p * y for p, y in zip(res.kernel, ys)), F(0))
    second = sum((p * y * y for p, y in zip(res.kernel, ys)), F(0))
    r.add("kernel has mean 0 and second moment 1", mean == 0 and second == 1 and sum(res.kernel) == 1)
    r.add("kernel is sequentially consistent", res.consistent)
    r.add("gap from 1/2 is at least 2/5", res.gap >= F(2, 5), _fmt(res.gap))
    return r


# --- 12 --------------------------------------------------------------------------------


def criterion_12(spaces: int = 50, samples: int = 200) -> CriterionResult:
    r = CriterionResult(12, "axioms E1-E4 on positive-linear arbitrage-free spaces")
    rng = random.Random(SEED + 12)
    bad = []
    for i in range(spaces):
        n = rng.randint(2, 4)
        p = [F(rng.randint(0 if rng.random() < 0.3 else 1, 5)) for _ in range(n)]
        if sum(p) == 0:
            p[0] = F(1)
        p = tuple(x / sum(p) for x in p)
        gens, _ = full_support_generators(rng, n, rng.randint(1, 3), p)
        sp = cone_space([f"w{j}" for j in range(n)], gens)
        rep = audit_axioms(sp, samples, seed=SEED + i)
        for name, res in rep.items():
            if res.status != "pass":
                bad.append(f"space {i} {name}: {res.status} {res.witness}")
    r.add(f"E1-E4 pass on {spaces} spaces x {samples} variables", not bad, "; ".join(bad[:3]))
    single = explicit_space(["w1", "w2"], [(1, 1)])
    v = upper_expectation(single, (0, 0))
    r.add("singleton {(1,1)} gives upper price of 0 = -1", v == -1, _fmt(v))
    return r


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}


def run(numbers=None) -> list:
    return [CRITERIA[k]() for k in (numbers or sorted(CRITERIA))]
