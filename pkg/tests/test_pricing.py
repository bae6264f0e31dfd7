import random
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy.optimize import linprog

from gtprice.extreal import INF, NEG_INF, sub_pessimistic
from gtprice.gamblespace import Cone, delta0_polytope, explicit_space
from gtprice.instances import (
    CUBIC_GRID,
    biased_coin,
    crossing_gambles,
    lopsided_gambles,
    fair_coin,
    outcome_interval_grid,
    random_full_support_cone,
    random_one_shot,
)
from gtprice.pricing import (
    LEVELS,
    NoFiniteCertificate,
    audit_axioms,
    char_lower_leq_upper,
    consistent_upper,
    consistent_upper_argmax,
    effective_gambles,
    lower_expectation,
    lower_probability,
    measure_upper,
    measure_upper_argmax,
    minimax_gap,
    price_chain,
    replication_certificate,
    upper_expectation,
    upper_probability,
)
from gtprice.ratlp import enumerate_vertices


def test_fair_coin():
    s = fair_coin()
    assert upper_probability(s, ["H"]) == F(1, 2)
    assert lower_probability(s, ["H"]) == F(1, 2)
    cert = replication_certificate(s, (0, 1))
    assert cert.alpha == F(1, 2) and cert.coefficients == (F(1, 2), 0)
    assert cert.covers((0, 1))
    assert price_chain(s, (0, 1)).as_list() == [F(1, 2)] * 6


@pytest.mark.parametrize("eps", [F(1, 8), F(1, 4), F(1, 2)])
def test_biased_coin(eps):
    s = biased_coin(eps)
    assert upper_probability(s, ["H"]) == F(1, 2) + eps
    assert lower_probability(s, ["H"]) == F(1, 2) + eps


def test_cubic_on_grid():
    s = outcome_interval_grid()
    X = tuple(w**3 for w in CUBIC_GRID)
    assert upper_expectation(s, X) == F(1, 4)
    assert lower_expectation(s, X) == F(-1, 4)
    cert = replication_certificate(s, X)
    assert cert.coefficients == (F(3, 4), 0)


def test_crossing_gambles():
    s = crossing_gambles()
    assert not char_lower_leq_upper(s)
    chain = price_chain(s, (0, 0))
    assert chain.upper_g == 1 and chain.lower_g == -1
    assert chain.upper_p == F(-1, 2) and chain.lower_p == F(1, 2)
    assert chain.upper_p0 == NEG_INF and chain.lower_p0 == INF


def test_lopsided_gambles():
    s = lopsided_gambles()
    assert char_lower_leq_upper(s)
    value, q = measure_upper_argmax(s, (0, 0))
    assert value == F(-2, 3) and q == (F(4, 9), F(5, 9))
    chain = price_chain(s, (0, 0))
    assert (chain.lower_g, chain.upper_g) == (-1, 1)
    assert minimax_gap(s, (0, 0)) == F(5, 3)
    assert not chain.delta0_nonempty


def test_explicit_upper_matches_direct_formula():
    # independent route: the defining min-max formula with pessimistic differences
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randint(1, 4)
        pool = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(6)] + [INF]
        gambles = [tuple(rng.choice(pool) for _ in range(n)) for _ in range(rng.randint(0, 3))]
        X = tuple(rng.choice(pool + [NEG_INF]) for _ in range(n))
        s = explicit_space([f"w{i}" for i in range(n)], gambles)
        direct = min((max(sub_pessimistic(x, g[i]) for i, x in enumerate(X)) for g in s.gambles.rows), default=INF)
        assert upper_expectation(s, X) == direct


def test_cone_upper_agrees_with_floating_point_lp():
    rng = random.Random(9)
    checked = 0
    for _ in range(120):
        s = random_one_shot(rng)
        if not isinstance(s.gambles, Cone):
            continue
        X = tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(s.n))
        gens = s.gambles.rows
        k = len(gens)
        # min a  s.t.  a + sum c_j g_j(w) >= X(w), c >= 0
        A = [[-1.0] + [-float(g[w]) for g in gens] for w in range(s.n)]
        b = [-float(x) for x in X]
        ref = linprog([1.0] + [0.0] * k, A_ub=A, b_ub=b, bounds=[(None, None)] + [(0, None)] * k, method="highs")
        got = upper_expectation(s, X)
        if ref.status == 3:
            assert got == NEG_INF
        else:
            assert ref.status == 0 and abs(float(got) - ref.fun) < 1e-7
        checked += 1
    assert checked > 20


def test_consistent_upper_matches_vertices():
    rng = random.Random(10)
    for _ in range(80):
        s = random_one_shot(rng)
        X = tuple(F(rng.randint(-4, 4)) for _ in range(s.n))
        verts = enumerate_vertices(delta0_polytope(s))
        expected = max((sum(x * p for x, p in zip(X, v)) for v in verts), default=NEG_INF)
        assert consistent_upper(s, X) == expected
        if verts:
            value, q = consistent_upper_argmax(s, X)
            assert delta0_polytope(s).contains(q)


def test_cone_duality_on_full_support_spaces():
    rng = random.Random(12)
    for _ in range(60):
        s, _ = random_full_support_cone(rng, rng.randint(2, 4), rng.randint(1, 4))
        X = tuple(F(rng.randint(-5, 5), rng.randint(1, 2)) for _ in range(s.n))
        assert upper_expectation(s, X) == consistent_upper(s, X) == measure_upper(s, X)
        assert minimax_gap(s, X) == 0


def _spaces():
    return st.integers(0, 10**6).map(lambda seed: random_one_shot(random.Random(seed)))


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(_spaces(), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_price_chain_is_ordered(space, xs):
    X = tuple(F(x) for x in xs[: space.n])
    chain = price_chain(space, X)
    assert chain.ordering_holds()


@settings(max_examples=80, deadline=None)
@given(_spaces(), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_certificates_cover(space, xs):
    X = tuple(F(x) for x in xs[: space.n])
    try:
        cert = replication_certificate(space, X)
    except NoFiniteCertificate:
        assert upper_expectation(space, X) in (INF, NEG_INF)
        return
    assert cert.alpha == upper_expectation(space, X)
    assert cert.covers(X)


def test_certificate_requires_finite_price():
    with pytest.raises(NoFiniteCertificate):
        replication_certificate(explicit_space(["a"], []), (0,))


def test_effective_sets_fair_coin():
    for level in LEVELS:
        eff = effective_gambles(fair_coin(), level)
        assert eff.halfspaces == [((1, 1), 0)]


def test_effective_sets_reprice():
    # Gambler pricing with each effective set reproduces its level
    rng = random.Random(13)
    for _ in range(40):
        s = random_one_shot(rng)
        X = tuple(F(rng.randint(-3, 3)) for _ in range(s.n))
        eff = {lv: effective_gambles(s, lv) for lv in LEVELS}
        assert eff["dcl_closure"].upper(X) == upper_expectation(s, X)
        assert eff["polar_polar"].upper(X) == consistent_upper(s, X)
        assert consistent_upper(s, X) <= eff["conv_dcl"].upper(X) <= upper_expectation(s, X)


def test_conv_dcl_of_crossing_gambles():
    eff = effective_gambles(crossing_gambles(), "conv_dcl")
    assert sorted(eff.halfspaces) == [((0, 1), 2), ((1, 0), 2), ((1, 1), 1)]


def test_axioms():
    report = audit_axioms(fair_coin(), sample_count=30, seed=1)
    assert all(r.status == "pass" for r in report.values())
    bad = audit_axioms(explicit_space(["a", "b"], [(1, -1)]), sample_count=30, seed=1)
    assert bad["E4"].status == "fail" and bad["E4"].witness["X"] == ["0", "0"]
    assert bad["E2"].status == "fail"
    assert bad["E1"].status == "not applicable"
