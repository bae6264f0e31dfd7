import itertools
import random
from fractions import Fraction as F

import pytest
import sympy
from scipy.optimize import linprog

from gtprice.ratlp import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    Constraint,
    DimensionCap,
    LinearProgram,
    Polytope,
    certify,
    dual_value,
    enumerate_vertices,
    lp_from_rows,
    matrix_rank,
    simplex_constraints,
    solve_linear_system,
    solve_lp,
)


def test_small_lp_with_duals():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0
    lp = LinearProgram([1, 1], "max", bounds=[(0, None), (0, None)])
    lp.add([1, 2], LE, 4).add([3, 1], LE, 6)
    res = solve_lp(lp)
    assert res.status == OPTIMAL
    assert res.value == F(14, 5)
    assert res.point == (F(8, 5), F(6, 5))
    assert certify(lp, res)
    assert dual_value(lp, res.dual) == res.value


def test_infeasible_and_unbounded():
    lp = LinearProgram([1], "min", bounds=[(0, None)])
    lp.add([1], LE, -1)
    assert solve_lp(lp).status == INFEASIBLE
    lp = LinearProgram([1, 0], "max", bounds=[(0, None), (0, None)])
    lp.add([1, -1], LE, 1)
    assert solve_lp(lp).status == UNBOUNDED


def test_free_variables_and_equalities():
    lp = LinearProgram([1, -1], "min")
    lp.add([1, 1], EQ, 2).add([1, -1], GE, -4)
    res = solve_lp(lp)
    assert res.value == -4
    assert certify(lp, res)


def test_lexicographic_tie_break():
    # every point of the segment x + y = 1 is optimal; lexmin picks (0, 1)
    lp = LinearProgram([1, 1], "min", bounds=[(0, None), (0, None)])
    lp.add([1, 1], GE, 1)
    res = solve_lp(lp, lexicographic=True)
    assert res.point == (0, 1)


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule
    lp = LinearProgram([F(-3, 4), 150, F(-1, 50), 6], "min", bounds=[(0, None)] * 4)
    lp.add([F(1, 4), -60, F(-1, 25), 9], LE, 0)
    lp.add([F(1, 2), -90, F(-1, 50), 3], LE, 0)
    lp.add([0, 0, 1, 0], LE, 1)
    res = solve_lp(lp)
    assert res.value == F(-1, 20)
    assert certify(lp, res)


def _rand_lp(rng):
    n = rng.randint(1, 4)
    m = rng.randint(1, 5)
    lp = LinearProgram([rng.randint(-5, 5) for _ in range(n)], rng.choice(["min", "max"]),
                       bounds=[(F(rng.randint(-3, 0)), F(rng.randint(1, 4)) if rng.random() < 0.5 else None) for _ in range(n)])
    for _ in range(m):
        lp.add([F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)], rng.choice([LE, GE, EQ, LE]), F(rng.randint(-4, 6)))
    return lp


def _scipy(lp):
    sign = 1 if lp.sense == "min" else -1
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for c in lp.constraints:
        row = [float(v) for v in c.row]
        if c.rel == LE:
            A_ub.append(row), b_ub.append(float(c.rhs))
        elif c.rel == GE:
            A_ub.append([-v for v in row]), b_ub.append(-float(c.rhs))
        else:
            A_eq.append(row), b_eq.append(float(c.rhs))
    bounds = [(None if lo is None else float(lo), None if hi is None else float(hi)) for lo, hi in lp.bounds]
    return linprog(
        [sign * float(v) for v in lp.objective],
        A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None, b_eq=b_eq or None,
        bounds=bounds, method="highs",
    ), sign


def test_random_lps_agree_with_floating_point_solver():
    rng = random.Random(11)
    seen = {OPTIMAL: 0, INFEASIBLE: 0, UNBOUNDED: 0}
    for _ in range(300):
        lp = _rand_lp(rng)
        res = solve_lp(lp)
        ref, sign = _scipy(lp)
        seen[res.status] += 1
        if res.status == OPTIMAL:
            assert ref.status == 0
            assert abs(float(res.value) - sign * ref.fun) < 1e-7
            assert certify(lp, res)
            assert lp.is_feasible_point(res.point)
        elif res.status == INFEASIBLE:
            assert ref.status == 2
        else:
            assert ref.status == 3
    assert all(seen.values()), seen


def test_lp_from_rows_folds_singletons():
    rows = [Constraint([1, 0], GE, 0), Constraint([0, 2], LE, 4), Constraint([1, 1], LE, 3)]
    lp = lp_from_rows([1, 1], "max", rows)
    assert len(lp.constraints) == 1
    assert solve_lp(lp).value == 3
    assert lp_from_rows([1], "max", [Constraint([1], GE, 2), Constraint([1], LE, 1)]) is None


def test_linear_algebra_against_sympy():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(1, 4)
        rows = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(rng.randint(1, 4))]
        assert matrix_rank(rows) == sympy.Matrix(rows).rank()
        if len(rows) == n:
            rhs = [F(rng.randint(-3, 3)) for _ in range(n)]
            x = solve_linear_system(rows, rhs)
            M = sympy.Matrix(rows)
            if M.det() == 0:
                assert x is None
            else:
                ref = M.LUsolve(sympy.Matrix(rhs))
                assert [F(str(v)) for v in ref] == list(x)


def test_simplex_vertices():
    poly = Polytope(3, simplex_constraints(3))
    assert enumerate_vertices(poly) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_vertices_of_square_with_cut():
    rows = [Constraint([1, 0], GE, 0), Constraint([1, 0], LE, 1), Constraint([0, 1], GE, 0),
            Constraint([0, 1], LE, 1), Constraint([1, 1], LE, F(3, 2))]
    verts = enumerate_vertices(Polytope(2, rows))
    assert verts == [(0, 0), (0, 1), (F(1, 2), 1), (1, 0), (1, F(1, 2))]
    # every vertex is the unique optimum of some direction, and brute force agrees
    for a, b in itertools.product(range(-2, 3), repeat=2):
        if (a, b) != (0, 0):
            best = max(a * x + b * y for x, y in verts)
            assert Polytope(2, rows).maximize([a, b]).value == best


def test_vertex_cap_and_unbounded():
    with pytest.raises(DimensionCap):
        enumerate_vertices(Polytope(9, simplex_constraints(9)))
    with pytest.raises(ValueError):
        enumerate_vertices(Polytope(1, [Constraint([1], GE, 0)]))
    empty = Polytope(1, [Constraint([1], GE, 1), Constraint([1], LE, 0)])
    assert empty.is_empty() and enumerate_vertices(empty) == []
