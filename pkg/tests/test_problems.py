import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from gtprice.extreal import INF
from gtprice.gamblespace import Cone, Explicit, Hull
from gtprice.instances import rand_vector
from gtprice.problems import (
    BettingProblem,
    OneShotProblem,
    ProblemError,
    RegretProblem,
    SequentialProblem,
    betting_outcomes,
    compile_expr,
    dump_problem,
    load_problem,
)

FAIR = """{
  "kind": "one_shot",
  "outcomes": ["T", "H"],
  "gambles": {"type": "cone", "rows": [["-1", "1"], ["1", "-1"]]},
  "variable": ["0", "1"]
}"""


def test_load_one_shot():
    p = load_problem(FAIR)
    assert isinstance(p, OneShotProblem)
    assert p.gambles == Cone(((-1, 1), (1, -1)))
    assert p.variable == (0, 1)
    assert p.space.n == 2


def test_canonical_dump_round_trips_bit_exactly():
    text = dump_problem(load_problem(FAIR))
    assert dump_problem(load_problem(text)) == text


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ('{"kind": "one_shot", "outcomes": ["a"], "gambles": {"type": "cone", "rows": [[0.5]]}, "variable": ["0"]}', "inexact"),
        ('{"kind": "nope"}', "kind"),
        ('{"kind": "one_shot", "outcomes": ["a"]}', "missing"),
        ('{"kind": "one_shot", "outcomes": ["a"], "gambles": {"type": "cone", "rows": [["1", "2"]]}, "variable": ["0"]}', "entries"),
        ('{"kind": "one_shot", "outcomes": ["a"], "gambles": {"type": "cone", "rows": [["inf"]]}, "variable": ["0"]}', "real"),
        ('{"kind": "one_shot", "outcomes": ["a"], "gambles": {"type": "cone", "rows": []}, "variable": ["1/0"]}', "zero"),
        ("[1, 2", "line 1"),
    ],
)
def test_rejects_bad_files(doc, fragment):
    with pytest.raises(ProblemError) as err:
        load_problem(doc)
    assert fragment in str(err.value)


def test_parse_error_position():
    with pytest.raises(ProblemError) as err:
        load_problem('{\n  "kind": "one_shot",\n  "outcomes": [1.25]\n}')
    assert (err.value.line, err.value.column) == (3, 16)


def _one_shot(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    kind = rng.choice([Explicit, Cone, Hull])
    rows = [rand_vector(rng, n) for _ in range(rng.randint(0, 3))]
    if kind is Explicit and rows and rng.random() < 0.5:
        rows[0] = (INF,) + rows[0][1:]
    var = list(rand_vector(rng, n))
    if rng.random() < 0.3:
        var[0] = INF
    return OneShotProblem(tuple(f"o{i}" for i in range(n)), kind(tuple(rows)), tuple(var))


@given(st.integers(0, 10**6))
def test_one_shot_round_trip(seed):
    p = _one_shot(seed)
    assert load_problem(dump_problem(p)) == p


def test_other_kinds_round_trip():
    problems = [
        SequentialProblem(("L", "W"), 2, (Cone(((-1, 1),)), Explicit(((0, 0),))), (F(0), F(1)), leaves=(F(0),) * 4),
        SequentialProblem(("a", "b"), 1, (Hull(((1, -1),)),), (F(-1), F(1)), expr="y[0] * 2"),
        BettingProblem(("constant_fraction", (("fraction", F(1, 3)),)), F(2), ("inline", (F(1), F(-1, 2)))),
        BettingProblem(("kt", ()), None, ("file", "ys.txt")),
        BettingProblem(("zero", ()), None, ("seed", 3, 5, (F(-1), F(1)))),
        RegretProblem(("0", "1"), ("0", "1"), ((F(0), F(1)), (F(1), F(0))), 3, "doob"),
    ]
    for p in problems:
        text = dump_problem(p)
        assert load_problem(text) == p
        assert dump_problem(load_problem(text)) == text


def test_sequential_defaults_values_from_numeric_alphabet():
    doc = {"kind": "sequential", "alphabet": ["-1", "1"], "horizon": 1,
           "gambles": {"type": "cone", "rows": [["-1", "1"]]}, "variable": {"expr": "y[0]"}}
    p = load_problem(json.dumps(doc))
    assert p.values == (-1, 1)
    doc["alphabet"] = ["L", "W"]
    assert load_problem(json.dumps(doc)).values == (0, 1)


def test_betting_outcome_sources(tmp_path):
    (tmp_path / "ys.txt").write_text("1 -1/2\n0\n")
    p = BettingProblem(("kt", ()), None, ("file", "ys.txt"))
    assert betting_outcomes(p, tmp_path) == (1, F(-1, 2), 0)
    seeded = BettingProblem(("kt", ()), None, ("seed", 9, 6, (F(-1), F(1))))
    assert betting_outcomes(seeded) == betting_outcomes(seeded)
    assert len(betting_outcomes(seeded)) == 6
    with pytest.raises(ProblemError):
        betting_outcomes(BettingProblem(("kt", ()), None, ("file", "missing.txt")), tmp_path)


def test_expressions():
    f = compile_expr("100 if sum(y) == 2 else 0")
    assert f((1, 1), 2) == 100 and f((0, 1), 2) == 0
    g = compile_expr("max(y) - min(y) + abs(y[0]) / T")
    assert g((F(-1), F(3)), 2) == 4 + F(1, 2)
    h = compile_expr("(sum(y) >= 1) and not (y[0] < 0)")
    assert h((1, 0), 2) == 1 and h((-1, 2), 2) == 0
    assert compile_expr("2 ** 3 - len(y)")((0, 0), 2) == 6


@pytest.mark.parametrize("src", ["__import__('os')", "y.__class__", "open('x')", "1.5", "2 ** y[0]", "2 ** 100000", "lambda: 1", "1 / (y[0] - 1/2)", "y[3]"])
def test_expressions_are_sandboxed(src):
    with pytest.raises(ProblemError):
        compile_expr(src)((F(1, 2),), 1)
