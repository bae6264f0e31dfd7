import io
import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

from gtprice import cli

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    return code, json.loads(out) if out else None, err


def test_price_fair_coin():
    code, r, _ = run_json("price", PROBLEMS / "fair_coin.json")
    assert code == 0
    assert set(r["chain"].values()) == {"1/2"}
    assert r["delta0_vertices"] == [["1/2", "1/2"]]
    assert r["certificate"]["coefficients"] == ["1/2", "0"]
    assert r["minimax_gap"] == "0"


def test_price_text_report_shows_strict_chain():
    code, out, _ = run("price", PROBLEMS / "two_gambles.json")
    assert code == 0
    assert "ordering: -1 < 2/3 < inf > -inf < -2/3 < 1" in out
    assert "consistent set: empty" in out
    assert "minimax gap (upper_g - upper_p): 5/3" in out
    assert cli.lint_text(out) == []


def test_price_variable_override():
    code, r, _ = run_json("price", PROBLEMS / "fair_coin.json", "--variable", "1,0")
    assert code == 0 and r["variable"] == ["1", "0"]
    code, _, err = run("price", PROBLEMS / "fair_coin.json", "--variable", "1,0,2")
    assert code == 2 and "entries" in err


def test_price_with_infinite_variable(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({
        "kind": "one_shot", "outcomes": ["a", "b"],
        "gambles": {"type": "explicit", "rows": [["inf", "-1"]]}, "variable": ["5", "0"],
    }))
    code, r, _ = run_json("price", f)
    assert code == 0 and r["chain"]["upper_g"] == "1"
    code, r, _ = run_json("price", f, "--variable", "inf,0")
    assert code == 0 and r["chain"]["upper_g"] == "inf" and r["certificate"] is None


def test_malformed_file_exit_code(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"kind": "one_shot",\n "outcomes": ["a", "b"],,}')
    code, out, err = run("price", f)
    assert code == 2 and out == ""
    assert "line 2" in err and "column" in err
    code, _, err = run("price", tmp_path / "missing.json")
    assert code == 2 and "cannot read" in err
    code, _, err = run("seq", PROBLEMS / "fair_coin.json")
    assert code == 2 and "expected a sequential problem" in err


def test_theorem_failure_exit_code(monkeypatch):
    def broken(space, X):
        raise cli.TheoremViolation("price chain out of order")

    monkeypatch.setattr(cli, "price_chain", broken)
    code, out, err = run("price", PROBLEMS / "fair_coin.json")
    assert code == 1 and "check failed" in err and "check failed" in out


def test_seq_pascal_fermat():
    code, r, _ = run_json("seq", PROBLEMS / "pascal_fermat.json")
    assert code == 0
    assert (r["gambler_value"], r["world_value"], r["gap"]) == ("25", "25", "0")
    stakes = {row["situation"]: row["gamble"][1] for row in r["strategy"]}
    assert stakes == {"()": "25", "L": "0", "W": "50"}
    assert all(k["p"] == ["1/2", "1/2"] for k in r["kernel"])
    code, out, _ = run("seq", PROBLEMS / "pascal_fermat.json")
    assert "gambler value: 25" in out


def test_seq_parallel_matches_serial():
    a = run("seq", PROBLEMS / "pascal_fermat.json")
    b = run("seq", PROBLEMS / "pascal_fermat.json", "--parallel")
    assert a == b


def test_seq_leaves_and_node_cap(tmp_path, monkeypatch):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({
        "kind": "sequential", "alphabet": ["L", "W"], "horizon": 2,
        "gambles": {"type": "cone", "rows": [["-1", "1"], ["1", "-1"]]},
        "variable": {"leaves": ["0", "50", "50", "100"]},
    }))
    code, r, _ = run_json("seq", f)
    assert code == 0 and r["gambler_value"] == "50"
    monkeypatch.setenv("GW_NODE_CAP", "3")
    code, _, err = run("seq", f)
    assert code == 2 and "cap" in err


def test_seq_inconsistent_node_is_input_error(tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({
        "kind": "sequential", "alphabet": ["a", "b"], "horizon": 1,
        "gambles": {"type": "explicit", "rows": [["1", "1"]]},
        "variable": {"leaves": ["0", "1"]},
    }))
    code, _, err = run("seq", f)
    assert code == 2 and "no consistent measure" in err


def test_simulate_kt_table():
    code, out, _ = run("simulate", PROBLEMS / "kt.json")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1].split("\t") == ["t", "y_t", "stake", "C_t", "E_t", "log_C_t"]
    rows = [l.split("\t") for l in lines[2:]]
    assert len(rows) == 11 and all(len(r) == 6 for r in rows)
    assert rows[3][:5] == ["3", "-1", "1", "1/2", "1/3"]
    assert rows[3][5] == "~[-0.693148, -0.693147]"
    assert cli.lint_text(out) == []


def test_simulate_json_bounds_and_azuma():
    code, r, _ = run_json("simulate", PROBLEMS / "azuma.json")
    assert code == 0
    assert cli.lint_json(r) == []
    row = r["rows"][0]
    lo, hi = F(row["log_capital"]["lo"]), F(row["log_capital"]["hi"])
    assert lo <= F(-1, 8) <= hi
    assert F(r["fraction_bounds"]["lo"]) <= F(r["fraction"]) <= F(r["fraction_bounds"]["hi"])


def test_simulate_inline_and_errors(tmp_path):
    f = tmp_path / "b.json"
    f.write_text(json.dumps({"kind": "betting", "strategy": {"name": "constant_fraction", "fraction": "1"},
                             "outcomes": {"inline": ["-1", "1"]}}))
    code, r, _ = run_json("simulate", f)
    assert code == 0 and [x["capital"] for x in r["rows"]] == ["1", "0", "0"]
    assert r["rows"][1]["log_capital"] == "-inf"
    f.write_text(json.dumps({"kind": "betting", "strategy": {"name": "martingale"}, "outcomes": {"inline": ["1"]}}))
    code, _, err = run("simulate", f)
    assert code == 2 and "unknown strategy" in err
    f.write_text(json.dumps({"kind": "betting", "strategy": {"name": "kt"}, "outcomes": {"inline": ["2"]}}))
    code, _, err = run("simulate", f)
    assert code == 2 and "[-1, 1]" in err


def test_regret():
    code, r, _ = run_json("regret", PROBLEMS / "experts.json")
    assert code == 0
    assert r["minimax_regret"] == "3/4"
    assert r["admissible"] and r["master"]["passes"]
    assert not r["root_is_exact"]
    code, out, _ = run("regret", PROBLEMS / "experts.json")
    assert "rational upper bound" in out


def test_regret_rejects_unbounded_losses(tmp_path):
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"kind": "regret", "actions": ["a"], "alphabet": ["x"], "loss": [["2"]], "horizon": 1}))
    code, _, err = run("regret", f)
    assert code == 2 and "loss" in err


def test_geometry_crossing_gambles():
    code, r, _ = run_json("geometry", PROBLEMS / "crossing_gambles.json")
    assert code == 0
    conv = r["levels"]["conv_dcl"]
    assert {(tuple(h["normal"]), h["rhs"]) for h in conv["halfspaces"]} == {
        (("0", "1"), "2"), (("1", "0"), "2"), (("1", "1"), "1")}
    assert r["levels"]["dcl_closure"]["apexes"] == [["2", "-1"], ["-1", "2"]]
    assert r["levels"]["polar_polar"]["halfspaces"] == []
    code, out, _ = run("geometry", PROBLEMS / "fair_coin.json", "--level", "polar_polar")
    assert "halfspace\t1\t1\t<=\t0" in out and "[conv_dcl]" not in out


def test_selftest_subset():
    code, out, _ = run("selftest", "--criteria", "1,2")
    assert code == 0
    assert out.splitlines() == [
        "[PASS] criterion  1: fair and biased coin prices",
        "[PASS] criterion  2: outcome-interval cubic on a five-point grid",
    ]
    code, _, err = run("selftest", "--criteria", "99")
    assert code == 2


def test_linters():
    assert cli.lint_text("value 1/2\nbound ~[0.5, 0.75]") == []
    assert cli.lint_text("value 0.5") == ["line 1: value 0.5"]
    assert cli.lint_text("value 1e-3")
    assert cli.lint_json({"a": ["1/2", {"lo": "1", "hi": "2"}]}) == []
    assert cli.lint_json({"a": 0.5})
    assert cli.lint_json({"b": {"lo": "0.5", "hi": "1"}})
    assert cli.bound_label(F(-1, 3), F(1, 3), 3) == "~[-0.334, 0.334]"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gtprice", "price", str(PROBLEMS / "fair_coin.json"), "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["chain"]["upper_g"] == "1/2"
