"""Problem files: JSON documents with exact numbers written as strings.

Numbers are ``"n"``, ``"p/q"``, ``"inf"`` or ``"-inf"`` (bare JSON integers
are accepted too; JSON floats are rejected).  ``dump_problem`` writes the
canonical form, and ``load_problem(dump_problem(p)) == p``.

Kinds and fields::

    one_shot    outcomes, gambles{type, rows}, variable
    sequential  alphabet, horizon, gambles{type, rows} or gambles{by_depth: [...]},
                variable{leaves: [...]} or variable{expr: "..."}, optional values
    betting     strategy{name, ...}, optional initial, outcomes{inline | file | seed+length}
    regret      actions, alphabet, loss, horizon, optional relaxation
"""

from __future__ import annotations

import ast
import json
import operator
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .extreal import ext, format_ext, is_finite
from .gamblespace import Cone, Explicit, GambleSpace, Hull

KINDS = ("one_shot", "sequential", "betting", "regret")
GAMBLE_TYPES = {"explicit": Explicit, "cone": Cone, "hull": Hull}


class ProblemError(ValueError):
    """Input error; ``line``/``column`` point into the file when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


_TOKEN = re.compile(r'"(?:\\.|[^"\\])*"|-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?|NaN|-?Infinity')


class _Inexact(Exception):
    pass


def _reject_float(text: str):
    raise _Inexact(text)


def _position(text: str, offset: int) -> tuple:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def parse_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as e:
        raise ProblemError(e.msg, e.lineno, e.colno) from None
    except _Inexact as e:
        for m in _TOKEN.finditer(text):
            tok = m.group()
            if not tok.startswith('"') and not tok.lstrip("-").isdigit():
                msg = f'inexact number {tok}; write it as a string like "1/3"'
                raise ProblemError(msg, *_position(text, m.start())) from None
        raise ProblemError(f"inexact number {e}") from None


def _num(v, where: str):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ProblemError(f"{where}: expected a number string, got {v!r}")
    try:
        return ext(v)
    except (ValueError, TypeError) as e:
        raise ProblemError(f"{where}: {e}") from None


def _row(v, where: str) -> tuple:
    if not isinstance(v, list):
        raise ProblemError(f"{where}: expected a list")
    return tuple(_num(x, f"{where}[{i}]") for i, x in enumerate(v))


def _require(doc: dict, key: str, kind: str):
    if key not in doc:
        raise ProblemError(f"{kind} problem is missing '{key}'")
    return doc[key]


def _labels(v, where: str) -> tuple:
    if not isinstance(v, list) or not v or not all(isinstance(x, str) for x in v):
        raise ProblemError(f"{where}: expected a nonempty list of strings")
    return tuple(v)


def _gamble_set(doc, where: str, width: int):
    if not isinstance(doc, dict):
        raise ProblemError(f"{where}: expected an object")
    kind = doc.get("type")
    if kind not in GAMBLE_TYPES:
        raise ProblemError(f"{where}.type must be one of {sorted(GAMBLE_TYPES)}")
    rows = doc.get("rows")
    if not isinstance(rows, list):
        raise ProblemError(f"{where}.rows must be a list")
    parsed = tuple(_row(r, f"{where}.rows[{i}]") for i, r in enumerate(rows))
    for i, r in enumerate(parsed):
        if len(r) != width:
            raise ProblemError(f"{where}.rows[{i}] has {len(r)} entries, expected {width}")
    try:
        return GAMBLE_TYPES[kind](parsed)
    except ValueError as e:
        raise ProblemError(f"{where}: {e}") from None


def _dump_gambles(gs) -> dict:
    kind = {Explicit: "explicit", Cone: "cone", Hull: "hull"}[type(gs)]
    return {"type": kind, "rows": [[format_ext(x) for x in r] for r in gs.rows]}


@dataclass(frozen=True)
class OneShotProblem:
    outcomes: tuple
    gambles: Any
    variable: tuple

    @property
    def space(self) -> GambleSpace:
        return GambleSpace(self.outcomes, self.gambles)


@dataclass(frozen=True)
class SequentialProblem:
    alphabet: tuple
    horizon: int
    gambles: tuple  # one gamble set per depth
    values: tuple
    leaves: tuple | None = None
    expr: str | None = None


@dataclass(frozen=True)
class BettingProblem:
    strategy: tuple  # (name, sorted params)
    initial: Fraction | None  # None: the strategy's default
    source: tuple  # ("inline", ys) | ("file", path) | ("seed", seed, length, support)


@dataclass(frozen=True)
class RegretProblem:
    actions: tuple
    alphabet: tuple
    loss: tuple
    horizon: int
    relaxation: str = "exp_weights"


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ProblemError(f"{where}: expected an integer")
    return v


def load_problem(text: str):
    doc = parse_json(text)
    if not isinstance(doc, dict):
        raise ProblemError("problem file must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ProblemError(f"'kind' must be one of {KINDS}")
    if kind == "one_shot":
        outcomes = _labels(_require(doc, "outcomes", kind), "outcomes")
        gs = _gamble_set(_require(doc, "gambles", kind), "gambles", len(outcomes))
        var = _row(_require(doc, "variable", kind), "variable")
        if len(var) != len(outcomes):
            raise ProblemError(f"variable has {len(var)} entries for {len(outcomes)} outcomes")
        return OneShotProblem(outcomes, gs, var)
    if kind == "sequential":
        alphabet = _labels(_require(doc, "alphabet", kind), "alphabet")
        horizon = _int(_require(doc, "horizon", kind), "horizon")
        if horizon < 1:
            raise ProblemError("horizon must be at least 1")
        g = _require(doc, "gambles", kind)
        if isinstance(g, dict) and "by_depth" in g:
            sets = g["by_depth"]
            if not isinstance(sets, list) or len(sets) != horizon:
                raise ProblemError("gambles.by_depth needs one entry per round")
            gambles = tuple(_gamble_set(s, f"gambles.by_depth[{i}]", len(alphabet)) for i, s in enumerate(sets))
        else:
            one = _gamble_set(g, "gambles", len(alphabet))
            gambles = (one,) * horizon
        if "values" in doc:
            values = _row(doc["values"], "values")
        else:
            try:
                values = tuple(ext(a) for a in alphabet)
            except (ValueError, TypeError):
                values = tuple(Fraction(i) for i in range(len(alphabet)))
        if len(values) != len(alphabet) or not all(is_finite(v) for v in values):
            raise ProblemError("values must give one finite number per alphabet label")
        var = _require(doc, "variable", kind)
        if not isinstance(var, dict) or len(var) != 1 or not ({"leaves", "expr"} & set(var)):
            raise ProblemError("variable must be {\"leaves\": [...]} or {\"expr\": \"...\"}")
        if "leaves" in var:
            leaves = _row(var["leaves"], "variable.leaves")
            if len(leaves) != len(alphabet) ** horizon:
                raise ProblemError(f"variable.leaves needs {len(alphabet) ** horizon} entries")
            return SequentialProblem(alphabet, horizon, gambles, values, leaves=leaves)
        expr = var["expr"]
        if not isinstance(expr, str):
            raise ProblemError("variable.expr must be a string")
        compile_expr(expr)
        return SequentialProblem(alphabet, horizon, gambles, values, expr=expr)
    if kind == "betting":
        st = _require(doc, "strategy", kind)
        if not isinstance(st, dict) or not isinstance(st.get("name"), str):
            raise ProblemError("strategy must be an object with a 'name'")
        params = []
        for key in sorted(st):
            if key == "name":
                continue
            params.append((key, _num(st[key], f"strategy.{key}")))
        initial = _num(doc["initial"], "initial") if "initial" in doc else None
        src = _require(doc, "outcomes", kind)
        if not isinstance(src, dict) or len(src) == 0:
            raise ProblemError("outcomes must be an object")
        if "inline" in src:
            source = ("inline", _row(src["inline"], "outcomes.inline"))
        elif "file" in src:
            if not isinstance(src["file"], str):
                raise ProblemError("outcomes.file must be a path string")
            source = ("file", src["file"])
        elif "seed" in src:
            support = _row(src.get("support", ["-1", "1"]), "outcomes.support")
            source = ("seed", _int(src["seed"], "outcomes.seed"), _int(src.get("length"), "outcomes.length"), support)
        else:
            raise ProblemError("outcomes needs one of inline, file, seed")
        return BettingProblem((st["name"], tuple(params)), initial, source)
    actions = _labels(_require(doc, "actions", kind), "actions")
    alphabet = _labels(_require(doc, "alphabet", kind), "alphabet")
    loss = _require(doc, "loss", kind)
    if not isinstance(loss, list) or len(loss) != len(actions):
        raise ProblemError("loss needs one row per action")
    rows = tuple(_row(r, f"loss[{i}]") for i, r in enumerate(loss))
    if any(len(r) != len(alphabet) for r in rows) or not all(is_finite(v) for r in rows for v in r):
        raise ProblemError("loss rows must have one finite entry per outcome")
    relax = doc.get("relaxation", "exp_weights")
    if relax not in ("exp_weights", "doob"):
        raise ProblemError("relaxation must be 'exp_weights' or 'doob'")
    return RegretProblem(actions, alphabet, rows, _int(_require(doc, "horizon", kind), "horizon"), relax)


def _fmts(row) -> list:
    return [format_ext(x) for x in row]


def dump_problem(p) -> str:
    if isinstance(p, OneShotProblem):
        doc = {"kind": "one_shot", "outcomes": list(p.outcomes), "gambles": _dump_gambles(p.gambles), "variable": _fmts(p.variable)}
    elif isinstance(p, SequentialProblem):
        doc = {"kind": "sequential", "alphabet": list(p.alphabet), "horizon": p.horizon}
        if all(g == p.gambles[0] for g in p.gambles):
            doc["gambles"] = _dump_gambles(p.gambles[0])
        else:
            doc["gambles"] = {"by_depth": [_dump_gambles(g) for g in p.gambles]}
        doc["values"] = _fmts(p.values)
        doc["variable"] = {"leaves": _fmts(p.leaves)} if p.leaves is not None else {"expr": p.expr}
    elif isinstance(p, BettingProblem):
        st = {"name": p.strategy[0]}
        st.update({k: format_ext(v) for k, v in p.strategy[1]})
        if p.source[0] == "inline":
            src = {"inline": _fmts(p.source[1])}
        elif p.source[0] == "file":
            src = {"file": p.source[1]}
        else:
            src = {"seed": p.source[1], "length": p.source[2], "support": _fmts(p.source[3])}
        doc = {"kind": "betting", "strategy": st}
        if p.initial is not None:
            doc["initial"] = format_ext(p.initial)
        doc["outcomes"] = src
    elif isinstance(p, RegretProblem):
        doc = {
            "kind": "regret",
            "actions": list(p.actions),
            "alphabet": list(p.alphabet),
            "loss": [_fmts(r) for r in p.loss],
            "horizon": p.horizon,
            "relaxation": p.relaxation,
        }
    else:
        raise TypeError(f"not a problem: {p!r}")
    return json.dumps(doc, indent=2) + "\n"


def read_problem(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ProblemError(f"cannot read {path}: {e.strerror}") from None
    return load_problem(text)


def betting_outcomes(p: BettingProblem, base: Path | None = None) -> tuple:
    kind = p.source[0]
    if kind == "inline":
        return p.source[1]
    if kind == "file":
        path = Path(p.source[1])
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            tokens = path.read_text().split()
        except OSError as e:
            raise ProblemError(f"cannot read {path}: {e.strerror}") from None
        return tuple(_num(t, f"{path}") for t in tokens)
    _, seed, length, support = p.source
    rng = random.Random(seed)
    return tuple(rng.choice(support) for _ in range(length))


# --- leaf expressions ---------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_CMPS = {
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
}
_FUNCS = {"sum": lambda xs: sum(xs, Fraction(0)), "min": min, "max": max, "abs": abs, "len": len}


def compile_expr(source: str):
    """Compile a leaf expression over ``y`` (outcome values) and ``T``.

    Allowed: numbers, arithmetic, comparisons (true is 1), ``and``/``or``/
    ``not``, ``a if c else b``, tuples, ``y[i]`` and sum/min/max/abs/len.
    """
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as e:
        raise ProblemError(f"bad expression: {e.msg}", 1, e.offset) from None

    def ev(node, env):
        if isinstance(node, ast.Expression):
            return ev(node.body, env)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        if isinstance(node, ast.Name) and node.id in env:
            return env[node.id]
        if isinstance(node, ast.Tuple):
            return tuple(ev(e, env) for e in node.elts)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            a, b = ev(node.left, env), ev(node.right, env)
            if isinstance(node.op, ast.Pow) and (not isinstance(b, Fraction) or b.denominator != 1 or abs(b) > 256):
                raise ProblemError("exponents must be integers of size at most 256")
            return Fraction(_BINOPS[type(node.op)](a, b))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand, env)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
            return Fraction(int(not ev(node.operand, env)))
        if isinstance(node, ast.BoolOp):
            vals = [bool(ev(v, env)) for v in node.values]
            return Fraction(int(all(vals) if isinstance(node.op, ast.And) else any(vals)))
        if isinstance(node, ast.Compare):
            left = ev(node.left, env)
            for op, comp in zip(node.ops, node.comparators):
                if type(op) not in _CMPS:
                    raise ProblemError("unsupported comparison")
                right = ev(comp, env)
                if not _CMPS[type(op)](left, right):
                    return Fraction(0)
                left = right
            return Fraction(1)
        if isinstance(node, ast.IfExp):
            return ev(node.body, env) if ev(node.test, env) else ev(node.orelse, env)
        if isinstance(node, ast.Subscript) and isinstance(node.value, ast.Name) and node.value.id == "y":
            idx = ev(node.slice, env)
            return env["y"][int(idx)]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            args = [ev(a, env) for a in node.args]
            return Fraction(_FUNCS[node.func.id](*args)) if node.func.id != "len" else Fraction(len(args[0]))
        raise ProblemError(f"unsupported expression element: {ast.dump(node)[:60]}")

    def fn(y: tuple, T: int) -> Fraction:
        try:
            return ev(tree, {"y": tuple(y), "T": Fraction(T)})
        except (ZeroDivisionError, IndexError, TypeError, ValueError) as e:
            if isinstance(e, ProblemError):
                raise
            shown = ", ".join(str(v) for v in y)
            raise ProblemError(f"expression failed at y = ({shown}): {e}") from None

    return fn
