"""Command-line front end.

    gtprice price FILE [--variable V] [--json]
    gtprice seq FILE [--parallel] [--json]
    gtprice simulate FILE [--json]
    gtprice regret FILE [--json]
    gtprice geometry FILE [--level L] [--json]
    gtprice selftest [--criteria 1,2,...]

Exit codes: 0 success, 1 a theorem check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from . import acceptance
from .betting import azuma_strategy, constant_fraction, kt_strategy, run_capital, zero_strategy
from .extreal import format_ext, is_finite, parse_ext, sub_pessimistic
from .intervals import bracket
from .gamblespace import Cone, delta0_polytope
from .onlinelearn import (
    MAX_EXHAUSTIVE_T,
    OnlineGame,
    check_admissible,
    doob_relaxation,
    exp_weights_relaxation,
    master_bound_check,
    minimax_regret,
)
from .pricing import (
    LEVELS,
    NoFiniteCertificate,
    TheoremViolation,
    consistent_upper,
    consistent_lower,
    effective_gambles,
    lower_expectation,
    price_chain,
    replication_certificate,
    upper_expectation,
)
from .problems import (
    BettingProblem,
    OneShotProblem,
    ProblemError,
    RegretProblem,
    SequentialProblem,
    betting_outcomes,
    compile_expr,
    read_problem,
)
from .ratlp import DimensionCap, enumerate_vertices
from .sequential import InconsistentNode, NodeCapExceeded, SequentialSpace, gambler_value, world_value

OK, THEOREM, INPUT = 0, 1, 2

CHAIN_NAMES = ("lower_g", "lower_p", "lower_p0", "upper_p0", "upper_p", "upper_g")


class InputError(ValueError):
    pass


class CheckFailed(Exception):
    """A theorem check failed; carries the already-rendered report."""

    def __init__(self, message: str, payload):
        super().__init__(message)
        self.payload = payload


# --- report linting -------------------------------------------------------------------

_BOUND = re.compile(r"~\[[^\]]*\]")
_DECIMAL = re.compile(r"\d\.\d|\d[eE][-+]?\d|\bnan\b")
_EXACT = re.compile(r"^(-?inf|\+inf|-?\d+(/\d+)?)$")


def lint_text(text: str) -> list:
    """Lines that show an inexact number outside a ``~[lo, hi]`` label."""
    bad = []
    for i, line in enumerate(text.splitlines(), 1):
        if _DECIMAL.search(_BOUND.sub("", line)):
            bad.append(f"line {i}: {line.strip()}")
    return bad


def lint_json(obj, path: str = "$") -> list:
    """JSON reports carry numbers as exact strings; bounds are
    ``{"lo": r, "hi": r}`` objects with rational endpoints."""
    bad = []
    if isinstance(obj, float):
        bad.append(f"{path}: float {obj!r}")
    elif isinstance(obj, str):
        if _DECIMAL.search(obj):
            bad.append(f"{path}: inexact string {obj!r}")
    elif isinstance(obj, dict):
        if set(obj) == {"lo", "hi"}:
            ok = all(isinstance(obj[k], str) and _EXACT.match(obj[k]) for k in ("lo", "hi"))
            if not ok:
                bad.append(f"{path}: bound endpoints must be exact strings")
        for k, v in obj.items():
            bad.extend(lint_json(v, f"{path}.{k}"))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            bad.extend(lint_json(v, f"{path}[{i}]"))
    return bad


def bound_label(lo: Fraction, hi: Fraction, places: int = 6) -> str:
    """Outward-rounded decimal label for an enclosure ``[lo, hi]``."""
    scale = 10**places
    a = Decimal(math.floor(lo * scale)).scaleb(-places)
    b = Decimal(math.ceil(hi * scale)).scaleb(-places)
    return f"~[{a:.{places}f}, {b:.{places}f}]"


# --- rendering helpers --------------------------------------------------------------


def fx(v) -> str:
    return format_ext(v)


def fvec(row) -> list:
    return [fx(v) for v in row]


def tup(cells) -> str:
    return "(" + ", ".join(cells) + ")"


def relation(a, b) -> str:
    return "<" if a < b else (">" if a > b else "=")


def table(rows: list, header: list, sep: str = "  ") -> str:
    cols = [header] + rows
    widths = [max(len(str(r[i])) for r in cols) for i in range(len(header))]
    out = []
    for r in cols:
        out.append(sep.join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(out)


def log_bound(c: Fraction):
    """Certified enclosure of ``log c``: (lo, hi), or None at ``c = 0``."""
    if c <= 0:
        return None
    n, d = c.numerator, c.denominator
    return bracket(lambda iv: iv.log(iv.mpf(n) / d))


# --- price -------------------------------------------------------------------------------


def run_price(p: OneShotProblem, variable=None) -> dict:
    space = p.space
    X = tuple(variable) if variable is not None else p.variable
    if len(X) != space.n:
        raise InputError(f"variable has {len(X)} entries for {space.n} outcomes")
    out = {
        "outcomes": list(space.outcomes),
        "gambles": {"type": type(space.gambles).__name__.lower(), "rows": [fvec(r) for r in space.gambles.rows]},
        "variable": fvec(X),
    }
    ok = True
    if all(is_finite(x) for x in X):
        try:
            chain = price_chain(space, X)
        except TheoremViolation as e:
            out["error"] = str(e)
            raise CheckFailed(str(e), out) from None
        vals = chain.as_list()
        out["chain"] = dict(zip(CHAIN_NAMES, fvec(vals)))
        out["relations"] = [relation(a, b) for a, b in zip(vals, vals[1:])]
        out["delta0_nonempty"] = chain.delta0_nonempty
        out["minimax_gap"] = fx(sub_pessimistic(chain.upper_g, chain.upper_p))
    else:
        out["chain"] = {
            "lower_g": fx(lower_expectation(space, X)),
            "lower_p0": fx(consistent_lower(space, X)),
            "upper_p0": fx(consistent_upper(space, X)),
            "upper_g": fx(upper_expectation(space, X)),
        }
        out["note"] = "measure prices need a real-valued variable"
    try:
        verts = enumerate_vertices(delta0_polytope(space))
        out["delta0_vertices"] = [fvec(v) for v in verts]
        out["delta0_nonempty"] = bool(verts)
    except DimensionCap as e:
        out["delta0_vertices"] = None
        out["delta0_note"] = str(e)
    try:
        cert = replication_certificate(space, X)
        c = {"alpha": fx(cert.alpha), "gamble": fvec(cert.gamble)}
        if cert.coefficients is not None:
            c["coefficients"] = fvec(cert.coefficients)
        else:
            c["index"] = cert.index
        c["covers"] = cert.covers(X)
        ok = ok and c["covers"]
        out["certificate"] = c
    except NoFiniteCertificate as e:
        out["certificate"] = None
        out["certificate_note"] = str(e)
    if not ok:
        raise CheckFailed("certificate does not cover the variable", out)
    return out


def render_price(r: dict) -> str:
    lines = [
        f"outcomes: {' '.join(r['outcomes'])}",
        f"gambles:  {r['gambles']['type']}, {len(r['gambles']['rows'])} rows",
    ]
    lines += [f"  {tup(row)}" for row in r["gambles"]["rows"]]
    lines.append(f"variable: {tup(r['variable'])}")
    lines.append("")
    if "error" in r:
        lines.append(f"check failed: {r['error']}")
        return "\n".join(lines)
    lines.append("price chain")
    lines.append(table([[k, v] for k, v in r["chain"].items()], ["level", "value"]))
    if "relations" in r:
        vals = list(r["chain"].values())
        parts = [vals[0]]
        for rel, v in zip(r["relations"], vals[1:]):
            parts += [rel, v]
        lines.append("ordering: " + " ".join(parts))
    if "note" in r:
        lines.append(f"note: {r['note']}")
    lines.append("")
    if r.get("delta0_vertices") is None:
        lines.append(f"consistent set: {r.get('delta0_note', 'not enumerated')}")
    elif not r["delta0_vertices"]:
        lines.append("consistent set: empty")
    else:
        lines.append("consistent set vertices:")
        lines += [f"  {tup(v)}" for v in r["delta0_vertices"]]
    if "minimax_gap" in r:
        lines.append(f"minimax gap (upper_g - upper_p): {r['minimax_gap']}")
    c = r.get("certificate")
    if c is None:
        lines.append(f"certificate: none ({r.get('certificate_note', '')})")
    else:
        pick = f"coefficients {tup(c['coefficients'])}" if "coefficients" in c else f"gamble #{c['index']}"
        lines.append(f"certificate: alpha = {c['alpha']}, {pick}")
        lines.append(f"  gamble {tup(c['gamble'])}, covers: {c['covers']}")
    return "\n".join(lines)


# --- seq ---------------------------------------------------------------------------------


def build_sequential(p: SequentialProblem):
    sets = p.gambles
    space = SequentialSpace(p.alphabet, p.horizon, lambda s: sets[len(s)])
    if p.leaves is not None:
        return space, list(p.leaves)
    fn = compile_expr(p.expr)
    vals = p.values
    return space, (lambda s: fn(tuple(vals[i] for i in s), p.horizon))


def run_seq(p: SequentialProblem, parallel: bool = False) -> dict:
    space, X = build_sequential(p)
    g, strat = gambler_value(space, X, parallel=parallel)
    try:
        w, kernel = world_value(space, X, parallel=parallel)
    except InconsistentNode as e:
        raise InputError(f"no consistent measure at situation {space.label(e.situation)}") from None
    gap = sub_pessimistic(g, w)
    strategy_rows = []
    for s in space.internal():
        ch = strat.choices.get(s)
        row = {"situation": space.label(s)}
        if isinstance(ch, int):
            row["index"] = ch
        elif ch is not None:
            row["coefficients"] = fvec(ch)
        gam = strat.gambles.get(s)
        row["gamble"] = None if gam is None else fvec(gam)
        strategy_rows.append(row)
    kernel_rows = []
    for s in space.internal():
        q = kernel.table.get(s)
        kernel_rows.append({"situation": space.label(s), "p": None if q is None else fvec(q)})
    out = {
        "alphabet": list(space.alphabet),
        "horizon": space.horizon,
        "gambler_value": fx(g),
        "world_value": fx(w),
        "gap": fx(gap),
        "strategy": strategy_rows,
        "kernel": kernel_rows,
    }
    all_cones = all(isinstance(gs, Cone) for gs in p.gambles)
    if all_cones and gap != 0:
        raise CheckFailed(f"minimax gap {fx(gap)} on a cone game", out)
    return out


def render_seq(r: dict) -> str:
    lines = [
        f"alphabet: {' '.join(r['alphabet'])}, horizon {r['horizon']}",
        f"gambler value: {r['gambler_value']}",
        f"world value:   {r['world_value']}",
        f"gap:           {r['gap']}",
        "",
        "strategy",
    ]
    rows = []
    for s in r["strategy"]:
        pick = f"#{s['index']}" if "index" in s else (tup(s["coefficients"]) if "coefficients" in s else "-")
        rows.append([s["situation"], pick, "-" if s["gamble"] is None else tup(s["gamble"])])
    lines.append(table(rows, ["situation", "choice", "gamble"]))
    lines += ["", "kernel"]
    rows = [[k["situation"], "-" if k["p"] is None else tup(k["p"])] for k in r["kernel"]]
    lines.append(table(rows, ["situation", "p"]))
    return "\n".join(lines)


# --- simulate ----------------------------------------------------------------------------


def make_strategy(p: BettingProblem):
    name, params = p.strategy
    kw = dict(params)
    try:
        if name == "zero" and not kw:
            return zero_strategy(), Fraction(1), {}
        if name == "kt" and not kw:
            return kt_strategy(), Fraction(1), {}
        if name == "constant_fraction" and set(kw) == {"fraction"}:
            return constant_fraction(kw["fraction"]), Fraction(1), {}
        if name == "azuma" and set(kw) == {"eps", "T"}:
            T = kw["T"]
            if not is_finite(T) or T.denominator != 1:
                raise InputError("azuma needs an integer T")
            plan, strat = azuma_strategy(kw["eps"], int(T))
            extra = {
                "fraction": fx(plan.fraction),
                "fraction_bounds": {"lo": fx(plan.fraction_bounds[0]), "hi": fx(plan.fraction_bounds[1])},
                "initial_bounds": {"lo": fx(plan.initial_bounds[0]), "hi": fx(plan.initial_bounds[1])},
            }
            return strat, plan.initial, extra
    except ValueError as e:
        raise InputError(str(e)) from None
    raise InputError(
        f"unknown strategy {name!r} with parameters {sorted(kw)}; "
        "use zero, kt, constant_fraction(fraction) or azuma(eps, T)"
    )


def run_simulate(p: BettingProblem, base: Path | None = None) -> dict:
    strat, default_initial, extra = make_strategy(p)
    initial = default_initial if p.initial is None else p.initial
    ys = betting_outcomes(p, base)
    try:
        path = run_capital(strat, ys, initial)
    except ValueError as e:
        raise InputError(str(e)) from None
    rows = []
    for t, c in enumerate(path.capitals):
        prev = path.capitals[t - 1] if t else None
        row = {
            "t": t,
            "y": fx(path.outcomes[t - 1]) if t else None,
            "stake": fx(path.stakes[t - 1]) if t else None,
            "capital": fx(c),
            "e": fx(c / prev) if t and prev > 0 else None,
        }
        if c < 0:
            row["log_capital"] = None
        elif c == 0:
            row["log_capital"] = "-inf"
        else:
            lo, hi = log_bound(c)
            row["log_capital"] = {"lo": fx(lo), "hi": fx(hi)}
        rows.append(row)
    out = {"strategy": strat.label, "initial": fx(initial), "rows": rows, "bankrupt": path.bankrupt}
    out.update(extra)
    return out


def render_simulate(r: dict) -> str:
    head = ["t", "y_t", "stake", "C_t", "E_t", "log_C_t"]
    lines = [f"# strategy {r['strategy']}, initial capital {r['initial']}", "\t".join(head)]
    for row in r["rows"]:
        lg = row["log_capital"]
        if isinstance(lg, dict):
            lg = bound_label(Fraction(lg["lo"]), Fraction(lg["hi"]))
        cells = [row["t"], row["y"], row["stake"], row["capital"], row["e"], lg]
        lines.append("\t".join("-" if c is None else str(c) for c in cells))
    return "\n".join(lines)


# --- regret ------------------------------------------------------------------------------


def run_regret(p: RegretProblem) -> dict:
    try:
        game = OnlineGame(p.actions, p.alphabet, p.loss, p.horizon)
        rel = exp_weights_relaxation(game) if p.relaxation == "exp_weights" else doob_relaxation(game)
    except ValueError as e:
        raise InputError(str(e)) from None
    value = minimax_regret(game)
    root = rel.value(())
    adm = check_admissible(game, rel)
    out = {
        "actions": list(game.actions),
        "alphabet": list(game.alphabet),
        "horizon": game.horizon,
        "relaxation": rel.label,
        "minimax_regret": fx(value),
        "relaxation_root": fx(root),
        "root_is_exact": rel.exact,
        "admissible": adm.admissible,
        "histories_checked": adm.checked,
        "violations": [
            {"history": list(v["history"]), "kind": v["kind"], "relaxation": fx(v["relaxation"]), "required": fx(v["required"])}
            for v in adm.violations
        ],
    }
    failed = not adm.admissible or value > root
    if game.horizon <= MAX_EXHAUSTIVE_T:
        m = master_bound_check(game, rel)
        out["master"] = {
            "passes": m.passes,
            "sequences": m.sequences,
            "worst_regret": fx(m.worst_regret),
            "worst_sequence": None if m.worst_sequence is None else [game.alphabet[y] for y in m.worst_sequence],
            "supermartingale": m.supermartingale,
        }
        failed = failed or not m.passes
    else:
        out["master"] = None
    if failed:
        raise CheckFailed("regret bound check failed", out)
    return out


def render_regret(r: dict) -> str:
    kind = "value" if r["root_is_exact"] else "rational upper bound"
    lines = [
        f"actions: {' '.join(r['actions'])}; alphabet: {' '.join(r['alphabet'])}; horizon {r['horizon']}",
        f"minimax regret:      {r['minimax_regret']}",
        f"relaxation {r['relaxation']} at root ({kind}): {r['relaxation_root']}",
        f"admissible: {r['admissible']} ({r['histories_checked']} histories)",
    ]
    for v in r["violations"][:10]:
        lines.append(f"  {v['kind']} violation at {v['history']}: {v['relaxation']} < {v['required']}")
    m = r["master"]
    if m is None:
        lines.append(f"meta algorithm: not played (horizon above {MAX_EXHAUSTIVE_T})")
    else:
        seq = " ".join(m["worst_sequence"] or [])
        lines.append(f"meta algorithm worst regret: {m['worst_regret']} over {m['sequences']} sequences (worst: {seq})")
        lines.append(f"bound holds: {m['passes']}; relaxation is a supermartingale: {m['supermartingale']}")
    return "\n".join(lines)


# --- geometry ----------------------------------------------------------------------------


def run_geometry(p: OneShotProblem, levels) -> dict:
    space = p.space
    out = {"outcomes": list(space.outcomes), "levels": {}}
    for level in levels:
        try:
            eff = effective_gambles(space, level)
        except (ValueError, DimensionCap) as e:
            raise InputError(str(e)) from None
        out["levels"][level] = {
            "generators": [fvec(g) for g in eff.generators],
            "halfspaces": [{"normal": fvec(n), "rhs": fx(b)} for n, b in eff.halfspaces],
            "apexes": None if eff.apexes is None else [fvec(a) for a in eff.apexes],
            "empty": eff.empty,
        }
    return out


def render_geometry(r: dict) -> str:
    lines = [f"outcomes: {' '.join(r['outcomes'])}"]
    for level, d in r["levels"].items():
        lines += ["", f"[{level}]"]
        if d["empty"]:
            lines.append("empty")
            continue
        for g in d["generators"]:
            lines.append(f"generator\t{chr(9).join(g)}")
        for a in d["apexes"] or []:
            lines.append(f"apex\t{chr(9).join(a)}")
        for h in d["halfspaces"]:
            lines.append(f"halfspace\t{chr(9).join(h['normal'])}\t<=\t{h['rhs']}")
    return "\n".join(lines)


# --- main ----------------------------------------------------------------------------------


def _load(path, kind):
    prob = read_problem(path)
    if not isinstance(prob, kind):
        want = {OneShotProblem: "one_shot", SequentialProblem: "sequential", BettingProblem: "betting", RegretProblem: "regret"}[kind]
        raise InputError(f"{path}: expected a {want} problem")
    return prob


def _parse_variable(text: str):
    try:
        return tuple(parse_ext(t) for t in text.split(","))
    except ValueError as e:
        raise InputError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gtprice", description="Exact game-theoretic pricing.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("price", "price chain, consistent set and certificate for a one-shot problem"),
        ("seq", "backward induction for a sequential problem"),
        ("simulate", "capital process of a betting strategy"),
        ("regret", "minimax regret and relaxation checks"),
        ("geometry", "effective gamble sets as generators and halfspaces"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if name == "price":
            p.add_argument("--variable", help="comma-separated values overriding the file's variable")
        if name == "seq":
            p.add_argument("--parallel", action="store_true", help="evaluate root subtrees in threads")
        if name == "geometry":
            p.add_argument("--level", choices=LEVELS, action="append", help="repeatable; default all")
    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--criteria", help="comma-separated criterion numbers")
    st.add_argument("--json", action="store_true")
    return ap


def _emit(payload, text: str, as_json: bool, out) -> None:
    if as_json:
        problems = lint_json(payload)
        body = json.dumps(payload, indent=2)
    else:
        problems = lint_text(text)
        body = text
    if problems:
        raise AssertionError("report contains inexact numbers: " + "; ".join(problems[:5]))
    print(body, file=out)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    render = {
        "price": render_price,
        "seq": render_seq,
        "simulate": render_simulate,
        "regret": render_regret,
        "geometry": render_geometry,
    }
    try:
        if args.command == "selftest":
            numbers = None
            if args.criteria:
                try:
                    numbers = [int(t) for t in args.criteria.split(",")]
                except ValueError:
                    raise InputError("--criteria takes comma-separated integers") from None
                unknown = [k for k in numbers if k not in acceptance.CRITERIA]
                if unknown:
                    raise InputError(f"unknown criteria {unknown}")
            results = acceptance.run(numbers)
            if args.json:
                payload = [{"criterion": r.number, "title": r.title, "passed": r.passed,
                            "failed_checks": [c.name for c in r.checks if not c.passed]} for r in results]
                print(json.dumps(payload, indent=2), file=out)
            else:
                for r in results:
                    print(r.line(), file=out)
            return OK if all(r.passed for r in results) else THEOREM
        if args.command == "price":
            var = _parse_variable(args.variable) if args.variable else None
            payload = run_price(_load(args.file, OneShotProblem), var)
        elif args.command == "seq":
            payload = run_seq(_load(args.file, SequentialProblem), parallel=args.parallel)
        elif args.command == "simulate":
            payload = run_simulate(_load(args.file, BettingProblem), Path(args.file).parent)
        elif args.command == "regret":
            payload = run_regret(_load(args.file, RegretProblem))
        else:
            payload = run_geometry(_load(args.file, OneShotProblem), args.level or LEVELS)
        _emit(payload, render[args.command](payload), args.json, out)
        return OK
    except CheckFailed as e:
        _emit(e.payload, render[args.command](e.payload), args.json, out)
        print(f"check failed: {e}", file=err)
        return THEOREM
    except TheoremViolation as e:
        print(f"check failed: {e}", file=err)
        return THEOREM
    except (ProblemError, InputError, NodeCapExceeded, DimensionCap) as e:
        print(f"error: {e}", file=err)
        return INPUT


if __name__ == "__main__":
    sys.exit(main())
