"""Exact rational linear programming and small polytope tools.

The solver is a dense two-phase tableau simplex over ``Fraction`` with
Bland's rule, so it terminates and is deterministic for a given input
ordering.  Instances in this package are tiny (a handful of rows), which
is the regime where exactness matters more than speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

LE, EQ, GE = "<=", "=", ">="
OPTIMAL, UNBOUNDED, INFEASIBLE = "optimal", "unbounded", "infeasible"

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DimensionCap(ValueError):
    pass


class Unbounded(ValueError):
    pass


def _frac_row(row) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in row)


@dataclass(frozen=True)
class Constraint:
    row: tuple[Fraction, ...]
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in (LE, EQ, GE):
            raise ValueError(f"bad relation {self.rel!r}")
        object.__setattr__(self, "row", _frac_row(self.row))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def lhs(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * v for a, v in zip(self.row, x) if a), _ZERO)

    def holds(self, x: Sequence[Fraction]) -> bool:
        v = self.lhs(x)
        if self.rel == LE:
            return v <= self.rhs
        if self.rel == GE:
            return v >= self.rhs
        return v == self.rhs

    def is_tight(self, x: Sequence[Fraction]) -> bool:
        return self.lhs(x) == self.rhs


@dataclass
class LinearProgram:
    """Optimize ``objective . x`` subject to rows and per-variable bounds.

    ``bounds[j]`` is a ``(lo, hi)`` pair where either side may be ``None``.
    Variables without an entry in ``bounds`` are free.
    """

    objective: Sequence
    sense: str = "min"
    constraints: list[Constraint] = field(default_factory=list)
    bounds: Optional[list[tuple[Optional[Fraction], Optional[Fraction]]]] = None

    def __post_init__(self):
        self.objective = _frac_row(self.objective)
        if self.sense not in ("min", "max"):
            raise ValueError(f"bad sense {self.sense!r}")
        n = len(self.objective)
        if self.bounds is None:
            self.bounds = [(None, None)] * n
        else:
            self.bounds = [
                (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
                for lo, hi in self.bounds
            ]
        if len(self.bounds) != n:
            raise ValueError("bounds length differs from objective length")
        for c in self.constraints:
            if len(c.row) != n:
                raise ValueError("constraint row length differs from objective length")

    @property
    def n(self) -> int:
        return len(self.objective)

    def add(self, row, rel, rhs) -> "LinearProgram":
        c = Constraint(row, rel, rhs)
        if len(c.row) != self.n:
            raise ValueError("constraint row length differs from objective length")
        self.constraints.append(c)
        return self

    def copy(self) -> "LinearProgram":
        return LinearProgram(self.objective, self.sense, list(self.constraints), list(self.bounds))

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        for (lo, hi), v in zip(self.bounds, x):
            if lo is not None and v < lo:
                return False
            if hi is not None and v > hi:
                return False
        return all(c.holds(x) for c in self.constraints)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction] = None
    point: Optional[tuple[Fraction, ...]] = None
    dual: Optional[tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# --- standard form ---------------------------------------------------------


def _pivot(T: list[list[Fraction]], obj: list[Fraction], r: int, c: int) -> None:
    prow = T[r]
    pv = prow[c]
    if pv != 1:
        inv = 1 / pv
        prow[:] = [v * inv if v else v for v in prow]
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    f = obj[c]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]


def _run(T, basis, obj, allowed) -> str:
    """Bland-rule simplex on a feasible tableau; ``obj`` holds reduced costs
    followed by minus the current objective value."""
    while True:
        enter = -1
        for j in allowed:
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        best = None
        leave = -1
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            return UNBOUNDED
        _pivot(T, obj, leave, enter)
        basis[leave] = enter


def _reduced(T, basis, cost) -> list[Fraction]:
    obj = list(cost) + [_ZERO]
    for i, row in enumerate(T):
        cb = cost[basis[i]]
        if cb:
            for j, v in enumerate(row):
                if v:
                    obj[j] -= cb * v
    return obj


def _solve(lp: LinearProgram) -> LPResult:
    n = lp.n
    # x_j = offset_j + sum(coef * x'_col)
    offsets: list[Fraction] = []
    maps: list[list[tuple[int, Fraction]]] = []
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    ncol = 0
    for lo, hi in lp.bounds:
        if lo is not None:
            offsets.append(lo)
            maps.append([(ncol, _ONE)])
            if hi is not None:
                extra_rows.append(({ncol: _ONE}, LE, hi - lo))
            ncol += 1
        elif hi is not None:
            offsets.append(hi)
            maps.append([(ncol, -_ONE)])
            ncol += 1
        else:
            offsets.append(_ZERO)
            maps.append([(ncol, _ONE), (ncol + 1, -_ONE)])
            ncol += 2

    sgn = _ONE if lp.sense == "min" else -_ONE
    cost = [_ZERO] * ncol
    for j, cj in enumerate(lp.objective):
        for col, coef in maps[j]:
            cost[col] += sgn * cj * coef
    const = sgn * sum((cj * o for cj, o in zip(lp.objective, offsets)), _ZERO)

    rows: list[tuple[list[Fraction], str, Fraction, Optional[int]]] = []
    for k, con in enumerate(lp.constraints):
        r = [_ZERO] * ncol
        rhs = con.rhs
        for j, a in enumerate(con.row):
            if a:
                rhs -= a * offsets[j]
                for col, coef in maps[j]:
                    r[col] += a * coef
        rows.append((r, con.rel, rhs, k))
    for d, rel, rhs in extra_rows:
        r = [_ZERO] * ncol
        for col, v in d.items():
            r[col] = v
        rows.append((r, rel, rhs, None))

    m = len(rows)
    flips: list[Fraction] = []
    rels: list[str] = []
    for r, rel, rhs, _ in rows:
        if rhs < 0:
            flips.append(-_ONE)
            rels.append({LE: GE, GE: LE, EQ: EQ}[rel])
        else:
            flips.append(_ONE)
            rels.append(rel)
    n_slack = sum(1 for rel in rels if rel != EQ)
    n_art = sum(1 for rel in rels if rel != LE)
    total = ncol + n_slack + n_art
    T: list[list[Fraction]] = []
    basis: list[int] = []
    id_col: list[int] = []
    sidx = ncol
    aidx = ncol + n_slack
    art_cols = set()
    for i, (r, _, rhs, _) in enumerate(rows):
        f = flips[i]
        row = [v * f if v else v for v in r] + [_ZERO] * (n_slack + n_art) + [rhs * f]
        rel = rels[i]
        if rel == LE:
            row[sidx] = _ONE
            basis.append(sidx)
            id_col.append(sidx)
            sidx += 1
        else:
            if rel == GE:
                row[sidx] = -_ONE
                sidx += 1
            row[aidx] = _ONE
            basis.append(aidx)
            id_col.append(aidx)
            art_cols.add(aidx)
            aidx += 1
        T.append(row)

    if art_cols:
        c1 = [_ONE if j in art_cols else _ZERO for j in range(total)]
        obj = _reduced(T, basis, c1)
        _run(T, basis, obj, range(total))
        if obj[-1] != 0:
            return LPResult(INFEASIBLE)
        for i in range(m):
            if basis[i] in art_cols:
                for j in range(ncol + n_slack):
                    if T[i][j]:
                        _pivot(T, obj, i, j)
                        basis[i] = j
                        break
    allowed = range(ncol + n_slack)
    cost2 = cost + [_ZERO] * (n_slack + n_art)
    obj = _reduced(T, basis, cost2)
    status = _run(T, basis, obj, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)

    xs = [_ZERO] * total
    for i, b in enumerate(basis):
        xs[b] = T[i][-1]
    x = []
    for j in range(n):
        v = offsets[j]
        for col, coef in maps[j]:
            v += coef * xs[col]
        x.append(v)
    value = sgn * (-obj[-1] + const)
    # duals of the standard rows: y_i = c_id - r_id, with c_id = 0
    dual = []
    for i in range(len(lp.constraints)):
        y = -obj[id_col[i]] * flips[i]
        if lp.sense == "max":
            y = -y
        dual.append(y)
    return LPResult(OPTIMAL, value, tuple(x), tuple(dual))


def solve_lp(lp: LinearProgram, lexicographic: bool = False) -> LPResult:
    """Solve ``lp`` exactly.

    With ``lexicographic=True`` the returned point is the lexicographically
    smallest optimal point (coordinates that are unbounded below on the
    optimal face are left where the previous stage put them).
    """
    res = _solve(lp)
    if not lexicographic or not res.optimal:
        return res
    face = lp.copy()
    face.constraints.append(Constraint(lp.objective, EQ, res.value))
    point = res.point
    for j in range(lp.n):
        unit = [_ZERO] * lp.n
        unit[j] = _ONE
        sub = LinearProgram(unit, "min", list(face.constraints), list(face.bounds))
        r = _solve(sub)
        if r.optimal:
            face.constraints.append(Constraint(unit, EQ, r.value))
            point = r.point
    return LPResult(OPTIMAL, res.value, point, res.dual)


def lp_from_rows(objective, sense: str, rows: Sequence[Constraint]) -> Optional[LinearProgram]:
    """Build an LP, folding rows with a single nonzero coefficient into
    variable bounds.  Returns None when those bounds already conflict.
    Duals of the result refer to the remaining rows only."""
    n = len(objective)
    lo: list = [None] * n
    hi: list = [None] * n
    kept = []
    for c in rows:
        nz = [j for j, a in enumerate(c.row) if a]
        if len(nz) != 1:
            kept.append(c)
            continue
        j = nz[0]
        v = c.rhs / c.row[j]
        rel = c.rel
        if c.row[j] < 0:
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        if rel in (GE, EQ) and (lo[j] is None or v > lo[j]):
            lo[j] = v
        if rel in (LE, EQ) and (hi[j] is None or v < hi[j]):
            hi[j] = v
    for a, b in zip(lo, hi):
        if a is not None and b is not None and a > b:
            return None
    return LinearProgram(objective, sense, kept, list(zip(lo, hi)))


# --- duality audit ----------------------------------------------------------


def dual_value(lp: LinearProgram, y: Sequence[Fraction]) -> Optional[Fraction]:
    """Objective of the dual solution ``y`` (row multipliers), or ``None`` when
    ``y`` is not dual feasible.  Bound multipliers are implied by reduced costs."""
    s = _ONE if lp.sense == "min" else -_ONE
    yt = [s * Fraction(v) for v in y]
    for con, v in zip(lp.constraints, yt):
        if (con.rel == LE and v > 0) or (con.rel == GE and v < 0):
            return None
    total = sum((v * con.rhs for con, v in zip(lp.constraints, yt)), _ZERO)
    for j in range(lp.n):
        d = s * lp.objective[j] - sum((v * con.row[j] for con, v in zip(lp.constraints, yt)), _ZERO)
        lo, hi = lp.bounds[j]
        if d > 0:
            if lo is None:
                return None
            total += d * lo
        elif d < 0:
            if hi is None:
                return None
            total += d * hi
    return s * total


def certify(lp: LinearProgram, res: LPResult) -> bool:
    """Exact optimality audit: primal feasible, dual feasible, equal objectives."""
    if not res.optimal:
        return False
    if not lp.is_feasible_point(res.point):
        return False
    if sum((c * x for c, x in zip(lp.objective, res.point)), _ZERO) != res.value:
        return False
    return dual_value(lp, res.dual) == res.value


# --- linear algebra ---------------------------------------------------------


def solve_linear_system(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Unique solution of ``rows x = rhs`` or ``None`` (singular or inconsistent)."""
    if not rows:
        return None
    n = len(rows[0])
    M = [[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    rank = 0
    pivots = []
    for col in range(n):
        p = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        pv = M[rank][col]
        M[rank] = [v / pv for v in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        pivots.append(col)
        rank += 1
    for i in range(rank, len(M)):
        if M[i][-1]:
            return None
    if rank < n:
        return None
    x = [_ZERO] * n
    for i, col in enumerate(pivots):
        x[col] = M[i][-1]
    return tuple(x)


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    M = [[Fraction(v) for v in r] for r in rows]
    if not M:
        return 0
    rank = 0
    for col in range(len(M[0])):
        p = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        for i in range(rank + 1, len(M)):
            if M[i][col]:
                f = M[i][col] / M[rank][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


# --- polytopes ----------------------------------------------------------------


@dataclass
class Polytope:
    """H-representation ``{x : row . x rel rhs}`` in ``dim`` coordinates."""

    dim: int
    h_rep: list[Constraint]
    v_rep: Optional[list[tuple[Fraction, ...]]] = None

    def contains(self, x: Sequence) -> bool:
        x = _frac_row(x)
        return len(x) == self.dim and all(c.holds(x) for c in self.h_rep)

    def _lp(self, objective, sense) -> Optional[LinearProgram]:
        return lp_from_rows(objective, sense, self.h_rep)

    def optimize(self, objective, sense: str, lexicographic: bool = False) -> LPResult:
        lp = self._lp(objective, sense)
        if lp is None:
            return LPResult(INFEASIBLE)
        return solve_lp(lp, lexicographic=lexicographic)

    def is_empty(self) -> bool:
        return self.optimize([_ZERO] * self.dim, "min").status == INFEASIBLE

    def maximize(self, objective, lexicographic: bool = False) -> LPResult:
        return self.optimize(objective, "max", lexicographic)

    def with_vertices(self, cap: int = 8) -> "Polytope":
        return Polytope(self.dim, list(self.h_rep), enumerate_vertices(self, cap))


def simplex_constraints(n: int) -> list[Constraint]:
    rows = [Constraint([_ONE] * n, EQ, _ONE)]
    for j in range(n):
        e = [_ZERO] * n
        e[j] = _ONE
        rows.append(Constraint(e, GE, _ZERO))
    return rows


def enumerate_vertices(poly: Polytope, cap: int = 8) -> list[tuple[Fraction, ...]]:
    """All vertices by brute-force basis inspection, sorted lexicographically."""
    d = poly.dim
    if d > cap:
        raise DimensionCap(f"dimension {d} exceeds the cap {cap}")
    if poly.is_empty():
        return []
    for j in range(d):
        e = [_ZERO] * d
        e[j] = _ONE
        for sense in ("max", "min"):
            if poly.optimize(e, sense).status == UNBOUNDED:
                raise Unbounded("polytope is unbounded")
    eqs = [c for c in poly.h_rep if c.rel == EQ]
    ineqs = [c for c in poly.h_rep if c.rel != EQ]
    r = matrix_rank([c.row for c in eqs])
    need = d - r
    found = set()
    for combo in itertools.combinations(ineqs, need):
        chosen = eqs + list(combo)
        x = solve_linear_system([c.row for c in chosen], [c.rhs for c in chosen])
        if x is not None and all(c.holds(x) for c in poly.h_rep):
            found.add(x)
    return sorted(found)
