"""Exact rational linear programming via two-phase simplex.

Everything is exact: coefficients, pivots and the reported optimum are
rationals.  The default pivot rule is Bland's (anti-cycling, deterministic);
a "dantzig" mode picks the most negative reduced cost with lowest-index tie
breaking and falls back to Bland after a run of degenerate pivots, which is
still deterministic and exact, just usually faster.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, InternalError
from .rationals import Q

_Q0 = Q(0)
_Q1 = Q(1)

_DEGENERATE_GUARD = 40


@dataclass(frozen=True)
class LinearProgram:
    """minimize objective . x subject to rows, lower <= x (<= upper)."""

    num_vars: int
    objective: tuple
    rows: tuple  # (coeffs dict {var: Q}, sense '<='|'='|'>=', rhs Q)
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.objective) != self.num_vars:
            raise InputError("objective length != num_vars")
        if len(self.lower) != self.num_vars or len(self.upper) != self.num_vars:
            raise InputError("bound vectors must have num_vars entries")
        for coeffs, sense, _rhs in self.rows:
            if sense not in ("<=", "=", ">="):
                raise InputError(f"bad row sense {sense!r}")
            for j in coeffs:
                if not 0 <= j < self.num_vars:
                    raise InputError(f"row references unknown variable {j}")


def linear_program(num_vars, objective, rows, lower=None, upper=None):
    """Normalizing constructor: coefficient lists or dicts, values coerced to Q."""
    if isinstance(objective, dict):
        obj = tuple(Q(objective.get(j, 0)) for j in range(num_vars))
    else:
        obj = tuple(Q(c) for c in objective)
    norm_rows = []
    for coeffs, sense, rhs in rows:
        if isinstance(coeffs, dict):
            d = {int(j): Q(v) for j, v in coeffs.items() if Q(v) != 0}
        else:
            d = {j: Q(v) for j, v in enumerate(coeffs) if Q(v) != 0}
        norm_rows.append((d, sense, Q(rhs)))
    lo = tuple(Q(0) for _ in range(num_vars)) if lower is None else tuple(Q(v) for v in lower)
    up = (
        tuple(None for _ in range(num_vars))
        if upper is None
        else tuple(None if v is None else Q(v) for v in upper)
    )
    return LinearProgram(num_vars, obj, tuple(norm_rows), lo, up)


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: object  # Q when optimal
    point: tuple  # Q per variable when optimal
    iterations: int = 0


def check_point(lp, point):
    """Exactly verify a point against all rows and bounds.

    Returns (ok, violations, value) where violations is a list of human-readable
    strings naming the first offending rows/bounds (all of them, in order).
    """
    if len(point) != lp.num_vars:
        raise InputError("point length != num_vars")
    x = [Q(v) for v in point]
    violations = []
    for j in range(lp.num_vars):
        if x[j] < lp.lower[j]:
            violations.append(f"x{j} below lower bound")
        if lp.upper[j] is not None and x[j] > lp.upper[j]:
            violations.append(f"x{j} above upper bound")
    for i, (coeffs, sense, rhs) in enumerate(lp.rows):
        lhs = sum((c * x[j] for j, c in coeffs.items()), _Q0)
        ok = lhs <= rhs if sense == "<=" else lhs >= rhs if sense == ">=" else lhs == rhs
        if not ok:
            violations.append(f"row {i}: {lhs} {sense} {rhs} fails")
    value = sum((lp.objective[j] * x[j] for j in range(lp.num_vars)), _Q0)
    return (not violations), violations, value


class _Tableau:
    """Sparse row tableau; columns: structural, then slack, then artificial."""

    def __init__(self, lp):
        n = lp.num_vars
        shift = list(lp.lower)
        rows = []
        senses = []
        rhss = []
        for coeffs, sense, rhs in lp.rows:
            adj = rhs - sum((c * shift[j] for j, c in coeffs.items()), _Q0)
            rows.append(dict(coeffs))
            senses.append(sense)
            rhss.append(adj)
        for j in range(n):
            if lp.upper[j] is not None:
                rows.append({j: _Q1})
                senses.append("<=")
                rhss.append(lp.upper[j] - shift[j])
        ncols = n
        self.slack_of_row = {}
        for i, sense in enumerate(senses):
            if sense != "=":
                col = ncols
                ncols += 1
                rows[i][col] = _Q1 if sense == "<=" else Q(-1)
                self.slack_of_row[i] = col
        for i in range(len(rows)):
            if rhss[i] < 0:
                rows[i] = {k: -v for k, v in rows[i].items()}
                rhss[i] = -rhss[i]
        self.basis = []
        self.art_cols = set()
        for i, row in enumerate(rows):
            sc = self.slack_of_row.get(i)
            if sc is not None and row.get(sc) == _Q1:
                self.basis.append(sc)
            else:
                col = ncols
                ncols += 1
                row[col] = _Q1
                self.art_cols.add(col)
                self.basis.append(col)
        self.rows = rows
        self.rhs = rhss
        self.ncols = ncols
        self.nstruct = n
        self.shift = shift
        self.iterations = 0

    def _pivot(self, r, j):
        prow = self.rows[r]
        a = prow[j]
        if a != _Q1:
            inv = _Q1 / a
            for k in prow:
                prow[k] *= inv
            self.rhs[r] *= inv
        pr_items = list(prow.items())
        rrhs = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row.get(j)
            if f is None or f == 0:
                continue
            for k, v in pr_items:
                nv = row.get(k, _Q0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            self.rhs[i] -= f * rrhs
        f = self.cost.get(j)
        if f is not None and f != 0:
            cost = self.cost
            for k, v in pr_items:
                nv = cost.get(k, _Q0) - f * v
                if nv:
                    cost[k] = nv
                else:
                    cost.pop(k, None)
            self.cost_rhs -= f * rrhs
        self.basis[r] = j
        self.iterations += 1

    def _entering(self, rule, banned):
        best = None
        if rule == "bland":
            for k, v in self.cost.items():
                if v < 0 and k not in banned and (best is None or k < best):
                    best = k
            return best
        best_v = None
        for k, v in self.cost.items():
            if v < 0 and k not in banned:
                if best_v is None or v < best_v or (v == best_v and k < best):
                    best_v = v
                    best = k
        return best

    def _leaving(self, j):
        best_ratio = None
        best_row = None
        for i, row in enumerate(self.rows):
            a = row.get(j)
            if a is None or a <= 0:
                continue
            ratio = self.rhs[i] / a
            if (
                best_ratio is None
                or ratio < best_ratio
                or (ratio == best_ratio and self.basis[i] < self.basis[best_row])
            ):
                best_ratio = ratio
                best_row = i
        return best_row

    def _optimize(self, rule, banned):
        degenerate_run = 0
        mode = rule
        while True:
            j = self._entering(mode, banned)
            if j is None:
                return "optimal"
            r = self._leaving(j)
            if r is None:
                return "unbounded"
            degenerate = self.rhs[r] == 0
            self._pivot(r, j)
            if rule == "dantzig":
                if degenerate:
                    degenerate_run += 1
                    if degenerate_run > _DEGENERATE_GUARD:
                        mode = "bland"
                else:
                    degenerate_run = 0
                    mode = rule

    def set_cost_for_phase1(self):
        cost = {}
        cost_rhs = _Q0
        for i, row in enumerate(self.rows):
            if self.basis[i] in self.art_cols:
                for k, v in row.items():
                    if k in self.art_cols:
                        continue
                    nv = cost.get(k, _Q0) - v
                    if nv:
                        cost[k] = nv
                    else:
                        cost.pop(k, None)
                cost_rhs -= self.rhs[i]
        self.cost = cost
        self.cost_rhs = cost_rhs

    def set_cost_for_phase2(self, objective):
        cost = {j: c for j, c in enumerate(objective) if c != 0}
        cost_rhs = _Q0
        for i, row in enumerate(self.rows):
            cb = cost.get(self.basis[i])
            if cb:
                cb = Q(cb)
                for k, v in row.items():
                    if k == self.basis[i]:
                        continue
                    nv = cost.get(k, _Q0) - cb * v
                    if nv:
                        cost[k] = nv
                    else:
                        cost.pop(k, None)
                cost_rhs -= cb * self.rhs[i]
                cost.pop(self.basis[i], None)
        self.cost = cost
        self.cost_rhs = cost_rhs


def solve_lp(lp, pivot="bland"):
    """Solve exactly; returns LpResult with a basic optimal point when optimal."""
    if pivot not in ("bland", "dantzig"):
        raise InputError(f"unknown pivot rule {pivot!r}")
    for j in range(lp.num_vars):
        if lp.upper[j] is not None and lp.upper[j] < lp.lower[j]:
            return LpResult("infeasible", None, None, 0)
    t = _Tableau(lp)
    if t.art_cols:
        t.set_cost_for_phase1()
        status = t._optimize(pivot, banned=t.art_cols)
        if status != "optimal":
            raise InternalError("phase 1 cannot be unbounded")
        if t.cost_rhs != 0:
            # minimum artificial sum is -cost_rhs > 0
            return LpResult("infeasible", None, None, t.iterations)
        for i in range(len(t.rows)):
            if t.basis[i] in t.art_cols:
                j = min(
                    (k for k in t.rows[i] if k not in t.art_cols and t.rows[i][k] != 0),
                    default=None,
                )
                if j is not None:
                    t._pivot(i, j)
        keep = [i for i in range(len(t.rows)) if t.basis[i] not in t.art_cols]
        t.rows = [t.rows[i] for i in keep]
        t.rhs = [t.rhs[i] for i in keep]
        t.basis = [t.basis[i] for i in keep]
        for row in t.rows:
            for c in t.art_cols:
                row.pop(c, None)
    t.set_cost_for_phase2(lp.objective)
    status = t._optimize(pivot, banned=frozenset())
    if status == "unbounded":
        return LpResult("unbounded", None, None, t.iterations)
    point = [_Q0] * lp.num_vars
    for i, b in enumerate(t.basis):
        if b < t.nstruct:
            point[b] = t.rhs[i]
    for j in range(lp.num_vars):
        point[j] += t.shift[j]
    value = sum((lp.objective[j] * point[j] for j in range(lp.num_vars)), _Q0)
    return LpResult("optimal", value, tuple(point), t.iterations)
