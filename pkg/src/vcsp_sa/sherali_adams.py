"""Sherali-Adams style LP relaxations of valued CSP instances.

The (k,l) relaxation has one probability distribution per indexed scope:
the scope sets of the instance's constraints plus every non-empty variable
subset of size <= l (duplicates merged, with co-located weighted relations
summed into one table per scope).  Marginal rows tie every pair of nested
scopes (small side of size <= k) together; the objective charges each scope's
distribution with its merged table over feasible assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .core import Constraint, Instance, WeightedRelation, evaluate
from .errors import BudgetError, InputError, InternalError, enumeration_budget
from .lp import linear_program, solve_lp
from .rationals import ExtRat, INF, Q

_Q0 = Q(0)
_Q1 = Q(1)


@dataclass(frozen=True)
class ScopeInfo:
    vars: tuple  # sorted, distinct variables
    table: tuple  # merged ExtRat table over D^len(vars), or None for null scopes


@dataclass(frozen=True)
class ScopeIndex:
    """Indexed scopes of SA(k,l) plus their containment pairs and LP layout."""

    num_vars: int
    domain_size: int
    k: int
    l: int
    scopes: tuple
    pairs: tuple  # (j, i) with vars[j] a proper subset of vars[i], |vars[j]| <= k
    offsets: tuple  # LP column offset of each scope's distribution
    total_cols: int

    def scope_pos(self, svars):
        lo, hi = 0, len(self.scopes)
        target = (len(svars), svars)
        while lo < hi:
            mid = (lo + hi) // 2
            cur = self.scopes[mid].vars
            if (len(cur), cur) < target:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.scopes) and self.scopes[lo].vars == svars:
            return lo
        raise InputError(f"scope {svars} is not indexed")


def _merged_table(inst, svars, cons):
    """Sum the given constraints' relations into one table over sorted svars."""
    D = inst.domain_size
    pos = {v: t for t, v in enumerate(svars)}
    size = D ** len(svars)
    table = [ExtRat(0)] * size
    for c in cons:
        rel = inst.relations[c.relation]
        positions = tuple(pos[v] for v in c.scope)
        for idx, sigma in enumerate(product(range(D), repeat=len(svars))):
            v = rel.values[rel.index_of(tuple(sigma[p] for p in positions))]
            if table[idx].is_finite:
                table[idx] = table[idx] + v * c.multiplicity if v.is_finite else INF
    return tuple(table)


def build_scope_index(inst, k, l, budget=None):
    if not 1 <= k <= l:
        raise InputError("need 1 <= k <= l")
    if l > max(inst.num_vars, 1):
        raise InputError("l exceeds the number of variables")
    D = inst.domain_size
    by_scope = {}
    for c in inst.constraints:
        svars = tuple(sorted(set(c.scope)))
        by_scope.setdefault(svars, []).append(c)
    scope_sets = set(by_scope)
    for size in range(1, min(l, inst.num_vars) + 1):
        for combo in combinations(range(inst.num_vars), size):
            scope_sets.add(combo)
    ordered = sorted(scope_sets, key=lambda s: (len(s), s))
    total = sum(D ** len(s) for s in ordered)
    if total > enumeration_budget(budget):
        raise BudgetError(f"{total} SA columns exceed enumeration budget")
    scopes = []
    for svars in ordered:
        cons = by_scope.get(svars)
        table = _merged_table(inst, svars, cons) if cons else None
        scopes.append(ScopeInfo(svars, table))
    pos_of = {info.vars: i for i, info in enumerate(scopes)}
    pairs = []
    for i, info in enumerate(scopes):
        s = info.vars
        for size in range(1, min(k, len(s) - 1) + 1):
            for sub in combinations(s, size):
                pairs.append((pos_of[sub], i))
    pairs.sort()
    offsets = []
    off = 0
    for info in scopes:
        offsets.append(off)
        off += D ** len(info.vars)
    return ScopeIndex(
        inst.num_vars, D, k, l, tuple(scopes), tuple(pairs), tuple(offsets), off
    )


def _strides(D, size):
    s = [1] * size
    for t in range(size - 2, -1, -1):
        s[t] = s[t + 1] * D
    return s


def _projection(index, j, i):
    """Array mapping each assignment index of scope i to one of scope j."""
    D = index.domain_size
    si = index.scopes[i].vars
    sj = index.scopes[j].vars
    pos = [si.index(v) for v in sj]
    stj = _strides(D, len(sj))
    out = []
    for sigma in product(range(D), repeat=len(si)):
        out.append(sum(sigma[p] * stj[t] for t, p in enumerate(pos)))
    return out


def build_sa(inst, k, l, budget=None):
    """Materialize the full SA(k,l) LP; returns (LinearProgram, ScopeIndex).

    Column layout follows index.offsets; rows are, in order: one normalization
    row per scope, zero-pins for infeasible assignments, then marginal rows
    for every containment pair (all tau, lexicographic).
    """
    index = build_scope_index(inst, k, l, budget)
    D = index.domain_size
    objective = [_Q0] * index.total_cols
    rows = []
    for i, info in enumerate(index.scopes):
        off = index.offsets[i]
        size = D ** len(info.vars)
        rows.append(({off + s: _Q1 for s in range(size)}, "=", _Q1))
        if info.table is not None:
            for s in range(size):
                v = info.table[s]
                if v.is_finite:
                    objective[off + s] = v.q
                else:
                    rows.append(({off + s: _Q1}, "=", _Q0))
    for j, i in index.pairs:
        proj = _projection(index, j, i)
        offj, offi = index.offsets[j], index.offsets[i]
        by_tau = {}
        for s, t in enumerate(proj):
            by_tau.setdefault(t, []).append(s)
        for t in sorted(by_tau):
            coeffs = {offi + s: Q(-1) for s in by_tau[t]}
            coeffs[offj + t] = _Q1
            rows.append((coeffs, "=", _Q0))
    lp = linear_program(index.total_cols, objective, rows)
    return lp, index


@dataclass(frozen=True)
class SaSolution:
    """Per-scope distributions: {scope vars tuple: {assignment tuple: Q}}.

    Only non-zero entries are stored; a missing assignment means probability 0.
    """

    dists: dict

    def dist(self, svars):
        return self.dists.get(tuple(svars), {})


@dataclass(frozen=True)
class SaResult:
    status: str  # "optimal" | "infeasible"
    value: ExtRat
    solution: object  # SaSolution or None
    lp_iterations: int = 0


def consistent_supports(index):
    """(k,l)-consistency pruning of per-scope feasible supports.

    Returns a list of per-scope sets of surviving assignment indices, or None
    if some scope's support empties (the LP is then infeasible).
    """
    D = index.domain_size
    supports = []
    for info in index.scopes:
        size = D ** len(info.vars)
        if info.table is None:
            supports.append(set(range(size)))
        else:
            supports.append({s for s in range(size) if info.table[s].is_finite})
        if not supports[-1]:
            return None
    projs = {}
    touching = {}
    for p, (j, i) in enumerate(index.pairs):
        projs[p] = _projection(index, j, i)
        touching.setdefault(j, []).append(p)
        touching.setdefault(i, []).append(p)
    from collections import deque

    work = deque(range(len(index.pairs)))
    queued = set(work)
    while work:
        p = work.popleft()
        queued.discard(p)
        j, i = index.pairs[p]
        proj = projs[p]
        sup_i, sup_j = supports[i], supports[j]
        dead_i = {s for s in sup_i if proj[s] not in sup_j}
        changed = []
        if dead_i:
            sup_i -= dead_i
            changed.append(i)
        reached = {proj[s] for s in sup_i}
        dead_j = sup_j - reached
        if dead_j:
            sup_j &= reached
            changed.append(j)
        for scope in changed:
            if not supports[scope]:
                return None
            for q in touching[scope]:
                if q not in queued:
                    work.append(q)
                    queued.add(q)
    return supports


def _reduced_lp(index, supports):
    """Value-preserving reduction of the full SA LP.

    Eliminates assignments outside the consistent supports (provably zero),
    drops marginal pairs implied by transitivity through an intermediate
    scope of size <= k, and keeps a normalization row only for scopes that
    are not the small side of a kept pair (theirs follow by summation).
    """
    D = index.domain_size
    col_of = {}
    objective = []
    for i, info in enumerate(index.scopes):
        table = info.table
        for s in sorted(supports[i]):
            col_of[(i, s)] = len(objective)
            objective.append(table[s].q if table is not None else _Q0)
    kept_pairs = []
    for j, i in index.pairs:
        nj = len(index.scopes[j].vars)
        ni = len(index.scopes[i].vars)
        if nj + 1 <= index.k and nj + 2 <= ni:
            continue  # implied via an intermediate scope of size nj+1
        kept_pairs.append((j, i))
    has_parent = {j for j, _ in kept_pairs}
    rows = []
    for i in range(len(index.scopes)):
        if i in has_parent:
            continue
        rows.append(({col_of[(i, s)]: _Q1 for s in sorted(supports[i])}, "=", _Q1))
    for j, i in kept_pairs:
        proj = _projection(index, j, i)
        by_tau = {}
        for s in sorted(supports[i]):
            by_tau.setdefault(proj[s], []).append(s)
        for t in sorted(supports[j]):
            coeffs = {col_of[(i, s)]: Q(-1) for s in by_tau.get(t, ())}
            coeffs[col_of[(j, t)]] = _Q1
            rows.append((coeffs, "=", _Q0))
    return linear_program(len(objective), objective, rows), col_of


def _assignments(D, size):
    return list(product(range(D), repeat=size))


def solve_sa(inst, k, l, budget=None, pivot="dantzig"):
    """Exact optimum of the SA(k,l) relaxation.

    Returns SaResult; status "infeasible" (value inf) when the LP is empty,
    else "optimal" with the exact value and a basic optimal SaSolution.
    """
    index = build_scope_index(inst, k, l, budget)
    supports = consistent_supports(index)
    if supports is None:
        return SaResult("infeasible", INF, None)
    lp, col_of = _reduced_lp(index, supports)
    res = solve_lp(lp, pivot=pivot)
    if res.status == "infeasible":
        return SaResult("infeasible", INF, None, res.iterations)
    if res.status != "optimal":
        raise InternalError("SA polytope is bounded; simplex reported " + res.status)
    D = index.domain_size
    dists = {}
    for i, info in enumerate(index.scopes):
        tuples = _assignments(D, len(info.vars))
        dist = {}
        for s in sorted(supports[i]):
            v = res.point[col_of[(i, s)]]
            if v != 0:
                dist[tuples[s]] = v
        dists[info.vars] = dist
    return SaResult("optimal", ExtRat(res.value), SaSolution(dists), res.iterations)


def objective_value(inst, sol):
    """The SA objective of a solution: merged tables against scope distributions."""
    by_scope = {}
    for c in inst.constraints:
        svars = tuple(sorted(set(c.scope)))
        by_scope.setdefault(svars, []).append(c)
    total = _Q0
    for svars, cons in sorted(by_scope.items(), key=lambda kv: (len(kv[0]), kv[0])):
        if svars not in sol.dists:
            raise InputError(f"solution lacks a distribution for scope {svars}")
        table = _merged_table(inst, svars, cons)
        pos = {v: t for t, v in enumerate(svars)}
        D = inst.domain_size
        strides = _strides(D, len(svars))
        for sigma, p in sol.dists[svars].items():
            if p == 0:
                continue
            idx = sum(sigma[t] * strides[t] for t in range(len(svars)))
            v = table[idx]
            if not v.is_finite:
                return INF
            total += p * v.q
    return ExtRat(total)


@dataclass(frozen=True)
class SaCheck:
    feasible: bool
    violation: str  # "" when feasible
    objective: ExtRat


def verify_sa_feasible(inst, sol, k, l, budget=None):
    """Independent check of an SA(k,l) certificate.

    Verifies scope coverage, non-negativity, normalization, zero mass on
    infeasible assignments, and every marginal row; reports the first
    violation in deterministic scope/pair order.
    """
    index = build_scope_index(inst, k, l, budget)
    D = index.domain_size
    known = {info.vars for info in index.scopes}
    for svars in sol.dists:
        if tuple(svars) not in known:
            return SaCheck(False, f"unexpected scope {svars}", INF)
    for i, info in enumerate(index.scopes):
        if info.vars not in sol.dists:
            return SaCheck(False, f"missing scope {info.vars}", INF)
        dist = sol.dists[info.vars]
        total = _Q0
        strides = _strides(D, len(info.vars))
        for sigma, p in sorted(dist.items()):
            if len(sigma) != len(info.vars) or any(
                not 0 <= x < D for x in sigma
            ):
                return SaCheck(False, f"scope {info.vars}: bad assignment {sigma}", INF)
            if p < 0:
                return SaCheck(
                    False, f"scope {info.vars}: negative weight at {sigma}", INF
                )
            if p != 0 and info.table is not None:
                idx = sum(sigma[t] * strides[t] for t in range(len(sigma)))
                if not info.table[idx].is_finite:
                    return SaCheck(
                        False,
                        f"scope {info.vars}: mass {p} on infeasible {sigma}",
                        INF,
                    )
            total += p
        if total != 1:
            return SaCheck(False, f"scope {info.vars}: total mass {total} != 1", INF)
    for j, i in index.pairs:
        sj, si = index.scopes[j].vars, index.scopes[i].vars
        pos = [si.index(v) for v in sj]
        marg = {}
        for sigma, p in sol.dists[si].items():
            tau = tuple(sigma[t] for t in pos)
            marg[tau] = marg.get(tau, _Q0) + p
        dj = sol.dists[sj]
        for tau in sorted(set(marg) | set(dj)):
            if marg.get(tau, _Q0) != dj.get(tau, _Q0):
                return SaCheck(
                    False,
                    f"marginal of {si} onto {sj} at {tau}: "
                    f"{marg.get(tau, _Q0)} != {dj.get(tau, _Q0)}",
                    INF,
                )
    return SaCheck(True, "", objective_value(inst, sol))


def integral_solution(inst, k, l, assignment, budget=None):
    """The SA certificate putting probability 1 on a full assignment's restrictions."""
    if len(assignment) != inst.num_vars:
        raise InputError("assignment length differs from num_vars")
    index = build_scope_index(inst, k, l, budget)
    dists = {}
    for info in index.scopes:
        sigma = tuple(assignment[v] for v in info.vars)
        dists[info.vars] = {sigma: _Q1}
    return SaSolution(dists)


def symmetrize(sol, omega, budget=None):
    """Push a fractional polymorphism through every scope distribution.

    New weight of sigma is the probability that f applied coordinatewise to
    m independent draws from the old distribution equals sigma, f ~ omega.
    Feasibility is preserved and the objective never increases when omega
    improves the instance's language.
    """
    limit = enumeration_budget(budget)
    m = omega.arity
    new_dists = {}
    for svars, dist in sol.dists.items():
        entries = [(sigma, p) for sigma, p in sorted(dist.items()) if p != 0]
        if len(entries) ** m > limit:
            raise BudgetError(f"scope {svars}: |support|^{m} exceeds budget")
        out = {}
        for f, w in omega.items():
            for draws in product(entries, repeat=m):
                prob = w
                for _, p in draws:
                    prob *= p
                if prob == 0:
                    continue
                image = tuple(
                    f.value(tuple(draws[t][0][pos] for t in range(m)))
                    for pos in range(len(svars))
                )
                out[image] = out.get(image, _Q0) + prob
        new_dists[svars] = out
    return SaSolution(new_dists)


def extend_width1(inst, sol, l, budget=None):
    """Extend an SA(1,1) solution to SA(1,l) with the same objective.

    Scopes of the (1,1) relaxation keep their distributions; every newly
    added scope receives the product of its variables' unary marginals.
    """
    base = build_scope_index(inst, 1, 1, budget)
    for info in base.scopes:
        if info.vars not in sol.dists:
            raise InputError(f"solution lacks SA(1,1) scope {info.vars}")
    unary = {}
    for v in range(inst.num_vars):
        unary[v] = sol.dists[(v,)]
    index = build_scope_index(inst, 1, l, budget)
    dists = {}
    for info in index.scopes:
        if info.vars in sol.dists:
            dists[info.vars] = dict(sol.dists[info.vars])
            continue
        dist = {}
        for sigma in product(range(inst.domain_size), repeat=len(info.vars)):
            p = _Q1
            for t, v in enumerate(info.vars):
                p *= unary[v].get((sigma[t],), _Q0)
                if p == 0:
                    break
            if p != 0:
                dist[sigma] = p
        dists[info.vars] = dist
    return SaSolution(dists)


@dataclass(frozen=True)
class ExtractResult:
    success: bool
    assignment: tuple  # None on failure
    value: ExtRat  # instance value of the assignment when successful
    reason: str  # "" on success


def extract_assignment(inst, k, l, budget=None):
    """Self-reduction: pin variables one by one, keeping the SA optimum.

    Variables are processed by index, labels by value.  A label is fixed when
    re-solving with that constant pinned preserves the SA(k,l) optimum
    exactly.  The final assignment is verified against the instance; any
    mismatch is reported as a failure, never papered over.
    """
    base = solve_sa(inst, k, l, budget)
    if base.status != "optimal":
        return ExtractResult(False, None, INF, "SA relaxation is infeasible")
    target = base.value
    D = inst.domain_size
    relations = list(inst.relations)
    names = list(inst.relation_names)
    const_ids = {}
    for label in range(D):
        table = tuple(ExtRat(0) if x == label else INF for x in range(D))
        rel = WeightedRelation(1, D, table)
        for rid, existing in enumerate(relations):
            if existing == rel:
                const_ids[label] = rid
                break
        else:
            const_ids[label] = len(relations)
            relations.append(rel)
            name = f"const{label}"
            while name in names:
                name += "_"
            names.append(name)
    work = Instance(
        inst.num_vars,
        D,
        tuple(relations),
        tuple(names),
        inst.constraints,
    )
    for var in range(inst.num_vars):
        fixed = None
        for label in range(D):
            trial = Instance(
                work.num_vars,
                D,
                work.relations,
                work.relation_names,
                work.constraints + (Constraint(const_ids[label], (var,)),),
            )
            res = solve_sa(trial, k, l, budget)
            if res.status == "optimal" and res.value == target:
                work = trial
                fixed = label
                break
        if fixed is None:
            return ExtractResult(
                False,
                None,
                INF,
                f"variable {var}: no label preserves the SA optimum {target}",
            )
    assignment = [None] * inst.num_vars
    for c in work.constraints[len(inst.constraints):]:
        assignment[c.scope[0]] = next(
            x for x in range(D) if work.relations[c.relation].values[x].is_finite
        )
    assignment = tuple(assignment)
    val = evaluate(inst, assignment)
    if val != target:
        return ExtractResult(
            False,
            assignment,
            val,
            f"pinned assignment has value {val}, SA optimum is {target}",
        )
    return ExtractResult(True, assignment, val, "")
