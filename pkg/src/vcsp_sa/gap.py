"""Torus equation instances that fool every fixed-level SA relaxation.

The construction lives on the n-by-n torus grid: one variable per vertex
and per edge, and one ternary group equation per cell relating consecutive
edge variables.  The parameter tables make the whole system unsatisfiable
while still admitting an exact distribution-valued certificate for the
SA(k,k) relaxation whenever n > 2k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb

from .core import Constraint, Instance, crisp_relation, express
from .errors import BudgetError, InputError, InternalError, enumeration_budget
from .rationals import Q
from .sherali_adams import SaSolution, verify_sa_feasible

__all__ = [
    "TorusInstance",
    "ClosureSet",
    "AuditResult",
    "sum_relation",
    "offset_relation",
    "make_eqs_language",
    "express_r0_rg",
    "canonical_parameters",
    "make_torus_instance",
    "closure_Xbar",
    "closure_assignments",
    "build_gap_solution",
    "audit_gap_solution",
    "verify_sa_feasible",
]


def sum_relation(group, arity, target):
    """The crisp relation {x_1 + ... + x_m = a} over the group's elements."""
    if arity < 1:
        raise InputError("need arity >= 1")
    allowed = [
        t
        for t in product(range(group.order), repeat=arity)
        if group.sum(t) == target
    ]
    return crisp_relation(arity, group.order, allowed)


def offset_relation(group, t):
    """The crisp ternary relation {(u, v, w) : u = v + w + t}."""
    allowed = [
        (group.add(group.add(v, w), t), v, w)
        for v in range(group.order)
        for w in range(group.order)
    ]
    return crisp_relation(3, group.order, allowed)


def make_eqs_language(group, r):
    """The equation language: every relation {x_1+...+x_m = a}, 1 <= m <= r.

    Returns an ordered name -> relation mapping with names like ``R2_1``
    (arity first, then the right-hand side element).
    """
    if r < 1:
        raise InputError("need r >= 1")
    out = {}
    for m in range(1, r + 1):
        for a in range(group.order):
            out[f"R{m}_{a}"] = sum_relation(group, m, a)
    return out


def express_r0_rg(group):
    """Derive {x = y+z} and {x = y+z+g} from the equation language.

    Each relation is expressed by a five-variable gadget: a ternary sum
    constraint on (x, y', z') plus two binary sums forcing y' = -y and
    z' = -z, projected onto (x, y, z).  The expressed tables are checked
    against the tables computed directly from the group law.
    """
    r2_zero = sum_relation(group, 2, group.zero)
    out = []
    for t in (group.zero, group.g):
        gadget = Instance(
            5,
            group.order,
            (sum_relation(group, 3, t), r2_zero),
            ("sum3", "sum2"),
            (
                Constraint(0, (0, 3, 4)),
                Constraint(1, (3, 1)),
                Constraint(1, (4, 2)),
            ),
        )
        rel = express(gadget, (0, 1, 2))
        if rel != offset_relation(group, t):
            raise InternalError("expressed relation differs from the group law")
        out.append(rel)
    return tuple(out)


@dataclass(frozen=True)
class TorusInstance:
    """The n-by-n torus system of ternary group equations.

    Variable ids: the vertex x_{a,b} is a*n+b, the horizontal edge y_{a,b}
    (from x_{a,b} to x_{a,b+1}) is n^2 + a*n + b, and the vertical edge
    z_{a,b} (from x_{a,b} to x_{a+1,b}) is 2n^2 + a*n + b.  The parameter
    tables take values in {zero, g} and must satisfy sum(c) - sum(d) = g,
    which is exactly what makes the instance unsatisfiable.
    """

    n: int
    group: object
    c: tuple
    d: tuple

    def __post_init__(self):
        n, G = self.n, self.group
        if n < 1:
            raise InputError("need n >= 1")
        for tbl in (self.c, self.d):
            if len(tbl) != n or any(len(row) != n for row in tbl):
                raise InputError("parameter tables must be n x n")
            for row in tbl:
                for v in row:
                    if v != G.zero and v != G.g:
                        raise InputError("parameters must be zero or g")
        diff = G.sub(
            G.sum(v for row in self.c for v in row),
            G.sum(v for row in self.d for v in row),
        )
        if diff != G.g:
            raise InputError("parameters must satisfy sum(c) - sum(d) = g")

    @property
    def num_vars(self):
        return 3 * self.n * self.n

    def x(self, a, b):
        return (a % self.n) * self.n + b % self.n

    def y(self, a, b):
        return self.n * self.n + (a % self.n) * self.n + b % self.n

    def z(self, a, b):
        return 2 * self.n * self.n + (a % self.n) * self.n + b % self.n

    def decode(self, v):
        """(kind, a, b) for a variable id, with kind one of "x", "y", "z"."""
        nn = self.n * self.n
        if not 0 <= v < 3 * nn:
            raise InputError(f"variable {v} out of range")
        kind, rest = divmod(v, nn)
        a, b = divmod(rest, self.n)
        return "xyz"[kind], a, b

    def constraint_scopes(self):
        """The merged scope sets of the instance, as sorted tuples."""
        out = []
        for a in range(self.n):
            for b in range(self.n):
                out.append(
                    tuple(sorted({self.y(a, b + 1), self.y(a, b), self.x(a, b)}))
                )
                out.append(
                    tuple(sorted({self.z(a + 1, b), self.z(a, b), self.x(a, b)}))
                )
        return out


def canonical_parameters(group, n):
    """c_{0,0} = g and every other parameter zero."""
    z, g = group.zero, group.g
    c = tuple(
        tuple(g if a == 0 and b == 0 else z for b in range(n)) for a in range(n)
    )
    d = tuple(tuple(z for _ in range(n)) for _ in range(n))
    return c, d


def make_torus_instance(group, n, rule=None):
    """The unsatisfiable torus instance I_n; returns (TorusInstance, Instance).

    Constraints, with all indices mod n:

        y_{a,b+1} = y_{a,b} + x_{a,b} + c_{a,b}
        z_{a+1,b} = z_{a,b} + x_{a,b} + d_{a,b}

    ``rule(a, b) -> (c_ab, d_ab)`` overrides the canonical parameter choice;
    the resulting tables must keep sum(c) - sum(d) = g.  Summing all
    equations of each kind telescopes the edge variables away and leaves
    0 = sum(c) - sum(d), so no assignment satisfies the instance.
    """
    if n < 1:
        raise InputError("need n >= 1")
    if rule is None:
        c, d = canonical_parameters(group, n)
    else:
        picks = [[rule(a, b) for b in range(n)] for a in range(n)]
        c = tuple(tuple(p[0] for p in row) for row in picks)
        d = tuple(tuple(p[1] for p in row) for row in picks)
    torus = TorusInstance(n, group, c, d)
    rels = (offset_relation(group, group.zero), offset_relation(group, group.g))
    rel_of = {group.zero: 0, group.g: 1}
    cons = []
    for a in range(n):
        for b in range(n):
            cons.append(
                Constraint(
                    rel_of[c[a][b]],
                    (torus.y(a, b + 1), torus.y(a, b), torus.x(a, b)),
                )
            )
            cons.append(
                Constraint(
                    rel_of[d[a][b]],
                    (torus.z(a + 1, b), torus.z(a, b), torus.x(a, b)),
                )
            )
    inst = Instance(torus.num_vars, group.order, rels, ("R0", "Rg"), tuple(cons))
    return torus, inst


@lru_cache(maxsize=None)
def _grid_masks(n):
    """Neighbour bitmasks plus full row/column masks of the n-torus vertices."""
    nbr = []
    for a in range(n):
        for b in range(n):
            m = 0
            for aa, bb in ((a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1)):
                m |= 1 << ((aa % n) * n + bb % n)
            nbr.append(m)
    rows = tuple(sum(1 << (a * n + b) for b in range(n)) for a in range(n))
    cols = tuple(sum(1 << (a * n + b) for a in range(n)) for b in range(n))
    return tuple(nbr), rows, cols


@dataclass(frozen=True)
class ClosureSet:
    """The closure of a variable set inside the torus.

    ``vertices`` is the closed vertex set S (x-variable ids), ``xbar`` all
    of Var(T[S]): S plus every edge variable with both endpoints in S.
    ``hruns`` holds one (a, b0, length) triple per horizontal component
    (maximal chain of consecutive y-edges in row a starting at column b0)
    and ``vruns`` one (b, a0, length) triple per vertical component.  The
    assignments on ``xbar`` satisfying every constraint inside it number
    exactly |G|^(c_count + h_count + v_count).
    """

    svars: tuple
    vertices: tuple
    xbar: tuple
    c_count: int
    h_count: int
    v_count: int
    hruns: tuple
    vruns: tuple

    @property
    def free_count(self):
        return self.c_count + self.h_count + self.v_count


def closure_Xbar(X, torus):
    """Smallest closed superset of the variable set X.

    The closed vertex set S is V_x minus the unique component of the
    untouched vertices that contains a full row and a full column; it
    excludes a cross, has a connected complement, and contains the
    endpoints of every variable of X.  X must leave some row and some
    column untouched (|X| < n/2 always suffices).
    """
    n = torus.n
    nn = n * n
    svars = tuple(sorted(set(X)))
    nbr, rows, cols = _grid_masks(n)
    touched = 0
    for v in svars:
        if not 0 <= v < 3 * nn:
            raise InputError(f"variable {v} out of range")
        kind, rest = divmod(v, nn)
        touched |= 1 << rest
        if kind == 1:
            a, b = divmod(rest, n)
            touched |= 1 << (a * n + (b + 1) % n)
        elif kind == 2:
            a, b = divmod(rest, n)
            touched |= 1 << (((a + 1) % n) * n + b)
    free_rows = [a for a in range(n) if rows[a] & touched == 0]
    free_cols = [b for b in range(n) if cols[b] & touched == 0]
    if not free_rows or not free_cols:
        if 2 * len(svars) < n:
            raise InternalError("no untouched cross despite |X| < n/2")
        raise InputError(
            "variable set leaves no untouched row and column; need |X| < n/2"
        )
    full = (1 << nn) - 1
    open_mask = full & ~touched
    comp = 1 << (free_rows[0] * n + free_cols[0])
    frontier = comp
    while frontier:
        grow = 0
        f = frontier
        while f:
            bit = f & -f
            f ^= bit
            grow |= nbr[bit.bit_length() - 1]
        frontier = grow & open_mask & ~comp
        comp |= frontier
    rmask = 0
    for a in free_rows:
        rmask |= rows[a]
    cmask = 0
    for b in free_cols:
        cmask |= cols[b]
    if (rmask & cmask) & ~comp:
        raise InternalError("second cross-bearing component in the complement")
    s_mask = full & ~comp
    vertices = []
    m = s_mask
    while m:
        bit = m & -m
        m ^= bit
        vertices.append(bit.bit_length() - 1)
    y_by_row = {}
    z_by_col = {}
    xbar = list(vertices)
    for p in vertices:
        a, b = divmod(p, n)
        if s_mask >> (a * n + (b + 1) % n) & 1:
            y_by_row.setdefault(a, set()).add(b)
            xbar.append(nn + p)
        if s_mask >> (((a + 1) % n) * n + b) & 1:
            z_by_col.setdefault(b, set()).add(a)
            xbar.append(2 * nn + p)
    hruns = []
    for a in sorted(y_by_row):
        bs = y_by_row[a]
        for b in sorted(bs):
            if (b - 1) % n not in bs:
                length = 1
                while (b + length) % n in bs:
                    length += 1
                hruns.append((a, b, length))
    vruns = []
    for b in sorted(z_by_col):
        as_ = z_by_col[b]
        for a in sorted(as_):
            if (a - 1) % n not in as_:
                length = 1
                while (a + length) % n in as_:
                    length += 1
                vruns.append((b, a, length))
    xbar.sort()
    return ClosureSet(
        svars,
        tuple(vertices),
        tuple(xbar),
        len(vertices),
        len(hruns),
        len(vruns),
        tuple(hruns),
        tuple(vruns),
    )


def closure_assignments(torus, closure, budget=None):
    """Every assignment on the closure satisfying its internal constraints.

    Generated the free-choice way: one group element per vertex and one per
    horizontal/vertical component (the value of the component's first
    edge), with the remaining edges following by propagation along the
    chain equations.  Returns tuples aligned with ``closure.xbar``.
    """
    G = torus.group
    n = torus.n
    nn = n * n
    free = closure.free_count
    count = G.order**free
    if count > enumeration_budget(budget):
        raise BudgetError(f"{count} closure assignments exceed enumeration budget")
    vals = {}
    out = []
    n_verts = len(closure.vertices)
    n_h = len(closure.hruns)
    for choice in product(range(G.order), repeat=free):
        for i, p in enumerate(closure.vertices):
            vals[p] = choice[i]
        for r, (a, b0, length) in enumerate(closure.hruns):
            e = choice[n_verts + r]
            for t in range(length):
                b = (b0 + t) % n
                vals[nn + a * n + b] = e
                e = G.add(e, G.add(vals[a * n + b], torus.c[a][b]))
        for r, (b, a0, length) in enumerate(closure.vruns):
            e = choice[n_verts + n_h + r]
            for t in range(length):
                a = (a0 + t) % n
                vals[2 * nn + a * n + b] = e
                e = G.add(e, G.add(vals[a * n + b], torus.d[a][b]))
        out.append(tuple(vals[v] for v in closure.xbar))
    return out


def _edge_run(closure, kind, a, b, n):
    """(run index, offset) of an edge variable inside its closure component."""
    if kind == 1:
        for r, (ra, rb, length) in enumerate(closure.hruns):
            if ra == a:
                t = (b - rb) % n
                if t < length:
                    return r, t
    else:
        for r, (rb, ra, length) in enumerate(closure.vruns):
            if rb == b:
                t = (a - ra) % n
                if t < length:
                    return r, t
    raise InternalError("edge variable missing from its closure components")


def _scope_plan(torus, closure):
    """Equation structure of a scope: pin count, used runs, difference rows.

    Every scope variable is a linear expression over the free generators of
    the closure: a vertex variable pins its own generator, while an edge
    variable equals its component's generator plus the vertices (and
    parameters) accumulated along the chain.  The first edge per component
    absorbs that component's generator; each pair of consecutive scope
    edges in the same component leaves a difference row

        sum(unpinned vertices between them) =
            sigma_high - sigma_low - sum(pinned values) - sum(parameters)

    over the remaining vertex generators.
    """
    n = torus.n
    nn = n * n
    G = torus.group
    pins = {}
    by_run = {}
    for pos, v in enumerate(closure.svars):
        kind, rest = divmod(v, nn)
        if kind == 0:
            pins[rest] = pos
        else:
            a, b = divmod(rest, n)
            run, t = _edge_run(closure, kind, a, b, n)
            by_run.setdefault((kind, run), []).append((t, pos))
    rows = []
    for (kind, run), entries in sorted(by_run.items()):
        entries.sort()
        if kind == 1:
            a, b0, _ = closure.hruns[run]
        else:
            b, a0, _ = closure.vruns[run]
        for (t1, p1), (t2, p2) in zip(entries, entries[1:]):
            unpinned = []
            pinned_pos = []
            const = G.zero
            for s in range(t1, t2):
                if kind == 1:
                    bb = (b0 + s) % n
                    vid = a * n + bb
                    const = G.add(const, torus.c[a][bb])
                else:
                    aa = (a0 + s) % n
                    vid = aa * n + b
                    const = G.add(const, torus.d[aa][b])
                if vid in pins:
                    pinned_pos.append(pins[vid])
                else:
                    unpinned.append(vid)
            rows.append((tuple(unpinned), tuple(pinned_pos), const, p2, p1))
    return len(pins), len(by_run), rows


def _row_rhs(G, sigma, row):
    _, pinned_pos, const, p_hi, p_lo = row
    acc = const
    for p in pinned_pos:
        acc = G.add(acc, sigma[p])
    return G.sub(G.sub(sigma[p_hi], sigma[p_lo]), acc)


def _scope_distribution(torus, closure, sigmas, weight, budget=None):
    """Exact scope distribution {sigma: Q}, zero entries omitted.

    Each distribution value is |G|^-t where t counts the generators the
    scope equations consume; difference rows without free vertices only
    filter which sigma are consistent.  Components whose difference rows
    share vertices (possible once a scope holds four or more edges) fall
    back to exhaustively counting the solutions of those rows.
    """
    G = torus.group
    zero = G.zero
    n_pins, n_runs, rows = _scope_plan(torus, closure)
    checks = [r for r in rows if not r[0]]
    open_rows = [r for r in rows if r[0]]
    support = set()
    disjoint = True
    for r in open_rows:
        if disjoint and any(v in support for v in r[0]):
            disjoint = False
        support.update(r[0])
    dist = {}
    if disjoint:
        w = weight(n_pins + n_runs + len(open_rows))
        if not checks:
            return {sigma: w for sigma in sigmas}
        for sigma in sigmas:
            if all(_row_rhs(G, sigma, row) == zero for row in checks):
                dist[sigma] = w
        return dist
    q = len(support)
    if G.order**q > enumeration_budget(budget):
        raise BudgetError("overlapping difference rows exceed enumeration budget")
    vpos = {v: i for i, v in enumerate(sorted(support))}
    targets = [tuple(vpos[v] for v in r[0]) for r in open_rows]
    scale = weight(n_pins + n_runs + q)
    for sigma in sigmas:
        if not all(_row_rhs(G, sigma, row) == zero for row in checks):
            continue
        want = [_row_rhs(G, sigma, row) for row in open_rows]
        count = 0
        for vals in product(range(G.order), repeat=q):
            for idxs, rhs in zip(targets, want):
                if G.sum(vals[i] for i in idxs) != rhs:
                    break
            else:
                count += 1
        if count:
            dist[sigma] = count * scale
    return dist


def build_gap_solution(torus, k, budget=None):
    """The explicit feasible SA(k,k) certificate of the torus instance.

    For every scope X with at most k variables (plus the constraint scopes)
    the distribution gives each sigma the exact fraction of assignments on
    the closure of X that satisfy all constraints inside the closure and
    restrict to sigma.  Marginal consistency follows from the closure
    counting law, so the result passes verify_sa_feasible at level (k,k)
    even though the instance itself is unsatisfiable.  Requires n > 2k.
    """
    n = torus.n
    if k < 1:
        raise InputError("need k >= 1")
    if n <= 2 * k:
        raise InputError("need n > 2k for the certificate to exist")
    nvars = torus.num_vars
    order = torus.group.order
    total = sum(comb(nvars, s) * order**s for s in range(1, k + 1))
    if total > enumeration_budget(budget):
        raise BudgetError(f"{total} certificate entries exceed enumeration budget")
    sigmas = {
        size: tuple(product(range(order), repeat=size))
        for size in range(1, max(k, 3) + 1)
    }
    weights = {}

    def weight(t):
        w = weights.get(t)
        if w is None:
            w = Q(1, order**t)
            weights[t] = w
        return w

    dists = {}
    for size in range(1, k + 1):
        for svars in combinations(range(nvars), size):
            closure = closure_Xbar(svars, torus)
            dists[svars] = _scope_distribution(
                torus, closure, sigmas[size], weight, budget
            )
    for svars in torus.constraint_scopes():
        if svars not in dists:
            closure = closure_Xbar(svars, torus)
            dists[svars] = _scope_distribution(
                torus, closure, sigmas[len(svars)], weight, budget
            )
    return SaSolution(dists)


@dataclass(frozen=True)
class AuditResult:
    """Outcome of a randomized certificate audit."""

    checked: int
    feasible: bool
    detail: str  # "" when every sampled check passed


def audit_gap_solution(torus, k, samples, seed=0, budget=None):
    """Randomized marginal audit of the SA(k,k) certificate.

    Draws ``samples`` scope pairs X_j within X_i (|X_i| <= k, with the
    constraint scopes mixed in) using a seeded generator, builds only those
    two distributions, and checks non-negativity, normalization, and the
    marginal rows on the spot.  Distributions drawn on a constraint scope
    must additionally put no mass on assignments violating the constraint.
    This bounds the runtime for torus sizes where the full certificate
    would be too large to materialize.
    """
    n = torus.n
    if k < 1 or n <= 2 * k:
        raise InputError("need k >= 1 and n > 2k")
    rng = random.Random(seed)
    G = torus.group
    order = G.order
    sigmas = {
        size: tuple(product(range(order), repeat=size))
        for size in range(1, max(k, 3) + 1)
    }
    weights = {}

    def weight(t):
        w = weights.get(t)
        if w is None:
            w = Q(1, order**t)
            weights[t] = w
        return w

    def table(svars):
        closure = closure_Xbar(svars, torus)
        return _scope_distribution(
            torus, closure, sigmas[len(svars)], weight, budget
        )

    cells = []
    for a in range(n):
        for b in range(n):
            sc = sorted({torus.y(a, b + 1), torus.y(a, b), torus.x(a, b)})
            cells.append(
                (
                    tuple(sc),
                    sc.index(torus.y(a, b + 1)),
                    sc.index(torus.y(a, b)),
                    sc.index(torus.x(a, b)),
                    torus.c[a][b],
                )
            )
            sc = sorted({torus.z(a + 1, b), torus.z(a, b), torus.x(a, b)})
            cells.append(
                (
                    tuple(sc),
                    sc.index(torus.z(a + 1, b)),
                    sc.index(torus.z(a, b)),
                    sc.index(torus.x(a, b)),
                    torus.d[a][b],
                )
            )
    one = Q(1)
    zero = Q(0)
    checked = 0
    for trial in range(samples):
        cell = None
        if k < 2 or trial % 4 == 3:
            cell = cells[rng.randrange(len(cells))]
            si = list(cell[0])
        else:
            si = sorted(rng.sample(range(torus.num_vars), rng.randint(2, k)))
        sj = sorted(rng.sample(si, rng.randint(1, len(si) - 1)))
        di = table(tuple(si))
        dj = table(tuple(sj))
        if sum(di.values(), zero) != one or sum(dj.values(), zero) != one:
            return AuditResult(checked, False, f"scope {si} or {sj}: mass != 1")
        if cell is not None:
            _, hi, lo, vx, param = cell
            for sigma, p in di.items():
                if p != 0 and sigma[hi] != G.add(sigma[lo], G.add(sigma[vx], param)):
                    return AuditResult(
                        checked,
                        False,
                        f"mass on assignment violating the constraint at {si}",
                    )
        pos = [si.index(v) for v in sj]
        marg = {}
        for sigma, p in di.items():
            if p < 0:
                return AuditResult(checked, False, f"negative mass at {si}")
            tau = tuple(sigma[t] for t in pos)
            marg[tau] = marg.get(tau, zero) + p
        for tau in set(marg) | set(dj):
            if marg.get(tau, zero) != dj.get(tau, zero):
                return AuditResult(
                    checked,
                    False,
                    f"marginal of {tuple(si)} onto {tuple(sj)} differs at {tau}",
                )
        checked += 1
    return AuditResult(checked, True, "")
