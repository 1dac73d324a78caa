"""(k,l)-minimality: local consistency propagation for crisp instances.

Keeps a set P_X of allowed partial assignments for every constraint scope
set and every non-empty variable subset of size <= l, then prunes until,
for every nested pair with small side of size <= k, P on the small side is
exactly the projection of P on the large side.  An empty P proves
unsatisfiability; the converse holds only on languages of suitable width.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations, product

from .errors import BudgetError, InputError, enumeration_budget


@dataclass(frozen=True)
class MinimalityState:
    """Fixpoint families P_X keyed by sorted variable tuple."""

    k: int
    l: int
    sets: dict  # {svars: frozenset of assignment tuples}

    @property
    def empty(self):
        return any(not s for s in self.sets.values())


def kl_minimality(inst, k, l, order="fifo", budget=None):
    """Run (k,l)-minimality to fixpoint; `order` picks the worklist discipline.

    The fixpoint is order-independent; "fifo" and "lifo" exist to let tests
    assert exactly that.
    """
    if not 1 <= k <= l:
        raise InputError("need 1 <= k <= l")
    if l > max(inst.num_vars, 1):
        raise InputError("l exceeds the number of variables")
    if order not in ("fifo", "lifo"):
        raise InputError(f"unknown worklist order {order!r}")
    D = inst.domain_size
    used = {c.relation for c in inst.constraints}
    for rid in sorted(used):
        if not inst.relations[rid].is_crisp:
            raise InputError("kl_minimality needs a crisp instance")

    scope_sets = set()
    by_scope = {}
    for c in inst.constraints:
        svars = tuple(sorted(set(c.scope)))
        scope_sets.add(svars)
        by_scope.setdefault(svars, []).append(c)
    for size in range(1, min(l, inst.num_vars) + 1):
        for combo in combinations(range(inst.num_vars), size):
            scope_sets.add(combo)
    ordered = sorted(scope_sets, key=lambda s: (len(s), s))
    total = sum(D ** len(s) for s in ordered)
    if total > enumeration_budget(budget):
        raise BudgetError(f"{total} partial assignments exceed enumeration budget")

    sets = {}
    for svars in ordered:
        allowed = set(product(range(D), repeat=len(svars)))
        for c in by_scope.get(svars, ()):
            rel = inst.relations[c.relation]
            pos = {v: t for t, v in enumerate(svars)}
            positions = tuple(pos[v] for v in c.scope)
            allowed = {
                sigma
                for sigma in allowed
                if rel.value(tuple(sigma[p] for p in positions)).is_finite
            }
        sets[svars] = allowed

    pairs = []
    for svars in ordered:
        for size in range(1, min(k, len(svars) - 1) + 1):
            for sub in combinations(svars, size):
                pairs.append((sub, svars))
    touching = {}
    for idx, (sub, sup) in enumerate(pairs):
        touching.setdefault(sub, []).append(idx)
        touching.setdefault(sup, []).append(idx)

    work = deque(range(len(pairs)))
    queued = set(work)
    while work:
        idx = work.popleft() if order == "fifo" else work.pop()
        queued.discard(idx)
        sub, sup = pairs[idx]
        pos = [sup.index(v) for v in sub]
        p_sub, p_sup = sets[sub], sets[sup]
        dead_sup = {s for s in p_sup if tuple(s[p] for p in pos) not in p_sub}
        changed = []
        if dead_sup:
            p_sup -= dead_sup
            changed.append(sup)
        reached = {tuple(s[p] for p in pos) for s in p_sup}
        if p_sub - reached:
            sets[sub] = p_sub & reached
            changed.append(sub)
        for svars in changed:
            for q in touching[svars]:
                if q not in queued:
                    work.append(q)
                    queued.add(q)
    return MinimalityState(k, l, {s: frozenset(v) for s, v in sets.items()})
