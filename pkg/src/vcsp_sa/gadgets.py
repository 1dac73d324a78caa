"""Instance rewrites that eliminate derived relations.

Three reductions on instances: replacing constraints on the
minimum-places relation of a weighted relation by weighted copies of the
relation itself, replacing constraints on its feasibility relation
likewise (duplicating the rest of the instance), and contracting
equality constraints to a quotient instance.  The first two preserve
optimal assignments through an explicit copy count derived from the
instance's value range; the constants are reported alongside the rewritten
instance so callers and tests can re-check the accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Constraint, Instance, WeightedRelation, feas_relation, opt_relation
from .errors import InputError
from .rationals import Q


@dataclass(frozen=True)
class GadgetResult:
    """A rewritten instance together with its accounting constants.

    ``copies`` is the duplication factor C; ``bound`` the value bound U
    entering the formula for C; ``delta`` the value granularity (0 when
    the single-finite-value shortcut applies); ``shift`` the total
    additive constant removed by internal normalization, so that the
    original optimum equals the rewritten optimum plus ``shift`` whenever
    the lemma applies; ``replaced`` the number of rewritten constraint
    occurrences, counting multiplicity.
    """

    instance: Instance
    copies: int
    bound: Q
    delta: Q
    shift: Q
    replaced: int


def _finite_min(rel: WeightedRelation) -> Q:
    finite = rel.finite_values()
    if not finite:
        raise InputError("relation with no finite values")
    return min(finite)


def _finite_max(rel: WeightedRelation) -> Q:
    return max(rel.finite_values())


def _single_finite_value(rel: WeightedRelation) -> bool:
    return len(set(rel.finite_values())) == 1


def _fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def _check_phi(instance: Instance, phi: WeightedRelation) -> None:
    if phi.domain_size != instance.domain_size:
        raise InputError("relation domain does not match the instance")
    if not phi.finite_values():
        raise InputError("relation with no finite values")


def opt_gadget(instance: Instance, phi: WeightedRelation) -> GadgetResult:
    """Replace opt(phi)-constraints by C weighted copies of phi.

    All relations are normalized to minimum 0 (the removed constants are
    summed into ``shift``).  C is 1 when phi takes a single finite value;
    otherwise C = ceil((U+1)/delta) where U sums each constraint's largest
    finite value and delta is the least nonzero value of phi.  On the
    result, an optimum above U certifies the original instance
    unsatisfiable, and otherwise the optima agree (after the shift).
    """
    _check_phi(instance, phi)
    target = opt_relation(phi)
    mins = [_finite_min(rel) for rel in instance.relations]
    rels = [
        rel if m == 0 else rel.shifted(-m)
        for rel, m in zip(instance.relations, mins)
    ]
    phi_norm = phi.shifted(-_finite_min(phi))

    shift = Q(0)
    bound = Q(0)
    replaced = 0
    for cons in instance.constraints:
        rel = rels[cons.relation]
        if not rel.finite_values():
            raise InputError("relation with no finite values")
        shift += cons.multiplicity * mins[cons.relation]
        bound += cons.multiplicity * _finite_max(rel)
        if instance.relations[cons.relation] == target:
            replaced += cons.multiplicity

    if _single_finite_value(phi_norm):
        copies = 1
        delta = Q(0)
    else:
        delta = min(v for v in phi_norm.finite_values() if v != 0)
        copies = math.ceil((bound + 1) / delta)

    names = list(instance.relation_names)
    try:
        phi_id = rels.index(phi_norm)
    except ValueError:
        phi_id = len(rels)
        rels.append(phi_norm)
        names.append(_fresh_name("gadget_phi", set(names)))

    constraints = []
    for cons in instance.constraints:
        if instance.relations[cons.relation] == target:
            constraints.append(
                Constraint(phi_id, cons.scope, cons.multiplicity * copies)
            )
        else:
            constraints.append(cons)
    rewritten = Instance(
        num_vars=instance.num_vars,
        domain_size=instance.domain_size,
        relations=tuple(rels),
        relation_names=tuple(names),
        constraints=tuple(constraints),
    )
    return GadgetResult(rewritten, copies, bound, delta, shift, replaced)


def feas_gadget(instance: Instance, phi: WeightedRelation) -> GadgetResult:
    """Replace feas(phi)-constraints by phi, duplicating the rest C times.

    phi is normalized to minimum 0 (``shift`` records the constant per
    copy).  C is 1 when phi takes a single finite value; otherwise
    C = ceil(N*(U+1)/delta) with N the number of replaced occurrences,
    U the largest finite value of phi, and delta = 1/M for the least
    common denominator M of all constraint values (and phi's).  C is
    clamped to at least 1 so an instance without feasibility constraints
    passes through unchanged.  Every optimal assignment of the result is
    optimal for the original.
    """
    _check_phi(instance, phi)
    target = feas_relation(phi)
    phi_min = _finite_min(phi)
    phi_norm = phi.shifted(-phi_min)

    replaced = 0
    denoms = [int(v.denominator) for v in phi_norm.finite_values()]
    for cons in instance.constraints:
        rel = instance.relations[cons.relation]
        if not rel.finite_values():
            raise InputError("relation with no finite values")
        if rel == target:
            replaced += cons.multiplicity
        else:
            denoms.extend(int(v.denominator) for v in rel.finite_values())

    bound = _finite_max(phi_norm)
    if _single_finite_value(phi_norm):
        copies = 1
        delta = Q(0)
    else:
        delta = Q(1, math.lcm(*denoms))
        copies = max(1, math.ceil(replaced * (bound + 1) / delta))

    rels = list(instance.relations)
    names = list(instance.relation_names)
    try:
        phi_id = rels.index(phi_norm)
    except ValueError:
        phi_id = len(rels)
        rels.append(phi_norm)
        names.append(_fresh_name("gadget_phi", set(names)))

    constraints = []
    for cons in instance.constraints:
        if instance.relations[cons.relation] == target:
            constraints.append(Constraint(phi_id, cons.scope, cons.multiplicity))
        else:
            constraints.append(
                Constraint(cons.relation, cons.scope, cons.multiplicity * copies)
            )
    rewritten = Instance(
        num_vars=instance.num_vars,
        domain_size=instance.domain_size,
        relations=tuple(rels),
        relation_names=tuple(names),
        constraints=tuple(constraints),
    )
    return GadgetResult(rewritten, copies, bound, delta, phi_min, replaced)


def _is_equality(rel: WeightedRelation) -> bool:
    if rel.arity != 2 or not rel.is_crisp:
        return False
    feas = set(rel.feasible_tuples())
    return feas == {(a, a) for a in range(rel.domain_size)}


def contract_equalities(instance: Instance, relation) -> tuple[Instance, tuple[int, ...]]:
    """Quotient the instance by its equality constraints.

    ``relation`` is the index or name of the crisp binary equality
    relation.  Variables joined by an equality constraint are merged into
    one class (represented by its least member); equality constraints are
    dropped and every other scope is rewritten through the class indices.
    Returns the quotient instance and the variable-to-class map.
    """
    if isinstance(relation, str):
        relation = instance.relation_id(relation)
    if not 0 <= relation < len(instance.relations):
        raise InputError(f"unknown relation {relation}")
    if not _is_equality(instance.relations[relation]):
        raise InputError("relation is not the binary equality relation")

    parent = list(range(instance.num_vars))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cons in instance.constraints:
        if cons.relation == relation:
            a, b = find(cons.scope[0]), find(cons.scope[1])
            if a != b:
                if a > b:
                    a, b = b, a
                parent[b] = a

    reps = sorted({find(v) for v in range(instance.num_vars)})
    index_of = {rep: i for i, rep in enumerate(reps)}
    var_map = tuple(index_of[find(v)] for v in range(instance.num_vars))

    constraints = tuple(
        Constraint(cons.relation, tuple(var_map[v] for v in cons.scope), cons.multiplicity)
        for cons in instance.constraints
        if cons.relation != relation
    )
    quotient = Instance(
        num_vars=len(reps),
        domain_size=instance.domain_size,
        relations=instance.relations,
        relation_names=instance.relation_names,
        constraints=constraints,
    )
    return quotient, var_map
