"""Valued CSP core: weighted relations, instances, exact evaluation.

A weighted relation maps tuples over a finite domain {0..D-1} to exact
rationals or +infinity.  An instance is a list of constraints, each applying
a stored relation to an ordered scope of variables (repeats allowed); its
value under an assignment is the (multiplicity-weighted) sum of the applied
relations, with infinity absorbing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import BudgetError, InputError, enumeration_budget
from .rationals import ExtRat, INF, Q


@dataclass(frozen=True)
class WeightedRelation:
    """A function D^arity -> Q union {+inf}, stored densely in row-major order."""

    arity: int
    domain_size: int
    values: tuple

    def __post_init__(self):
        if self.arity < 1:
            raise InputError("relation arity must be >= 1")
        if self.domain_size < 1:
            raise InputError("domain size must be >= 1")
        if len(self.values) != self.domain_size**self.arity:
            raise InputError(
                f"relation table needs {self.domain_size ** self.arity} entries, "
                f"got {len(self.values)}"
            )
        if not all(isinstance(v, ExtRat) for v in self.values):
            raise InputError("relation values must be ExtRat")

    def index_of(self, tup):
        idx = 0
        for t in tup:
            if not 0 <= t < self.domain_size:
                raise InputError(f"label {t} out of domain range")
            idx = idx * self.domain_size + t
        return idx

    def value(self, tup):
        if len(tup) != self.arity:
            raise InputError(f"tuple arity {len(tup)} != relation arity {self.arity}")
        return self.values[self.index_of(tup)]

    def tuples(self):
        return product(range(self.domain_size), repeat=self.arity)

    def feasible_tuples(self):
        for tup, v in zip(self.tuples(), self.values):
            if v.is_finite:
                yield tup

    @property
    def is_crisp(self):
        return all(not v.is_finite or v.q == 0 for v in self.values)

    def finite_values(self):
        return [v.q for v in self.values if v.is_finite]

    def shifted(self, delta):
        """Add the rational `delta` to every finite entry."""
        d = Q(delta)
        return WeightedRelation(
            self.arity,
            self.domain_size,
            tuple(ExtRat(v.q + d) if v.is_finite else INF for v in self.values),
        )


def make_relation(arity, domain_size, entries, default=None):
    """Build a relation from a {tuple: value} mapping.

    Unlisted tuples take `default`; with default=None every tuple must be
    listed.  Values may be ints, 'p/q' strings, Fractions or ExtRat.
    """
    size = domain_size**arity
    table = [None] * size
    probe = WeightedRelation(arity, domain_size, tuple([ExtRat(0)] * size))
    for tup, v in entries.items():
        if len(tup) != arity:
            raise InputError(f"tuple {tup} has wrong arity")
        table[probe.index_of(tup)] = ExtRat(v)
    if default is not None:
        dv = ExtRat(default)
        table = [dv if v is None else v for v in table]
    missing = sum(1 for v in table if v is None)
    if missing:
        raise InputError(f"{missing} tuples unlisted and no default given")
    return WeightedRelation(arity, domain_size, tuple(table))


def crisp_relation(arity, domain_size, allowed):
    """Crisp relation: value 0 on `allowed` tuples, +inf elsewhere."""
    return make_relation(arity, domain_size, {tuple(t): 0 for t in allowed}, default=INF)


@dataclass(frozen=True)
class Constraint:
    """A relation id applied to an ordered variable scope (repeats allowed)."""

    relation: int
    scope: tuple
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise InputError("constraint multiplicity must be >= 1")


@dataclass(frozen=True)
class Instance:
    """A VCSP instance over domain {0..domain_size-1}."""

    num_vars: int
    domain_size: int
    relations: tuple
    relation_names: tuple
    constraints: tuple

    def __post_init__(self):
        if self.num_vars < 0:
            raise InputError("num_vars must be >= 0")
        if len(self.relations) != len(self.relation_names):
            raise InputError("relations and relation_names must align")
        if len(set(self.relation_names)) != len(self.relation_names):
            raise InputError("relation names must be unique")
        for rel in self.relations:
            if rel.domain_size != self.domain_size:
                raise InputError("relation domain size differs from instance")
        for c in self.constraints:
            if not 0 <= c.relation < len(self.relations):
                raise InputError(f"constraint references unknown relation {c.relation}")
            rel = self.relations[c.relation]
            if len(c.scope) != rel.arity:
                raise InputError(f"scope {c.scope} does not match arity {rel.arity}")
            for v in c.scope:
                if not 0 <= v < self.num_vars:
                    raise InputError(f"scope variable {v} out of range")

    def relation_of(self, constraint):
        return self.relations[constraint.relation]

    def relation_id(self, name):
        try:
            return self.relation_names.index(name)
        except ValueError:
            raise InputError(f"no relation named {name!r}") from None


def instance(num_vars, domain_size, relations, constraints, names=None):
    """Convenience constructor; names default to r0, r1, ..."""
    relations = tuple(relations)
    if names is None:
        names = tuple(f"r{i}" for i in range(len(relations)))
    cons = tuple(
        c if isinstance(c, Constraint) else Constraint(c[0], tuple(c[1]))
        for c in constraints
    )
    return Instance(num_vars, domain_size, relations, tuple(names), cons)


def evaluate(inst, assignment):
    """Exact instance value of a full assignment (tuple of labels)."""
    if len(assignment) != inst.num_vars:
        raise InputError("assignment length differs from num_vars")
    total = Q(0)
    for c in inst.constraints:
        rel = inst.relations[c.relation]
        v = rel.values[rel.index_of(tuple(assignment[i] for i in c.scope))]
        if not v.is_finite:
            return INF
        total += v.q * c.multiplicity
    return ExtRat(total)


def brute_force_opt(inst, budget=None):
    """Exhaustive optimum: (value, lexicographically least witness or None).

    The witness is None exactly when every assignment is infeasible.
    """
    space = inst.domain_size**inst.num_vars if inst.num_vars else 1
    if space > enumeration_budget(budget):
        raise BudgetError(f"{space} assignments exceed enumeration budget")
    # unrolled evaluate: precompute per-constraint lookup data
    cons = [
        (inst.relations[c.relation].values, c.scope, c.multiplicity)
        for c in inst.constraints
    ]
    D = inst.domain_size
    best = None
    witness = None
    for assignment in product(range(D), repeat=inst.num_vars):
        total = Q(0)
        for values, scope, mult in cons:
            idx = 0
            for i in scope:
                idx = idx * D + assignment[i]
            v = values[idx]
            if v.q is None:
                break
            total += v.q * mult
        else:
            if best is None or total < best:
                best = total
                witness = assignment
    if best is None:
        return INF, None
    return ExtRat(best), witness


def feas_relation(rel):
    """Crisp relation keeping exactly the finite-valued tuples."""
    return WeightedRelation(
        rel.arity,
        rel.domain_size,
        tuple(ExtRat(0) if v.is_finite else INF for v in rel.values),
    )


def opt_relation(rel):
    """Crisp relation keeping exactly the minimum-valued tuples."""
    finite = rel.finite_values()
    if not finite:
        raise InputError("relation has no finite entries; opt is undefined")
    m = min(finite)
    return WeightedRelation(
        rel.arity,
        rel.domain_size,
        tuple(ExtRat(0) if (v.is_finite and v.q == m) else INF for v in rel.values),
    )


def express(inst, designated, budget=None):
    """The weighted relation expressed by an instance on designated variables.

    Entry at tuple t is the minimum instance value over all assignments whose
    restriction to `designated` (in the given order) equals t.
    """
    designated = tuple(designated)
    if len(set(designated)) != len(designated):
        raise InputError("designated variables must be distinct")
    for v in designated:
        if not 0 <= v < inst.num_vars:
            raise InputError(f"designated variable {v} out of range")
    if not designated:
        raise InputError("need at least one designated variable")
    space = inst.domain_size**inst.num_vars if inst.num_vars else 1
    if space > enumeration_budget(budget):
        raise BudgetError(f"{space} assignments exceed enumeration budget")
    D = inst.domain_size
    m = len(designated)
    table = [None] * (D**m)
    cons = [
        (inst.relations[c.relation].values, c.scope, c.multiplicity)
        for c in inst.constraints
    ]
    for assignment in product(range(D), repeat=inst.num_vars):
        total = Q(0)
        for values, scope, mult in cons:
            idx = 0
            for i in scope:
                idx = idx * D + assignment[i]
            v = values[idx]
            if v.q is None:
                break
            total += v.q * mult
        else:
            idx = 0
            for i in designated:
                idx = idx * D + assignment[i]
            cur = table[idx]
            if cur is None or total < cur:
                table[idx] = total
    return WeightedRelation(
        m, D, tuple(INF if v is None else ExtRat(v) for v in table)
    )
