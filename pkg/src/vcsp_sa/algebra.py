"""Finite operations, clones, and fractional-polymorphism testing.

This module provides the algebraic side of the library: operation tables
and their clone structure (composition, projections), polymorphism and
weighted-polymorphism checks, an exact LP-based membership test for the
support clone with Farkas certificates and separating instances on the
negative side, core computation, and the bounded-width / symmetric-operation
condition testers built on top of the membership test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .core import Constraint, Instance, WeightedRelation
from .errors import BudgetError, InputError, InternalError, enumeration_budget
from .lp import linear_program, solve_lp
from .rationals import ExtRat, Q


@dataclass(frozen=True)
class Operation:
    """A total operation f : D^m -> D stored as a dense table.

    ``values[i]`` is the result on the i-th argument tuple in
    lexicographic order (mixed-radix encoding, first argument most
    significant), matching the table layout of WeightedRelation.
    """

    arity: int
    domain_size: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise InputError("operation arity must be at least 1")
        if self.domain_size < 1:
            raise InputError("domain size must be at least 1")
        expected = self.domain_size**self.arity
        if len(self.values) != expected:
            raise InputError(
                f"operation table has {len(self.values)} entries, expected {expected}"
            )
        for v in self.values:
            if not isinstance(v, int) or not 0 <= v < self.domain_size:
                raise InputError(f"operation value {v!r} outside domain")

    def index_of(self, args) -> int:
        idx = 0
        for a in args:
            idx = idx * self.domain_size + a
        return idx

    def value(self, args) -> int:
        """Apply the operation to a tuple of domain labels."""
        return self.values[self.index_of(args)]

    def tuples(self):
        return itertools.product(range(self.domain_size), repeat=self.arity)

    @property
    def is_idempotent(self) -> bool:
        return all(self.value((a,) * self.arity) == a for a in range(self.domain_size))

    def projection_index(self) -> int | None:
        """Return i if this operation equals the i-th projection, else None."""
        for i in range(self.arity):
            if all(self.value(t) == t[i] for t in self.tuples()):
                return i
        return None


def make_operation(arity: int, domain_size: int, fn) -> Operation:
    """Build an Operation from a callable on argument tuples."""
    values = tuple(
        fn(t) for t in itertools.product(range(domain_size), repeat=arity)
    )
    return Operation(arity, domain_size, values)


def projection(arity: int, domain_size: int, position: int) -> Operation:
    """The projection onto the given argument position (0-based)."""
    if not 0 <= position < arity:
        raise InputError("projection position out of range")
    return make_operation(arity, domain_size, lambda t: t[position])


def compose(f: Operation, gs) -> Operation:
    """The composition f[g_1, ..., g_m](x) = f(g_1(x), ..., g_m(x))."""
    gs = tuple(gs)
    if len(gs) != f.arity:
        raise InputError(
            f"composition needs {f.arity} inner operations, got {len(gs)}"
        )
    if not gs:
        raise InputError("composition needs at least one inner operation")
    n = gs[0].arity
    for g in gs:
        if g.arity != n:
            raise InputError("inner operations must share one arity")
        if g.domain_size != f.domain_size:
            raise InputError("inner operations must share the outer domain")
    return make_operation(
        n, f.domain_size, lambda t: f.value(tuple(g.value(t) for g in gs))
    )


def is_wnu(f: Operation) -> bool:
    """Weak near-unanimity: idempotent with all one-off patterns equal.

    For every pair of labels x != y, the value of f on an argument tuple
    that is x everywhere except for a single y must not depend on the
    position of the y.
    """
    if f.arity < 3:
        raise InputError("weak near-unanimity needs arity at least 3")
    if not f.is_idempotent:
        return False
    for x in range(f.domain_size):
        for y in range(f.domain_size):
            if x == y:
                continue
            base = [x] * f.arity
            base[0] = y
            expected = f.value(tuple(base))
            for pos in range(1, f.arity):
                args = [x] * f.arity
                args[pos] = y
                if f.value(tuple(args)) != expected:
                    return False
    return True


def is_symmetric(f: Operation) -> bool:
    """True iff the value depends only on the multiset of arguments."""
    if f.arity < 2:
        raise InputError("symmetry needs arity at least 2")
    for t in f.tuples():
        if f.value(t) != f.value(tuple(sorted(t))):
            return False
    return True


def _check_language(language, domain_size=None):
    language = tuple(language)
    for phi in language:
        if not isinstance(phi, WeightedRelation):
            raise InputError("language members must be weighted relations")
        if domain_size is None:
            domain_size = phi.domain_size
        elif phi.domain_size != domain_size:
            raise InputError("language relations must share one domain")
    if domain_size is None:
        raise InputError("domain size needed for an empty language")
    return language, domain_size


def polymorphism_counterexample(f: Operation, language):
    """First feasibility-breaking block, or None if f is a polymorphism.

    A counterexample is a pair (relation index, block) where the block is
    an f.arity-tuple of feasible tuples whose coordinatewise image under f
    is infeasible.
    """
    language, domain_size = _check_language(language, f.domain_size)
    m = f.arity
    for r, phi in enumerate(language):
        feas = tuple(phi.feasible_tuples())
        for block in itertools.product(feas, repeat=m):
            image = tuple(
                f.value(tuple(row[t] for row in block)) for t in range(phi.arity)
            )
            if not phi.value(image).is_finite:
                return (r, block)
    return None


def is_polymorphism(f: Operation, language) -> bool:
    """True iff f preserves feasibility of every relation in the language."""
    return polymorphism_counterexample(f, language) is None


def _cell_classes(arity, domain_size, condition):
    """Partition table cells for filtered enumeration.

    Returns (fixed, classes): ``fixed`` maps a cell index to a forced
    value, and ``classes`` lists groups of cell indices constrained to
    share a value.  Enumeration ranges over one free value per class.
    """
    def cell(args):
        idx = 0
        for a in args:
            idx = idx * domain_size + a
        return idx

    all_cells = range(domain_size**arity)
    if condition is None:
        return {}, [[c] for c in all_cells]
    if condition == "idempotent":
        fixed = {cell((a,) * arity): a for a in range(domain_size)}
        classes = [[c] for c in all_cells if c not in fixed]
        return fixed, classes
    if condition == "wnu":
        if arity < 3:
            raise InputError("weak near-unanimity needs arity at least 3")
        fixed = {cell((a,) * arity): a for a in range(domain_size)}
        classes = []
        grouped = set(fixed)
        for x in range(domain_size):
            for y in range(domain_size):
                if x == y:
                    continue
                group = []
                for pos in range(arity):
                    args = [x] * arity
                    args[pos] = y
                    group.append(cell(tuple(args)))
                classes.append(group)
                grouped.update(group)
        classes.extend([c] for c in all_cells if c not in grouped)
        classes.sort(key=min)
        return fixed, classes
    if condition == "symmetric":
        if arity < 2:
            raise InputError("symmetry needs arity at least 2")
        groups = {}
        for t in itertools.product(range(domain_size), repeat=arity):
            groups.setdefault(tuple(sorted(t)), []).append(cell(t))
        classes = sorted(groups.values(), key=min)
        return {}, classes
    raise InputError(f"unknown enumeration condition {condition!r}")


def enumerate_polymorphisms(
    language, arity: int, condition: str | None = None, domain_size=None, budget=None
) -> list[Operation]:
    """All m-ary polymorphisms of the language, in table order.

    ``condition`` may be "idempotent", "wnu", or "symmetric"; the pattern
    equalities of the condition are applied while filling the table, so
    they prune the enumeration rather than only filtering its output.
    """
    language, domain_size = _check_language(language, domain_size)
    if arity < 1:
        raise InputError("operation arity must be at least 1")
    budget = enumeration_budget(budget)
    fixed, classes = _cell_classes(arity, domain_size, condition)
    count = domain_size ** len(classes)
    if count > budget:
        raise BudgetError(
            f"operation enumeration needs {count} candidates, budget is {budget}"
        )
    size = domain_size**arity
    found = []
    for choice in itertools.product(range(domain_size), repeat=len(classes)):
        table = [0] * size
        for c, v in fixed.items():
            table[c] = v
        for group, v in zip(classes, choice):
            for c in group:
                table[c] = v
        f = Operation(arity, domain_size, tuple(table))
        if is_polymorphism(f, language):
            found.append(f)
    found.sort(key=lambda f: f.values)
    return found


class FractionalOperation:
    """A probability distribution over operations of one arity.

    Weights are positive rationals summing to exactly 1.
    """

    def __init__(self, weights):
        items = dict(weights)
        if not items:
            raise InputError("fractional operation needs a non-empty support")
        ops = sorted(items, key=lambda f: f.values)
        arity = ops[0].arity
        domain_size = ops[0].domain_size
        total = Q(0)
        for f in ops:
            if f.arity != arity or f.domain_size != domain_size:
                raise InputError("support operations must share arity and domain")
            w = Q(items[f])
            if w <= 0:
                raise InputError("fractional operation weights must be positive")
            total += w
        if total != 1:
            raise InputError("fractional operation weights must sum to 1")
        self._items = tuple((f, Q(items[f])) for f in ops)
        self.arity = arity
        self.domain_size = domain_size

    def items(self):
        return self._items

    @property
    def support(self):
        return tuple(f for f, _ in self._items)

    def weight(self, f: Operation) -> Q:
        for g, w in self._items:
            if g == f:
                return w
        return Q(0)

    def __eq__(self, other):
        return (
            isinstance(other, FractionalOperation) and self._items == other._items
        )

    def __repr__(self):
        parts = ", ".join(f"{w}*op{f.values}" for f, w in self._items)
        return f"FractionalOperation({parts})"


def uniform_projections(arity: int, domain_size: int) -> FractionalOperation:
    """The fractional operation putting weight 1/m on each projection."""
    w = Q(1, arity)
    return FractionalOperation(
        {projection(arity, domain_size, i): w for i in range(arity)}
    )


def improvement_violation(omega: FractionalOperation, language, budget=None):
    """First violated averaging inequality, or None if omega improves Γ.

    The distribution improves the language when, for every relation φ and
    every block of feasible tuples, the expected value of the image tuple
    is at most the average value of the block.  Returns a tuple
    (relation index, block, lhs, rhs) for the first violation in
    enumeration order; lhs is an extended rational (infinite when a
    support operation breaks feasibility).
    """
    language, _ = _check_language(language, omega.domain_size)
    budget = enumeration_budget(budget)
    m = omega.arity
    checked = 0
    for r, phi in enumerate(language):
        feas = tuple(phi.feasible_tuples())
        checked += len(feas) ** m
        if checked > budget:
            raise BudgetError(
                f"improvement check needs more than {budget} blocks"
            )
        for block in itertools.product(feas, repeat=m):
            rhs = sum((phi.value(t).finite for t in block), Q(0)) / m
            lhs = ExtRat(0)
            for f, w in omega.items():
                image = tuple(
                    f.value(tuple(row[t] for row in block))
                    for t in range(phi.arity)
                )
                lhs = lhs + phi.value(image) * w
            if lhs > ExtRat(rhs):
                return (r, block, lhs, rhs)
    return None


@dataclass(frozen=True)
class FarkasCertificate:
    """An integral dual certificate that f is outside the support clone.

    ``entries`` lists (relation index, block, weight) with positive
    integer weights; a block is an arity-tuple of feasible tuples of the
    relation.  Validity means that for every m-ary polymorphism g the
    weighted sum of (block average - value of g's image) is non-positive,
    and strictly negative for g = f.
    """

    arity: int
    entries: tuple[tuple[int, tuple[tuple[int, ...], ...], int], ...]


def _certificate_row(cert: FarkasCertificate, g: Operation, language) -> Q:
    total = Q(0)
    for r, block, z in cert.entries:
        phi = language[r]
        rhs = sum((phi.value(t).finite for t in block), Q(0)) / cert.arity
        image = tuple(
            g.value(tuple(row[t] for row in block)) for t in range(phi.arity)
        )
        total += z * (rhs - phi.value(image).finite)
    return total


def validate_certificate(
    cert: FarkasCertificate, f: Operation, language, budget=None
) -> None:
    """Raise InputError unless cert proves f outside the support clone.

    Checks the shape of the entries and then the full dual system against
    every m-ary polymorphism of the language (enumerated within budget).
    """
    language, domain_size = _check_language(language, f.domain_size)
    if cert.arity != f.arity:
        raise InputError("certificate arity does not match the operation")
    if not cert.entries:
        raise InputError(
            "certificate is empty: it cannot satisfy the strict inequality"
        )
    for r, block, z in cert.entries:
        if not 0 <= r < len(language):
            raise InputError(f"certificate names unknown relation {r}")
        phi = language[r]
        if not isinstance(z, int) or z <= 0:
            raise InputError("certificate weights must be positive integers")
        if len(block) != cert.arity:
            raise InputError("certificate block has wrong arity")
        for t in block:
            if len(t) != phi.arity or not phi.value(t).is_finite:
                raise InputError(f"certificate block {block} is not feasible")
    if polymorphism_counterexample(f, language) is not None:
        raise InputError("certificate target is not a polymorphism")
    for g in enumerate_polymorphisms(
        language, f.arity, domain_size=domain_size, budget=budget
    ):
        row = _certificate_row(cert, g, language)
        if g == f:
            if row >= 0:
                raise InputError(
                    "certificate does not satisfy the strict inequality"
                )
        elif row > 0:
            raise InputError(
                f"certificate violates the dual row of operation {g.values}"
            )


@dataclass(frozen=True)
class SupportResult:
    """Outcome of the support-membership test.

    ``conclusive`` is False only for a No obtained against a user-supplied
    candidate column set, which cannot rule out weight on polymorphisms
    outside that set.
    """

    member: bool
    conclusive: bool
    value: Q | None = None
    witness: FractionalOperation | None = None
    certificate: FarkasCertificate | None = None
    counterexample: tuple | None = None


def _has_all_constants(language, domain_size) -> bool:
    """True when every label is pinned by a crisp unary singleton relation."""
    pinned = set()
    for phi in language:
        if phi.arity == 1 and phi.is_crisp:
            feas = tuple(phi.feasible_tuples())
            if len(feas) == 1:
                pinned.add(feas[0][0])
    return pinned == set(range(domain_size))


def _membership_blocks(language, m):
    """Finite-relation blocks: the LP rows, in canonical order.

    Rows of crisp relations are skipped; on polymorphism columns their
    inequality reads 0 <= 0.
    """
    rows = []
    for r, phi in enumerate(language):
        if phi.is_crisp:
            continue
        feas = tuple(phi.feasible_tuples())
        for block in itertools.product(feas, repeat=m):
            rhs = sum((phi.value(t).finite for t in block), Q(0)) / m
            rows.append((r, block, rhs))
    return rows


def in_support(
    f: Operation, language, columns=None, budget=None
) -> SupportResult:
    """Decide by exact LP whether f is in the support clone of Γ.

    Maximizes the weight of f over all distributions on the m-ary
    polymorphism columns subject to the averaging inequalities; Yes
    returns the witness distribution, No an integral Farkas certificate
    for the dual system (only when the column set was the full
    enumeration; a No against user-supplied columns is inconclusive).
    """
    language, domain_size = _check_language(language, f.domain_size)
    budget = enumeration_budget(budget)
    ce = polymorphism_counterexample(f, language)
    if ce is not None:
        return SupportResult(member=False, conclusive=True, counterexample=ce)
    if all(phi.is_crisp for phi in language):
        return SupportResult(
            member=True,
            conclusive=True,
            value=Q(1),
            witness=FractionalOperation({f: Q(1)}),
        )
    m = f.arity
    if columns is None:
        condition = "idempotent" if _has_all_constants(language, domain_size) else None
        columns = enumerate_polymorphisms(
            language, m, condition=condition, domain_size=domain_size, budget=budget
        )
        conclusive = True
    else:
        columns = list(columns)
        for g in columns:
            if g.arity != m or g.domain_size != domain_size:
                raise InputError("candidate operations must match f's signature")
            if polymorphism_counterexample(g, language) is not None:
                raise InputError(
                    f"candidate operation {g.values} is not a polymorphism"
                )
        conclusive = False
    if f not in columns:
        columns.append(f)
    columns = sorted(set(columns), key=lambda g: g.values)
    f_col = columns.index(f)
    blocks = _membership_blocks(language, m)
    if (len(blocks) + 1) * len(columns) > budget:
        raise BudgetError(
            f"membership system needs {(len(blocks) + 1) * len(columns)} "
            f"entries, budget is {budget}"
        )
    rows = []
    for r, block, rhs in blocks:
        phi = language[r]
        coeffs = {}
        for j, g in enumerate(columns):
            image = tuple(
                g.value(tuple(row[t] for row in block)) for t in range(phi.arity)
            )
            v = phi.value(image).finite
            if v != 0:
                coeffs[j] = v
        rows.append((coeffs, "<=", rhs))
    rows.append(({j: Q(1) for j in range(len(columns))}, "=", Q(1)))
    objective = {f_col: Q(-1)}  # maximize the weight of f
    lp = linear_program(len(columns), objective, rows)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise InternalError(f"membership LP came back {res.status}")
    best = -res.value
    if best > 0:
        weights = {
            g: res.point[j] for j, g in enumerate(columns) if res.point[j] != 0
        }
        return SupportResult(
            member=True,
            conclusive=True,
            value=best,
            witness=FractionalOperation(weights),
        )
    if not conclusive:
        return SupportResult(member=False, conclusive=False, value=best)
    cert = _dual_certificate(f, language, columns, f_col, blocks, budget)
    return SupportResult(
        member=False, conclusive=True, value=best, certificate=cert
    )


def _dual_certificate(f, language, columns, f_col, blocks, budget):
    """Solve the dual system and clear denominators.

    Variables are the block weights z; every polymorphism column
    contributes a non-positivity row, with the row of f strengthened to
    <= -1 (a feasible point of the strict system can be scaled to one of
    this system, and conversely).  The weights are scaled to integers.
    """
    nz = len(blocks)
    if nz == 0:
        raise InternalError("dual certificate requested without finite rows")
    rows = []
    for j, g in enumerate(columns):
        phi_rows = {}
        for b, (r, block, rhs) in enumerate(blocks):
            phi = language[r]
            image = tuple(
                g.value(tuple(row[t] for row in block)) for t in range(phi.arity)
            )
            c = rhs - phi.value(image).finite
            if c != 0:
                phi_rows[b] = c
        rows.append((phi_rows, "<=", Q(-1) if j == f_col else Q(0)))
    objective = {b: Q(1) for b in range(nz)}
    lp = linear_program(nz, objective, rows)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise InternalError(
            "dual system unsolvable although the membership maximum is zero"
        )
    scale = math.lcm(*(int(z.denominator) for z in res.point))
    entries = []
    for b, (r, block, _) in enumerate(blocks):
        z = res.point[b] * scale
        if z != 0:
            entries.append((r, block, int(z)))
    return FarkasCertificate(arity=f.arity, entries=tuple(entries))


def operation_assignment(g: Operation) -> tuple[int, ...]:
    """The assignment v_x -> g(x) on the variable set of a separating instance."""
    return tuple(g.value(x) for x in g.tuples())


def separating_instance(
    cert: FarkasCertificate, f: Operation, language, budget=None
) -> Instance:
    """Build the instance witnessing that f breaks optimality.

    Variables are indexed by the m-tuples over the domain; the entry
    (φ, block, z) contributes the constraint φ applied, with multiplicity
    z, to the variables holding the coordinate columns of the block.  On
    the result, every projection induces an optimal assignment while the
    image assignment of f is strictly worse.
    """
    language, domain_size = _check_language(language, f.domain_size)
    validate_certificate(cert, f, language, budget=budget)
    m = cert.arity
    num_vars = domain_size**m
    helper = Operation(m, domain_size, tuple([0] * num_vars))
    constraints = []
    for r, block, z in cert.entries:
        phi = language[r]
        scope = tuple(
            helper.index_of(tuple(row[t] for row in block))
            for t in range(phi.arity)
        )
        constraints.append(Constraint(r, scope, multiplicity=z))
    names = tuple(f"r{r}" for r in range(len(language)))
    return Instance(
        num_vars=num_vars,
        domain_size=domain_size,
        relations=tuple(language),
        relation_names=names,
        constraints=tuple(constraints),
    )


@dataclass(frozen=True)
class CoreResult:
    """A core of a language: surviving labels and the restricted relations.

    ``domain`` lists the surviving labels in the original numbering;
    ``language`` is re-indexed to range(len(domain)).
    """

    domain: tuple[int, ...]
    language: tuple[WeightedRelation, ...]


def _restrict_relation(phi: WeightedRelation, labels) -> WeightedRelation:
    values = tuple(
        phi.value(t) for t in itertools.product(labels, repeat=phi.arity)
    )
    return WeightedRelation(phi.arity, len(labels), values)


def find_core(language, domain_size=None, budget=None) -> CoreResult:
    """Shrink the language along non-bijective unary support operations.

    Repeatedly scans the unary polymorphisms in table order for a
    non-bijective member of the support clone; on success restricts every
    relation to the image and recurses.  Stops when all unary support
    members are bijections.
    """
    language, domain_size = _check_language(language, domain_size)
    labels = tuple(range(domain_size))
    rels = language
    while True:
        shrunk = False
        for g in enumerate_polymorphisms(
            rels, 1, domain_size=len(labels), budget=budget
        ):
            image = sorted(set(g.values))
            if len(image) == len(labels):
                continue
            if in_support(g, rels, budget=budget).member:
                rels = tuple(_restrict_relation(phi, image) for phi in rels)
                labels = tuple(labels[i] for i in image)
                shrunk = True
                break
        if not shrunk:
            return CoreResult(domain=labels, language=rels)


@dataclass(frozen=True)
class BwcResult:
    """Outcome of the bounded-width condition test."""

    satisfied: bool
    f: Operation | None = None
    g: Operation | None = None


def test_bwc(language, domain_size=None, budget=None) -> BwcResult:
    """Search for linked ternary and quaternary WNU support operations.

    Satisfied means some ternary weak near-unanimity f and quaternary
    weak near-unanimity g, both in the support clone, satisfy the linking
    identity f(y,x,x) = g(y,x,x,x) for all x, y.  The language should be
    a core with all constant relations present, which makes every
    polymorphism idempotent; the CLI pipeline arranges this.
    """
    language, domain_size = _check_language(language, domain_size)
    ternary = enumerate_polymorphisms(
        language, 3, condition="wnu", domain_size=domain_size, budget=budget
    )
    quaternary = None
    for f in ternary:
        if not in_support(f, language, budget=budget).member:
            continue
        if quaternary is None:
            quaternary = enumerate_polymorphisms(
                language, 4, condition="wnu", domain_size=domain_size, budget=budget
            )
        for g in quaternary:
            if any(
                f.value((y, x, x)) != g.value((y, x, x, x))
                for x in range(domain_size)
                for y in range(domain_size)
            ):
                continue
            if in_support(g, language, budget=budget).member:
                return BwcResult(satisfied=True, f=f, g=g)
    return BwcResult(satisfied=False)


def test_sym(language, m_max: int, domain_size=None, budget=None):
    """Search for a symmetric support operation at each arity 2..m_max.

    Returns {m: operation or None}.  The underlying condition quantifies
    over all arities, so this is an explicitly partial check: None at
    every tested arity does not refute the condition.
    """
    language, domain_size = _check_language(language, domain_size)
    if m_max < 2:
        raise InputError("symmetric operations need arity at least 2")
    report: dict[int, Operation | None] = {}
    for m in range(2, m_max + 1):
        found = None
        for g in enumerate_polymorphisms(
            language, m, condition="symmetric", domain_size=domain_size, budget=budget
        ):
            if in_support(g, language, budget=budget).member:
                found = g
                break
        report[m] = found
    return report
