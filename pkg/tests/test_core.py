"""Relations, instances, brute force, derived relations, expressibility."""

from itertools import product

import pytest

from vcsp_sa.core import (
    Constraint,
    Instance,
    WeightedRelation,
    brute_force_opt,
    crisp_relation,
    evaluate,
    express,
    feas_relation,
    instance,
    make_relation,
    opt_relation,
)
from vcsp_sa.errors import BudgetError, InputError
from vcsp_sa.languages import cut_cost, neq_relation, soft_xor, two_sat_language
from vcsp_sa.rationals import ExtRat, INF, Q


def triangle(pinned=False):
    rels = [cut_cost()]
    names = ["cut"]
    cons = [(0, (0, 1)), (0, (1, 2)), (0, (0, 2))]
    if pinned:
        rels += [crisp_relation(1, 2, [(0,)]), crisp_relation(1, 2, [(1,)])]
        names += ["c0", "c1"]
        cons += [(1, (0,)), (2, (2,))]
    return instance(3, 2, rels, cons, names=names)


def test_relation_lookup_and_validation():
    r = make_relation(2, 2, {(0, 0): 0, (0, 1): "1/2", (1, 0): 1, (1, 1): None})
    assert r.value((0, 1)).q == Q(1, 2)
    assert not r.value((1, 1)).is_finite
    assert r.index_of((1, 0)) == 2
    with pytest.raises(InputError):
        r.value((0, 1, 1))
    with pytest.raises(InputError):
        r.value((0, 2))
    with pytest.raises(InputError):
        WeightedRelation(2, 2, (ExtRat(0),) * 3)
    with pytest.raises(InputError):
        make_relation(1, 2, {(0,): 0})  # (1,) unlisted, no default


def test_crisp_relation_and_flags():
    r = crisp_relation(2, 3, [(0, 1), (1, 2)])
    assert set(r.feasible_tuples()) == {(0, 1), (1, 2)}
    assert r.is_crisp
    assert not cut_cost().is_crisp
    assert cut_cost().finite_values() == [Q(0), Q(1), Q(1), Q(0)]


def test_shifted_adds_to_finite_entries_only():
    r = make_relation(1, 2, {(0,): Q(1, 3), (1,): None}).shifted(Q(2, 3))
    assert r.value((0,)).q == 1
    assert not r.value((1,)).is_finite


def test_instance_validation():
    with pytest.raises(InputError):
        instance(2, 2, [cut_cost()], [(0, (0, 2))])  # var out of range
    with pytest.raises(InputError):
        instance(2, 2, [cut_cost()], [(0, (0,))])  # arity mismatch
    with pytest.raises(InputError):
        instance(2, 2, [cut_cost(), cut_cost()], [], names=["a", "a"])
    with pytest.raises(InputError):
        Constraint(0, (0, 1), multiplicity=0)
    assert instance(2, 3, [crisp_relation(1, 3, [(0,)])], []).num_vars == 2


def test_evaluate_worked_examples():
    tri = triangle()
    assert evaluate(tri, (0, 0, 0)) == ExtRat(0)
    assert evaluate(tri, (0, 1, 0)) == ExtRat(2)
    pinned = triangle(pinned=True)
    assert evaluate(pinned, (0, 0, 1)) == ExtRat(2)
    assert evaluate(pinned, (1, 0, 1)) == INF


def test_multiplicity_equals_repetition():
    rels = [cut_cost()]
    rep = instance(2, 2, rels, [(0, (0, 1)), (0, (0, 1)), (0, (0, 1))])
    mult = instance(2, 2, rels, [Constraint(0, (0, 1), multiplicity=3)])
    for a in product(range(2), repeat=2):
        assert evaluate(rep, a) == evaluate(mult, a)
    assert brute_force_opt(rep) == brute_force_opt(mult)


def test_brute_force_pinned_triangle():
    value, witness = brute_force_opt(triangle(pinned=True))
    assert value == ExtRat(2)
    assert witness == (0, 0, 1)


def test_brute_force_infeasible_and_ties():
    c0 = crisp_relation(1, 2, [(0,)])
    c1 = crisp_relation(1, 2, [(1,)])
    contradictory = instance(1, 2, [c0, c1], [(0, (0,)), (1, (0,))])
    assert brute_force_opt(contradictory) == (INF, None)
    # ties resolve to the lexicographically least witness
    free = instance(2, 2, [cut_cost()], [(0, (0, 1))])
    assert brute_force_opt(free)[1] == (0, 0)


def test_brute_force_budget():
    inst = instance(8, 2, [cut_cost()], [(0, (0, 1))])
    with pytest.raises(BudgetError):
        brute_force_opt(inst, budget=100)


def test_feas_and_opt_relations():
    assert set(feas_relation(soft_xor()).feasible_tuples()) == set(
        product(range(2), repeat=2)
    )
    assert set(opt_relation(cut_cost()).feasible_tuples()) == {(0, 0), (1, 1)}
    assert set(opt_relation(soft_xor()).feasible_tuples()) == {(0, 1), (1, 0)}
    with pytest.raises(InputError):
        opt_relation(crisp_relation(1, 2, []))


def test_express_equality_from_neq_chain():
    chain = instance(3, 2, [neq_relation()], [(0, (0, 2)), (0, (2, 1))])
    rel = express(chain, (0, 1))
    assert set(rel.feasible_tuples()) == {(0, 0), (1, 1)}
    assert rel.is_crisp


def test_express_matches_inline_minimization():
    inst = instance(3, 2, [cut_cost()], [(0, (0, 2)), (0, (2, 1))])
    rel = express(inst, (0, 1))
    for t in product(range(2), repeat=2):
        best = min(
            evaluate(inst, (t[0], t[1], aux)) for aux in range(2)
        )
        assert rel.value(t) == best


def test_express_validates_designated_variables():
    inst = instance(2, 2, [cut_cost()], [(0, (0, 1))])
    with pytest.raises(InputError):
        express(inst, (0, 0))
    with pytest.raises(InputError):
        express(inst, (5,))
    with pytest.raises(InputError):
        express(inst, ())


def test_relation_name_lookup():
    inst = triangle(pinned=True)
    assert inst.relation_id("c0") == 1
    with pytest.raises(InputError):
        inst.relation_id("nope")


def test_two_sat_language_tables():
    lang = two_sat_language(with_constants=True)
    assert set(lang["or"].feasible_tuples()) == {(0, 1), (1, 0), (1, 1)}
    assert set(lang["nand"].feasible_tuples()) == {(0, 0), (0, 1), (1, 0)}
    assert set(lang["impl"].feasible_tuples()) == {(0, 0), (0, 1), (1, 1)}
    assert set(lang["neq"].feasible_tuples()) == {(0, 1), (1, 0)}
    assert set(lang["eq"].feasible_tuples()) == {(0, 0), (1, 1)}
    assert set(lang["c0"].feasible_tuples()) == {(0,)}
    assert set(lang["c1"].feasible_tuples()) == {(1,)}
