"""(k,l)-minimality propagation on crisp instances."""

import random
from itertools import product

import pytest

from vcsp_sa.consistency import kl_minimality
from vcsp_sa.core import brute_force_opt, crisp_relation, instance
from vcsp_sa.errors import BudgetError, InputError
from vcsp_sa.languages import cut_cost, neq_relation, two_sat_language


def neq_cycle(n):
    """x_i != x_{i+1} around a cycle of n Boolean variables."""
    cons = [(0, (i, (i + 1) % n)) for i in range(n)]
    return instance(n, 2, [neq_relation()], cons)


def random_crisp(rng, num_vars):
    lang = list(two_sat_language(with_constants=True).values())
    cons = []
    for _ in range(rng.randint(num_vars, 3 * num_vars)):
        rid = rng.randrange(len(lang))
        scope = tuple(rng.sample(range(num_vars), lang[rid].arity))
        cons.append((rid, scope))
    return instance(num_vars, 2, lang, cons)


def test_odd_neq_cycle_empties():
    state = kl_minimality(neq_cycle(3), 2, 3)
    assert state.empty
    assert state.sets[(0, 1, 2)] == frozenset()


def test_even_neq_cycle_survives():
    state = kl_minimality(neq_cycle(4), 2, 3)
    assert not state.empty
    # the two proper colorings survive on every pair of adjacent variables
    assert state.sets[(0, 1)] == frozenset({(0, 1), (1, 0)})
    # and singletons keep both labels
    for v in range(4):
        assert state.sets[(v,)] == frozenset({(0,), (1,)})


def test_single_constraint_fixpoint():
    inst = instance(2, 2, [crisp_relation(2, 2, [(0, 1)])], [(0, (0, 1))])
    state = kl_minimality(inst, 1, 2)
    assert state.sets[(0, 1)] == frozenset({(0, 1)})
    assert state.sets[(0,)] == frozenset({(0,)})
    assert state.sets[(1,)] == frozenset({(1,)})


def test_implied_pins_propagate():
    # x0=0 and x0 -> x1 -> x2 forces everything
    impl = crisp_relation(2, 2, [(0, 0), (0, 1), (1, 1)])
    c0 = crisp_relation(1, 2, [(1,)])
    inst = instance(3, 2, [impl, c0],
                    [(0, (0, 1)), (0, (1, 2)), (1, (0,))])
    state = kl_minimality(inst, 1, 2)
    for v in range(3):
        assert state.sets[(v,)] == frozenset({(1,)})


def test_soundness_never_empties_satisfiable():
    rng = random.Random(20240818)
    empties = 0
    for _ in range(60):
        inst = random_crisp(rng, rng.randint(3, 6))
        opt, _ = brute_force_opt(inst)
        state = kl_minimality(inst, 2, min(3, inst.num_vars))
        if opt.is_finite:
            assert not state.empty
            # every satisfying assignment survives in every set
            for sigma in product(range(2), repeat=inst.num_vars):
                from vcsp_sa.core import evaluate

                if evaluate(inst, sigma).is_finite:
                    for svars, allowed in state.sets.items():
                        assert tuple(sigma[v] for v in svars) in allowed
        else:
            empties += 1  # not required to empty, but count for the record
    assert empties > 0  # the sample contains unsatisfiable draws


def test_orders_reach_identical_fixpoint():
    rng = random.Random(7)
    for _ in range(25):
        inst = random_crisp(rng, rng.randint(3, 6))
        a = kl_minimality(inst, 2, min(3, inst.num_vars), order="fifo")
        b = kl_minimality(inst, 2, min(3, inst.num_vars), order="lifo")
        assert a.sets == b.sets


def test_rejects_soft_relations():
    inst = instance(2, 2, [cut_cost()], [(0, (0, 1))])
    with pytest.raises(InputError):
        kl_minimality(inst, 1, 2)


def test_parameter_validation_and_budget():
    inst = neq_cycle(4)
    with pytest.raises(InputError):
        kl_minimality(inst, 2, 1)
    with pytest.raises(InputError):
        kl_minimality(inst, 1, 5)
    with pytest.raises(InputError):
        kl_minimality(inst, 1, 2, order="random")
    with pytest.raises(BudgetError):
        kl_minimality(inst, 2, 3, budget=3)
