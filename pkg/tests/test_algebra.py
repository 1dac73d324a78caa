"""Operations, fractional polymorphisms, support membership, and conditions."""

from itertools import product

import pytest

from vcsp_sa.algebra import (
    FractionalOperation,
    compose,
    enumerate_polymorphisms,
    find_core,
    improvement_violation,
    in_support,
    is_polymorphism,
    is_symmetric,
    is_wnu,
    make_operation,
    operation_assignment,
    polymorphism_counterexample,
    projection,
    separating_instance,
    test_bwc as bwc_condition,
    test_sym as sym_condition,
    uniform_projections,
    validate_certificate,
)
from vcsp_sa.core import brute_force_opt, evaluate
from vcsp_sa.errors import BudgetError, InputError
from vcsp_sa.gap import make_eqs_language
from vcsp_sa.groups import cyclic_group
from vcsp_sa.languages import (
    const_relation,
    cut_cost,
    neq_relation,
    nu01,
    nu10,
    soft_xor,
    two_sat_language,
    unary_cost,
)
from vcsp_sa.rationals import Q


def op_min():
    return make_operation(2, 2, lambda t: min(t))


def op_max():
    return make_operation(2, 2, lambda t: max(t))


def op_maj():
    return make_operation(3, 2, lambda t: 1 if sum(t) >= 2 else 0)


def cut_language():
    return [cut_cost(), nu01(), nu10()]


def test_operation_basics():
    f = op_maj()
    assert f.value((0, 1, 1)) == 1
    assert f.value((0, 1, 0)) == 0
    assert f.is_idempotent
    assert f.projection_index() is None
    assert projection(3, 2, 1).projection_index() == 1
    assert len(list(f.tuples())) == 8


def test_compose_and_projection_laws():
    f = op_maj()
    p0, p1, p2 = (projection(3, 2, i) for i in range(3))
    assert compose(f, (p0, p1, p2)).values == f.values
    # composing with a repeated argument collapses majority to projection
    assert compose(f, (p0, p0, p1)).values == p0.values
    g = compose(op_min(), (op_max(), op_min()))
    for t in g.tuples():
        assert g.value(t) == min(max(t), min(t)) == min(t)
    with pytest.raises(InputError):
        compose(f, (p0, p1))


def test_wnu_and_symmetry_predicates():
    assert is_wnu(op_maj())
    assert is_symmetric(op_maj())
    assert is_symmetric(op_min()) and is_symmetric(op_max())
    assert not is_wnu(projection(3, 2, 0))
    minority = make_operation(3, 2, lambda t: sum(t) % 2)
    assert is_wnu(minority) and is_symmetric(minority)
    with pytest.raises(InputError):
        is_wnu(op_min())
    first_arg = make_operation(2, 2, lambda t: t[0])
    assert not is_symmetric(first_arg)


def test_polymorphism_checks():
    lang = list(two_sat_language().values())
    assert is_polymorphism(op_maj(), lang)
    minority = make_operation(3, 2, lambda t: sum(t) % 2)
    cex = polymorphism_counterexample(minority, lang)
    assert cex is not None
    rid, block = cex
    rel = lang[rid]
    assert all(rel.value(t).is_finite for t in block)
    image = tuple(minority.value(col) for col in zip(*block))
    assert not rel.value(image).is_finite


def test_enumerate_polymorphisms_conditions():
    lang = [neq_relation()]
    sym2 = enumerate_polymorphisms(lang, 2, condition="symmetric")
    assert sym2 == []  # neq has no symmetric binary polymorphism
    all3 = enumerate_polymorphisms(lang, 3)
    wnu3 = enumerate_polymorphisms(lang, 3, condition="wnu")
    assert {f.values for f in wnu3} <= {f.values for f in all3}
    assert all(is_wnu(f) for f in wnu3)
    minority = make_operation(3, 2, lambda t: sum(t) % 2)
    assert minority.values in {f.values for f in wnu3}
    idem = enumerate_polymorphisms(lang, 2, condition="idempotent")
    assert all(f.is_idempotent for f in idem)
    with pytest.raises(InputError):
        enumerate_polymorphisms(lang, 3, condition="magic")
    with pytest.raises(BudgetError):
        enumerate_polymorphisms(lang, 3, budget=10)


def test_uniform_projections_improve_everything():
    omega = uniform_projections(3, 2)
    assert omega.weight(projection(3, 2, 0)) == Q(1, 3)
    assert improvement_violation(omega, cut_language()) is None
    assert improvement_violation(omega, [soft_xor()]) is None


def test_half_min_max_improves_cut_language():
    omega = FractionalOperation({op_min(): Q(1, 2), op_max(): Q(1, 2)})
    assert improvement_violation(omega, cut_language()) is None
    # weight all on min fails: the unary costs are not min-improvable alone
    bad = FractionalOperation({op_min(): Q(1)})
    v = improvement_violation(bad, cut_language())
    assert v is not None
    rid, block, lhs, rhs = v
    assert lhs > rhs


def test_min_in_cut_support_at_half():
    res = in_support(op_min(), cut_language())
    assert res.member and res.conclusive
    assert res.value == Q(1, 2)
    assert res.witness.weight(op_min()) == Q(1, 2)
    assert res.witness.weight(op_max()) == Q(1, 2)
    assert improvement_violation(res.witness, cut_language()) is None
    res = in_support(op_max(), cut_language())
    assert res.member and res.value == Q(1, 2)


def test_bare_cut_admits_constants():
    # without unary costs the constant operations join the support, so the
    # maximizing witness can pair min with const_0 instead of max
    const0 = make_operation(2, 2, lambda t: 0)
    res = in_support(op_min(), [cut_cost()])
    assert res.member and res.value == Q(1, 2)
    assert res.witness.weight(const0) == Q(1, 2)
    assert in_support(const0, [cut_cost()]).member
    assert not in_support(const0, cut_language()).member


def test_majority_not_in_soft_xor_support():
    res = in_support(op_maj(), [soft_xor()])
    assert not res.member and res.conclusive
    assert res.certificate is not None
    validate_certificate(res.certificate, op_maj(), [soft_xor()])
    assert all(isinstance(z, int) for _, _, z in res.certificate.entries)


def test_separating_instance_for_majority():
    res = in_support(op_maj(), [soft_xor()])
    inst = separating_instance(res.certificate, op_maj(), [soft_xor()])
    assert inst.num_vars == 2 ** 3
    opt, _ = brute_force_opt(inst)
    for i in range(3):
        sigma = operation_assignment(projection(3, 2, i))
        assert evaluate(inst, sigma) == opt
    worse = evaluate(inst, operation_assignment(op_maj()))
    assert worse > opt


def test_majority_in_neq_nu01_support_at_two_thirds():
    res = in_support(op_maj(), [neq_relation(), nu01()])
    assert res.member
    assert res.value == Q(2, 3)
    assert improvement_violation(res.witness, [neq_relation(), nu01()]) is None


def test_in_support_crisp_shortcut():
    lang = list(two_sat_language().values())
    res = in_support(op_maj(), lang)
    assert res.member and res.conclusive
    assert res.value == Q(1)
    # non-polymorphisms are rejected before any LP is built
    minority = make_operation(3, 2, lambda t: sum(t) % 2)
    res = in_support(minority, lang)
    assert not res.member and res.conclusive
    assert res.counterexample is not None


def test_find_core_of_biased_unary():
    core = find_core([nu01()])
    assert core.domain == (0,)
    assert len(core.language) == 1
    assert core.language[0].domain_size == 1
    assert core.language[0].value((0,)) == Q(0)


def test_find_core_implication_language():
    # implication alone collapses to a single label; adding both constants
    # makes the language its own core
    from vcsp_sa.languages import impl_relation

    core = find_core([impl_relation()])
    assert len(core.domain) == 1
    lang = [impl_relation(), const_relation(2, 0), const_relation(2, 1)]
    core = find_core(lang)
    assert core.domain == (0, 1)
    assert [r.values for r in core.language] == [r.values for r in lang]


def test_find_core_respects_soft_costs():
    # cut language: both labels interchangeable, already a core
    core = find_core(cut_language())
    assert core.domain == (0, 1)
    # soft bias pulls everything to the cheap label
    lang = [unary_cost([0, 5])]
    core = find_core(lang)
    assert core.domain == (0,)


def test_sym_on_cut_language():
    rep = sym_condition(cut_language(), 3)
    assert rep[2] is not None and is_symmetric(rep[2])
    assert rep[3] is not None and is_symmetric(rep[3])
    assert in_support(rep[2], cut_language()).member
    assert rep[2].values in (op_min().values, op_max().values)


def test_sym_constants_only_language():
    lang = [const_relation(2, 0), const_relation(2, 1)]
    rep = sym_condition(lang, 2)
    assert rep[2] is not None


def test_bwc_satisfied_on_two_sat_with_constants():
    lang = list(two_sat_language(with_constants=True).values())
    res = bwc_condition(lang)
    assert res.satisfied
    f, g = res.f, res.g
    assert is_wnu(f) and is_wnu(g)
    assert in_support(f, lang).member and in_support(g, lang).member
    for x in range(2):
        for y in range(2):
            assert f.value((y, x, x)) == g.value((y, x, x, x))


def linear_language_with_constants():
    group = cyclic_group(2)
    lang = list(make_eqs_language(group, 3).values())
    lang += [const_relation(2, 0), const_relation(2, 1)]
    return lang


def test_bwc_violated_on_linear_equations():
    res = bwc_condition(linear_language_with_constants())
    assert not res.satisfied
    assert res.f is None and res.g is None


def test_no_quaternary_wnu_polymorphism_of_linear_equations():
    # exhaustive cross-check of the refutation: among all 2^16 quaternary
    # Boolean operations, none is simultaneously a WNU and a polymorphism
    lang = linear_language_with_constants()
    found = enumerate_polymorphisms(lang, 4, condition="wnu")
    assert found == []


def test_sym_none_on_linear_equations():
    rep = sym_condition(linear_language_with_constants(), 2)
    assert rep[2] is None


def test_fractional_operation_validation():
    with pytest.raises(InputError):
        FractionalOperation({op_min(): Q(1, 2), op_max(): Q(1, 3)})
    with pytest.raises(InputError):
        FractionalOperation({op_min(): Q(1, 2), op_maj(): Q(1, 2)})
    with pytest.raises(InputError):
        FractionalOperation({op_min(): Q(3, 2), op_max(): Q(-1, 2)})
