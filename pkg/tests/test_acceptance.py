"""Acceptance suite: one test per shipped guarantee, exact arithmetic only.

Each test prints a single summary line so a log scan shows every guarantee
with its verdict; pytest -v adds the PASSED/FAILED status per criterion.
"""

import random
import subprocess
import sys
from itertools import product

from vcsp_sa.algebra import (
    Operation,
    improvement_violation,
    in_support,
    is_polymorphism,
    is_wnu,
    make_operation,
    operation_assignment,
    projection,
    separating_instance,
    test_bwc as bwc_condition,
    validate_certificate,
)
from vcsp_sa.consistency import kl_minimality
from vcsp_sa.core import (
    Constraint,
    brute_force_opt,
    evaluate,
    instance,
)
from vcsp_sa.gadgets import contract_equalities, feas_gadget, opt_gadget
from vcsp_sa.gap import (
    closure_Xbar,
    closure_assignments,
    make_eqs_language,
    make_torus_instance,
)
from vcsp_sa.groups import cyclic_group
from vcsp_sa.languages import (
    const_relation,
    cut_cost,
    eq_relation,
    neq_relation,
    nu01,
    soft_xor,
    two_sat_language,
    unary_cost,
)
from vcsp_sa.lp import check_point, linear_program, solve_lp
from vcsp_sa.rationals import Q
from vcsp_sa.sherali_adams import (
    extend_width1,
    extract_assignment,
    solve_sa,
    verify_sa_feasible,
)


def report(criterion, detail):
    print(f"criterion {criterion}: PASS — {detail}")


def random_bwc_instance(rng, num_vars):
    """2-SAT clauses, constants, and random rational unary costs."""
    lang = list(two_sat_language(with_constants=True).values())
    for _ in range(3):
        lang.append(
            unary_cost([Q(rng.randint(0, 5), rng.randint(1, 7)) for _ in range(2)])
        )
    # crisp clauses twice, unary costs twice, constants once: keeps a healthy
    # share of the sample satisfiable without excluding conflicts
    pool = [0, 1, 2, 3, 4] * 2 + [5, 6] + [7, 8, 9] * 2
    cons = []
    for _ in range(rng.randint(num_vars, 2 * num_vars)):
        rid = rng.choice(pool)
        scope = tuple(rng.sample(range(num_vars), lang[rid].arity))
        cons.append(Constraint(rid, scope, rng.randint(1, 2)))
    return instance(num_vars, 2, lang, cons)


def random_submodular_cut_instance(rng, num_vars):
    """Weighted cut edges plus rational unary costs and optional pins."""
    lang = [cut_cost(), const_relation(2, 0), const_relation(2, 1)]
    for _ in range(3):
        lang.append(
            unary_cost([Q(rng.randint(0, 4), rng.randint(1, 5)) for _ in range(2)])
        )
    cons = []
    for _ in range(rng.randint(num_vars, 3 * num_vars)):
        rid = rng.choice([0, 0, 0, 1, 2, 3, 4, 5])
        scope = tuple(rng.sample(range(num_vars), lang[rid].arity))
        cons.append(Constraint(rid, scope, rng.randint(1, 3)))
    return instance(num_vars, 2, lang, cons)


def random_mixed_instance(rng, num_vars):
    lang = list(two_sat_language().values()) + [
        cut_cost(),
        soft_xor(),
        nu01(),
        unary_cost(["1/3", 0]),
    ]
    cons = []
    for _ in range(rng.randint(3, 2 * num_vars)):
        rid = rng.randrange(len(lang))
        scope = tuple(rng.sample(range(num_vars), lang[rid].arity))
        cons.append(Constraint(rid, scope, rng.randint(1, 2)))
    return instance(num_vars, 2, lang, cons)


def random_crisp_two_sat(rng, num_vars):
    lang = list(two_sat_language(with_constants=True).values())
    cons = []
    for _ in range(rng.randint(num_vars, 2 * num_vars)):
        rid = rng.randrange(len(lang))
        scope = tuple(rng.sample(range(num_vars), lang[rid].arity))
        cons.append((rid, scope))
    return instance(num_vars, 2, lang, cons)


def crisp_satisfiable(inst):
    """Early-exit satisfiability scan for crisp instances."""
    for sigma in product(range(inst.domain_size), repeat=inst.num_vars):
        if evaluate(inst, sigma).is_finite:
            return True
    return False


def test_criterion_01_gap_reproduction(tmp_path):
    group = cyclic_group(2)
    for n in (1, 2):
        _, small = make_torus_instance(group, n)
        assert small.num_vars <= 12  # 4096 assignments at most
        v, w = brute_force_opt(small)
        assert not v.is_finite and w is None
    cli = [sys.executable, "-m", "vcsp_sa.cli"]
    inst_path = tmp_path / "torus7.vcsp"
    cert_path = tmp_path / "torus7.cert"
    with open(inst_path, "w") as f:
        subprocess.run(cli + ["gen-gap", "--group", "Z2", "--n", "7"],
                       stdout=f, check=True)
    with open(cert_path, "w") as f:
        subprocess.run(cli + ["gap-cert", "--group", "Z2", "--n", "7", "--k", "3"],
                       stdout=f, check=True)
    r = subprocess.run(
        cli + ["verify", str(inst_path), str(cert_path), "--k", "3", "--l", "3"],
        capture_output=True, text=True,
    )
    assert r.returncode == 0, r.stderr
    assert r.stdout == "feasible\nobjective 0\n"
    report(1, "I_1/I_2 unsatisfiable by brute force; SA(3,3) certificate for "
              "I_7 over Z_2 verifies feasible with objective exactly 0")


def test_criterion_02_counting_law():
    group = cyclic_group(2)
    torus, _ = make_torus_instance(group, 7)
    rng = random.Random(20240814)
    for _ in range(500):
        size = rng.randint(1, 3)
        svars = tuple(sorted(rng.sample(range(torus.num_vars), size)))
        clo = closure_Xbar(svars, torus)
        assignments = closure_assignments(torus, clo)
        assert clo.free_count == clo.c_count + clo.h_count + clo.v_count
        assert len(assignments) == group.order**clo.free_count
        assert len(set(assignments)) == len(assignments)
    pairs = 0
    while pairs < 200:
        size = rng.randint(2, 3)
        si = tuple(sorted(rng.sample(range(torus.num_vars), size)))
        sj = tuple(sorted(rng.sample(si, rng.randint(1, size - 1))))
        ci = closure_Xbar(si, torus)
        cj = closure_Xbar(sj, torus)
        Ni = closure_assignments(torus, ci)
        Nj = closure_assignments(torus, cj)
        assert len(Ni) % len(Nj) == 0
        expect = len(Ni) // len(Nj)
        posj = [ci.xbar.index(v) for v in cj.xbar]
        counts = {}
        for sigma in Ni:
            tau = tuple(sigma[p] for p in posj)
            counts[tau] = counts.get(tau, 0) + 1
        assert set(counts) == set(Nj)
        assert all(c == expect for c in counts.values())
        pairs += 1
    report(2, "|N| = |G|^(C+H+V) on 500 sampled scopes of I_7; uniform "
              "extension count |N_i|/|N_j| on 200 nested pairs")


def test_criterion_03_sa23_exactness():
    rng = random.Random(20240815)
    satisfiable = 0
    for i in range(100):
        inst = random_bwc_instance(rng, rng.randint(4, 10))
        opt, _ = brute_force_opt(inst)
        res = solve_sa(inst, 2, 3)
        assert res.value == opt, f"instance {i}: SA(2,3) {res.value} != {opt}"
        if opt.is_finite:
            ext = extract_assignment(inst, 2, 3)
            assert ext.success, f"instance {i}: extraction failed: {ext.reason}"
            assert evaluate(inst, ext.assignment) == opt
            satisfiable += 1
        else:
            assert res.status == "infeasible"
    assert satisfiable >= 40
    report(3, f"SA(2,3) = brute force on 100 random instances "
              f"({satisfiable} satisfiable, every one extracted and verified)")


def test_criterion_04_width1_exactness():
    rng = random.Random(20240816)
    for i in range(100):
        inst = random_submodular_cut_instance(rng, rng.randint(3, 8))
        opt, _ = brute_force_opt(inst)
        res = solve_sa(inst, 1, 1)
        assert res.value == opt, f"instance {i}: SA(1,1) {res.value} != {opt}"
        if not opt.is_finite:
            continue
        ext = extend_width1(inst, res.solution, min(3, inst.num_vars))
        chk = verify_sa_feasible(inst, ext, 1, min(3, inst.num_vars))
        assert chk.feasible, f"instance {i}: {chk.violation}"
        assert chk.objective == opt
    report(4, "SA(1,1) = brute force on 100 submodular-cut instances; "
              "width-1 solutions extend to level 3 with identical value")


def test_criterion_05_relaxation_lattice():
    rng = random.Random(20240817)
    levels = [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]
    for i in range(50):
        inst = random_mixed_instance(rng, rng.randint(3, 6))
        opt, _ = brute_force_opt(inst)
        values = {}
        for k, l in levels:
            if l > inst.num_vars:
                continue
            values[(k, l)] = solve_sa(inst, k, l).value
            assert values[(k, l)] <= opt
        chain = [values[kl] for kl in levels if kl in values]
        assert all(a <= b for a, b in zip(chain, chain[1:]))
    report(5, "SA values monotone along (1,1)<=(1,2)<=(2,2)<=(2,3)<=(3,3) and "
              "bounded by brute force on 50 mixed instances")


def test_criterion_06_membership_lp():
    cut_lang = [cut_cost(), nu01(), unary_cost([1, 0])]
    mn = make_operation(2, 2, lambda t: min(t))
    mx = make_operation(2, 2, lambda t: max(t))
    for f in (mn, mx):
        res = in_support(f, cut_lang)
        assert res.member and res.conclusive
        assert res.value == Q(1, 2)
        assert improvement_violation(res.witness, cut_lang) is None
    maj = make_operation(3, 2, lambda t: 1 if sum(t) >= 2 else 0)
    res = in_support(maj, [soft_xor()])
    assert not res.member and res.conclusive
    validate_certificate(res.certificate, maj, [soft_xor()])
    sep = separating_instance(res.certificate, maj, [soft_xor()])
    opt, _ = brute_force_opt(sep)
    for i in range(3):
        assert evaluate(sep, operation_assignment(projection(3, 2, i))) == opt
    assert evaluate(sep, operation_assignment(maj)) > opt
    report(6, "min/max certified in the cut-language support at weight 1/2 "
              "with re-verified witnesses; majority refuted against the "
              "equality-cost language with a brute-force-confirmed separating "
              "instance")


def test_criterion_07_bwc_tester():
    group = cyclic_group(2)
    eqs = list(make_eqs_language(group, 3).values())
    eqs += [const_relation(2, 0), const_relation(2, 1)]
    res = bwc_condition(eqs)
    assert not res.satisfied
    # exhaustive cross-check: all 65,536 quaternary Boolean operations
    wnu_count = 0
    for bits in product(range(2), repeat=16):
        g = Operation(4, 2, bits)
        if not is_wnu(g):
            continue
        wnu_count += 1
        assert not is_polymorphism(g, eqs)
    assert wnu_count > 0
    sat_lang = list(two_sat_language(with_constants=True).values())
    res = bwc_condition(sat_lang)
    assert res.satisfied
    f, g = res.f, res.g
    assert is_wnu(f) and is_wnu(g)
    assert in_support(f, sat_lang).member and in_support(g, sat_lang).member
    for x in range(2):
        for y in range(2):
            assert f.value((y, x, x)) == g.value((y, x, x, x))
    report(7, f"Violated on the linear-equation language (no WNU among "
              f"{2**16} quaternary operations, {wnu_count} WNUs checked); "
              f"Satisfied on 2-SAT with a linked (f,g) pair")


def test_criterion_08_consistency_vs_truth():
    rng = random.Random(20240818)
    empty = 0
    for i in range(200):
        inst = random_crisp_two_sat(rng, rng.randint(4, 14))
        state = kl_minimality(inst, 2, 3)
        other = kl_minimality(inst, 2, 3, order="lifo")
        assert state.sets == other.sets
        sat = crisp_satisfiable(inst)
        assert state.empty == (not sat), f"instance {i}"
        empty += state.empty
    assert 0 < empty < 200  # the sample exercises both outcomes
    report(8, f"(2,3)-minimality empties exactly on the {empty} unsatisfiable "
              f"of 200 random 2-SAT instances; fifo and lifo fixpoints agree")


def beale_lp():
    return linear_program(
        4,
        ["-3/4", 150, "-1/50", 6],
        [
            (["1/4", -60, "-1/25", 9], "<=", 0),
            (["1/2", -90, "-1/50", 3], "<=", 0),
            ({2: 1}, "<=", 1),
        ],
    )


REGRESSION_LPS = [
    # (num_vars, objective, rows, upper, expected value or status)
    (2, [-1, -1], [([1, 2], "<=", 4), ({1: 1}, "<=", 1)], None, Q(-4)),
    (2, [1, 1], [([1, 1], ">=", 3)], None, Q(3)),
    (2, [-3, -5], [({0: 1}, "<=", 4), ({1: 2}, "<=", 12), ([3, 2], "<=", 18)],
     None, Q(-36)),
    (2, [1, -1], [([1, -1], ">=", -2), ([1, 1], "=", 4)], [None, 3], Q(-2)),
    (1, [-1], [({0: 1}, "<=", "7/3")], None, Q(-7, 3)),
    (2, [-2, -1], [([4, 1], "<=", 6), ([1, 3], "<=", "7/2")], None, Q(-37, 11)),
    (2, [-1, 0], [({1: 1}, "<=", 1)], None, "unbounded"),
    (1, [1], [({0: 1}, ">=", 2), ({0: 1}, "<=", 1)], None, "infeasible"),
    (2, [0, -1], [([1, 1], "<=", 1), ([-1, 1], "<=", 1)], None, Q(-1)),
    (3, [1, 1, 1], [([1, 1, 1], "=", "10/3")], [1, None, None], Q(10, 3)),
]


def test_criterion_09_lp_exactness():
    for pivot in ("bland", "dantzig"):
        res = solve_lp(beale_lp(), pivot=pivot)
        assert res.status == "optimal"
        assert res.value == Q(-1, 20)
    for i, (n, obj, rows, upper, expected) in enumerate(REGRESSION_LPS):
        lp = linear_program(n, obj, rows, upper=upper)
        for pivot in ("bland", "dantzig"):
            res = solve_lp(lp, pivot=pivot)
            if isinstance(expected, str):
                assert res.status == expected, f"lp {i} ({pivot})"
            else:
                assert res.status == "optimal", f"lp {i} ({pivot})"
                assert res.value == expected, f"lp {i} ({pivot}): {res.value}"
                ok, violations, value = check_point(lp, res.point)
                assert ok and value == expected
    report(9, "simplex terminates on the classical cycling program at -1/20 "
              "and matches hand-checked optima on the 10-LP regression suite")


def test_criterion_10_gadget_lemmas():
    rng = random.Random(20240819)
    phi = cut_cost()
    from vcsp_sa.core import feas_relation, opt_relation

    opt_target = opt_relation(phi)
    feas_phi = unary_cost([0, "1/3"])
    feas_target = feas_relation(feas_phi)
    checked = 0
    for case in range(30):
        n = rng.randint(2, 5)
        kind = case % 3
        if kind == 0:
            rels = [phi, opt_target, nu01()]
            cons = []
            for _ in range(rng.randint(2, 6)):
                rid = rng.randrange(len(rels))
                scope = tuple(rng.sample(range(n), rels[rid].arity))
                cons.append(Constraint(rid, scope, rng.randint(1, 2)))
            inst = instance(n, 2, rels, cons)
            res = opt_gadget(inst, phi)
            orig, _ = brute_force_opt(inst)
            new, wit = brute_force_opt(res.instance)
            if orig.is_finite:
                assert new <= res.bound
                assert new == orig - res.shift
                assert evaluate(inst, wit) == orig
            else:
                assert new > res.bound
        elif kind == 1:
            rels = [feas_phi, feas_target, cut_cost(), neq_relation()]
            cons = []
            for _ in range(rng.randint(2, 6)):
                rid = rng.randrange(len(rels))
                scope = tuple(rng.sample(range(n), rels[rid].arity))
                cons.append(Constraint(rid, scope, rng.randint(1, 2)))
            inst = instance(n, 2, rels, cons)
            res = feas_gadget(inst, feas_phi)
            orig, _ = brute_force_opt(inst)
            new, wit = brute_force_opt(res.instance)
            assert orig.is_finite == new.is_finite
            if new.is_finite:
                assert evaluate(inst, wit) == orig
        else:
            rels = [eq_relation(), cut_cost(), nu01()]
            cons = []
            for _ in range(rng.randint(2, 6)):
                rid = rng.randrange(len(rels))
                scope = tuple(rng.sample(range(n), rels[rid].arity))
                cons.append(Constraint(rid, scope, rng.randint(1, 2)))
            inst = instance(n, 2, rels, cons)
            quotient, classes = contract_equalities(inst, 0)
            assert len(classes) == n
            a, _ = brute_force_opt(quotient)
            b, _ = brute_force_opt(inst)
            assert a == b
        checked += 1
    assert checked == 30
    report(10, "opt/feas gadgets and equality contraction preserve brute-force "
               "optima on 30 randomized instances")
