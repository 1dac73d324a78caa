"""Command-line front door: one binary, one subcommand per operation.

All numeric output is exact (`p/q` or `inf`); identical invocations produce
byte-identical reports.  Exit codes: 0 success / affirmative answer,
2 bad input or parse error, 3 infeasible instance, 4 empty propagation
fixpoint, 5 negative or violated answer (membership No, BWC violated,
missing symmetric operation, failed certificate check), 6 enumeration
budget exceeded, 7 extraction failure, 1 internal error.
"""

import argparse
import sys

from .algebra import find_core, in_support, test_bwc, test_sym
from .consistency import kl_minimality
from .core import Instance, brute_force_opt, express
from .errors import BudgetError, InputError, InternalError, ParseError
from .gadgets import contract_equalities, feas_gadget, opt_gadget
from .gap import (
    audit_gap_solution,
    build_gap_solution,
    make_eqs_language,
    make_torus_instance,
)
from .groups import group_from_name
from .io import (
    load_instance,
    load_operations,
    load_sa_solution,
    print_instance,
    print_operations,
    write_sa_solution,
)
from .languages import const_relation
from .sherali_adams import extract_assignment, solve_sa, verify_sa_feasible

OK = 0
USAGE = 2
INFEASIBLE = 3
EMPTY = 4
VIOLATED = 5
RESOURCE = 6
NO_EXTRACT = 7


def _add_common(sub, *, budget=True, threads=True):
    if budget:
        sub.add_argument("--budget", type=int, default=None,
                         help="enumeration budget (default: VCSP_SA_BUDGET or 2^26)")
    if threads:
        sub.add_argument("--threads", type=int, default=1,
                         help="worker cap; execution is sequential, 1 is exact")


def _parser():
    p = argparse.ArgumentParser(
        prog="vcsp-sa",
        description="Exact valued-CSP solving, Sherali-Adams relaxations, "
        "fractional polymorphisms, and torus gap instances.",
    )
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("solve-exact", help="brute-force optimum of an instance")
    s.add_argument("instance")
    _add_common(s)

    s = sub.add_parser("solve-sa", help="exact SA(k,l) relaxation value")
    s.add_argument("instance")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    _add_common(s)

    s = sub.add_parser("extract", help="self-reduction rounding of the SA optimum")
    s.add_argument("instance")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    _add_common(s)

    s = sub.add_parser("minimality", help="(k,l)-minimality fixpoint of a crisp instance")
    s.add_argument("instance")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--dump", action="store_true", help="print every surviving set")
    _add_common(s)

    s = sub.add_parser("test-fpol", help="support-clone membership of an operation")
    s.add_argument("language", help="relations-only instance file")
    s.add_argument("ops", help="operation file")
    s.add_argument("--op", default=None, help="operation name within the file")
    _add_common(s, threads=False)

    s = sub.add_parser("test-bwc", help="bounded-width condition of a language")
    s.add_argument("language")
    _add_common(s, threads=False)

    s = sub.add_parser("test-sym", help="symmetric support operations per arity")
    s.add_argument("language")
    s.add_argument("--max", type=int, required=True, dest="m_max")
    _add_common(s, threads=False)

    s = sub.add_parser("find-core", help="shrink a language to a core")
    s.add_argument("language")
    _add_common(s, threads=False)

    s = sub.add_parser("express", help="expressive power: project an instance minimum")
    s.add_argument("instance")
    s.add_argument("vars", type=int, nargs="+", help="designated variables")
    _add_common(s, threads=False)

    s = sub.add_parser("gen-gap", help="emit a torus instance or equation language")
    s.add_argument("--group", required=True, help="Z2, Z3, Z2xZ2, ...")
    s.add_argument("--n", type=int, default=None, help="torus side length")
    s.add_argument("--r", type=int, default=None,
                   help="without --n: emit the equation language of arity <= r")
    _add_common(s, threads=False)

    s = sub.add_parser("gap-cert", help="feasible SA(k,k) certificate for the torus")
    s.add_argument("--group", default="Z2")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--sample", type=int, default=None,
                   help="audit this many random rows instead of emitting")
    s.add_argument("--seed", type=int, default=0)
    _add_common(s, threads=False)

    s = sub.add_parser("verify", help="check a certificate against an instance")
    s.add_argument("instance")
    s.add_argument("certificate")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    _add_common(s)

    s = sub.add_parser("gadget-opt", help="rewrite via the optimum-preserving gadget")
    s.add_argument("instance")
    s.add_argument("relation", help="designated relation name")
    _add_common(s, threads=False)

    s = sub.add_parser("gadget-feas", help="rewrite via the feasibility gadget")
    s.add_argument("instance")
    s.add_argument("relation")
    _add_common(s, threads=False)

    s = sub.add_parser("contract-eq", help="contract equality constraints")
    s.add_argument("instance")
    s.add_argument("relation", help="binary equality relation name")
    _add_common(s, threads=False)

    return p


def _check_threads(args):
    if getattr(args, "threads", 1) < 1:
        raise InputError("--threads must be >= 1")


def _load_language(path):
    inst = load_instance(path)
    if not inst.relations:
        raise InputError("language file declares no relations")
    return list(inst.relations), inst.domain_size


def _print_value(v):
    print(f"value {v}")


def _cmd_solve_exact(args):
    inst = load_instance(args.instance)
    value, witness = brute_force_opt(inst, budget=args.budget)
    _print_value(value)
    if witness is None:
        return INFEASIBLE
    print("assignment " + " ".join(map(str, witness)))
    return OK


def _cmd_solve_sa(args):
    inst = load_instance(args.instance)
    res = solve_sa(inst, args.k, args.l, budget=args.budget)
    _print_value(res.value)
    return OK if res.status == "optimal" else INFEASIBLE


def _cmd_extract(args):
    inst = load_instance(args.instance)
    res = extract_assignment(inst, args.k, args.l, budget=args.budget)
    if not res.success:
        print(f"not extractable: {res.reason}")
        return NO_EXTRACT
    _print_value(res.value)
    print("assignment " + " ".join(map(str, res.assignment)))
    return OK


def _cmd_minimality(args):
    inst = load_instance(args.instance)
    state = kl_minimality(inst, args.k, args.l, budget=args.budget)
    if state.empty:
        print("empty")
        return EMPTY
    print("nonempty")
    if args.dump:
        for svars in sorted(state.sets, key=lambda s: (len(s), s)):
            head = "set " + " ".join(map(str, svars)) + " |"
            for tup in sorted(state.sets[svars]):
                print(f"{head} " + " ".join(map(str, tup)))
    return OK


def _pick_operation(ops, name):
    if name is None:
        if len(ops) != 1:
            raise InputError("--op is required when the file has several operations")
        return next(iter(ops.items()))
    if name not in ops:
        raise InputError(f"no operation named {name!r} in the file")
    return name, ops[name]


def _cmd_test_fpol(args):
    language, _ = _load_language(args.language)
    name, op = _pick_operation(load_operations(args.ops), args.op)
    res = in_support(op, language, budget=args.budget)
    if res.member:
        print("yes")
        print(f"value {res.value}")
        for f, w in res.witness.items():
            print(f"weight {w} op " + " ".join(map(str, f.values)))
        return OK
    print("no" if res.conclusive else "no (inconclusive)")
    if res.counterexample is not None:
        print(f"not a polymorphism: {name} breaks feasibility on {res.counterexample}")
    elif res.certificate is not None:
        print(f"certificate arity {res.certificate.arity} "
              f"entries {len(res.certificate.entries)}")
    return VIOLATED


def _cmd_test_bwc(args):
    language, domain_size = _load_language(args.language)
    # decidability pipeline: pass to the core, then pin every label
    core = find_core(language, domain_size=domain_size, budget=args.budget)
    language = list(core.language) + [
        const_relation(len(core.domain), a) for a in range(len(core.domain))
    ]
    res = test_bwc(language, domain_size=len(core.domain), budget=args.budget)
    if res.satisfied:
        print("satisfied")
        print(print_operations({"f": res.f, "g": res.g}), end="")
        return OK
    print("violated")
    return VIOLATED


def _cmd_test_sym(args):
    language, domain_size = _load_language(args.language)
    report = test_sym(language, args.m_max, domain_size=domain_size, budget=args.budget)
    missing = False
    for m in sorted(report):
        op = report[m]
        if op is None:
            print(f"m={m} none")
            missing = True
        else:
            print(f"m={m} op " + " ".join(map(str, op.values)))
    return VIOLATED if missing else OK


def _cmd_find_core(args):
    language, domain_size = _load_language(args.language)
    core = find_core(language, domain_size=domain_size, budget=args.budget)
    print("domain " + " ".join(map(str, core.domain)))
    out = Instance(
        num_vars=0,
        domain_size=len(core.domain),
        relations=core.language,
        relation_names=tuple(f"r{i}" for i in range(len(core.language))),
        constraints=(),
    )
    print(print_instance(out), end="")
    return OK


def _cmd_express(args):
    inst = load_instance(args.instance)
    rel = express(inst, tuple(args.vars), budget=args.budget)
    out = Instance(
        num_vars=0,
        domain_size=inst.domain_size,
        relations=(rel,),
        relation_names=("expressed",),
        constraints=(),
    )
    print(print_instance(out), end="")
    return OK


def _cmd_gen_gap(args):
    group = group_from_name(args.group)
    if args.n is None:
        r = 3 if args.r is None else args.r
        language = make_eqs_language(group, r)
        out = Instance(
            num_vars=0,
            domain_size=group.order,
            relations=tuple(language.values()),
            relation_names=tuple(language),
            constraints=(),
        )
        print(print_instance(out), end="")
        return OK
    _, inst = make_torus_instance(group, args.n)
    print(print_instance(inst), end="")
    return OK


def _cmd_gap_cert(args):
    group = group_from_name(args.group)
    torus, _ = make_torus_instance(group, args.n)
    if args.sample is not None:
        res = audit_gap_solution(
            torus, args.k, args.sample, seed=args.seed, budget=args.budget
        )
        if res.feasible:
            print(f"audit ok checked {res.checked}")
            return OK
        print(f"audit violated: {res.detail}")
        return VIOLATED
    sol = build_gap_solution(torus, args.k, budget=args.budget)
    write_sa_solution(sys.stdout, sol)
    return OK


def _cmd_verify(args):
    inst = load_instance(args.instance)
    sol = load_sa_solution(args.certificate)
    res = verify_sa_feasible(inst, sol, args.k, args.l, budget=args.budget)
    if res.feasible:
        print("feasible")
        print(f"objective {res.objective}")
        return OK
    print(f"violated: {res.violation}")
    return VIOLATED


def _cmd_gadget(args, build):
    inst = load_instance(args.instance)
    phi = inst.relations[inst.relation_id(args.relation)]
    res = build(inst, phi)
    print(f"# copies {res.copies} bound {res.bound} delta {res.delta} "
          f"shift {res.shift} replaced {res.replaced}")
    print(print_instance(res.instance), end="")
    return OK


def _cmd_contract_eq(args):
    inst = load_instance(args.instance)
    quotient, classes = contract_equalities(inst, args.relation)
    print("classes " + " ".join(map(str, classes)))
    print(print_instance(quotient), end="")
    return OK


_DISPATCH = {
    "solve-exact": _cmd_solve_exact,
    "solve-sa": _cmd_solve_sa,
    "extract": _cmd_extract,
    "minimality": _cmd_minimality,
    "test-fpol": _cmd_test_fpol,
    "test-bwc": _cmd_test_bwc,
    "test-sym": _cmd_test_sym,
    "find-core": _cmd_find_core,
    "express": _cmd_express,
    "gen-gap": _cmd_gen_gap,
    "gap-cert": _cmd_gap_cert,
    "verify": _cmd_verify,
    "gadget-opt": lambda a: _cmd_gadget(a, opt_gadget),
    "gadget-feas": lambda a: _cmd_gadget(a, feas_gadget),
    "contract-eq": _cmd_contract_eq,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        _check_threads(args)
        return _DISPATCH[args.verb](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except BudgetError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return RESOURCE
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
