"""Exact-rational valued CSP solving and Sherali-Adams relaxations.

The package is organized in thin layers: `rationals` (exact arithmetic),
`core` (relations, instances, brute force, expressibility), `lp` (two-phase
simplex), `sherali_adams` (the SA(k,l) hierarchy and certificates),
`consistency` ((k,l)-minimality), `algebra` (fractional polymorphisms,
support clones, cores, width conditions), `gadgets` (value-preserving
rewritings), `groups`/`gap` (Abelian equation languages and torus gap
instances), `languages` (stock Boolean languages), `io` (text formats) and
`cli` (the `vcsp-sa` binary).
"""

from .algebra import (
    BwcResult,
    CoreResult,
    FarkasCertificate,
    FractionalOperation,
    Operation,
    SupportResult,
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
    test_bwc,
    test_sym,
    uniform_projections,
    validate_certificate,
)
from .consistency import MinimalityState, kl_minimality
from .core import (
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
from .errors import (
    BudgetError,
    InputError,
    InternalError,
    ParseError,
    VcspError,
    enumeration_budget,
)
from .gadgets import GadgetResult, contract_equalities, feas_gadget, opt_gadget
from .gap import (
    AuditResult,
    ClosureSet,
    TorusInstance,
    audit_gap_solution,
    build_gap_solution,
    canonical_parameters,
    closure_Xbar,
    closure_assignments,
    express_r0_rg,
    make_eqs_language,
    make_torus_instance,
    offset_relation,
    sum_relation,
)
from .groups import AbelianGroup, cyclic_group, direct_product, group_from_name
from .io import (
    parse_instance,
    parse_lp,
    parse_operations,
    parse_sa_solution,
    print_instance,
    print_lp,
    print_operations,
    print_sa_solution,
    write_sa_solution,
)
from .languages import (
    binary_cost,
    const_relation,
    cut_cost,
    eq_relation,
    impl_relation,
    nand_relation,
    neq_relation,
    nu01,
    nu10,
    or_relation,
    soft_xor,
    two_sat_language,
    unary_cost,
)
from .lp import LinearProgram, LpResult, check_point, linear_program, solve_lp
from .rationals import INF, ExtRat, Q, rat
from .sherali_adams import (
    SaCheck,
    SaResult,
    SaSolution,
    ScopeIndex,
    build_sa,
    build_scope_index,
    extend_width1,
    extract_assignment,
    integral_solution,
    objective_value,
    solve_sa,
    symmetrize,
    verify_sa_feasible,
)

__version__ = "0.1.0"
