"""Fractional polymorphisms: membership tests, certificates, and cores.

An operation is "in the support" of a language when some cost-improving
distribution over operations gives it positive weight.  Membership is
decided by an exact LP; a No comes with an integral Farkas certificate
that converts into a concrete instance separating the operation from the
projections.
"""

from vcsp_sa import (
    brute_force_opt,
    cut_cost,
    evaluate,
    find_core,
    in_support,
    make_operation,
    nu01,
    nu10,
    operation_assignment,
    projection,
    separating_instance,
    soft_xor,
)

minimum = make_operation(2, 2, lambda t: min(t))
majority = make_operation(3, 2, lambda t: 1 if sum(t) >= 2 else 0)

# the cut language: cut cost plus both biased unary costs
cut_language = [cut_cost(), nu01(), nu10()]
res = in_support(minimum, cut_language)
print(f"min in support of the cut language: {res.member}, best weight {res.value}")
for op, w in res.witness.items():
    print(f"  witness weight {w} on table {op.values}")

# majority against the equality-cost language: a conclusive No
res = in_support(majority, [soft_xor()])
print(f"majority in support of the equality-cost language: {res.member}")
print(f"  certificate arity {res.certificate.arity}, "
      f"{len(res.certificate.entries)} entries")

# the certificate builds an instance where every projection is optimal
# but the majority image is strictly worse
sep = separating_instance(res.certificate, majority, [soft_xor()])
opt, _ = brute_force_opt(sep)
print(f"separating instance: {sep.num_vars} variables, optimum {opt}")
for i in range(3):
    sigma = operation_assignment(projection(3, 2, i))
    print(f"  projection {i} achieves {evaluate(sep, sigma)}")
print(f"  majority achieves {evaluate(sep, operation_assignment(majority))}")

# cores: a biased unary cost collapses the domain to its cheap label
core = find_core([nu01()])
print(f"core of the 0-biased unary cost: domain {core.domain}")
core = find_core(cut_language)
print(f"core of the full cut language: domain {core.domain}")
