"""Hierarchy levels, assignment extraction, and local consistency.

The level-(k,l) relaxation optimizes over distributions on variable
subsets of size <= l whose marginals agree on subsets of size <= k.
Higher levels can only tighten the bound; on languages of bounded
relational width a low level is already exact.
"""

from vcsp_sa import (
    brute_force_opt,
    crisp_relation,
    cut_cost,
    extract_assignment,
    instance,
    kl_minimality,
    neq_relation,
    solve_sa,
    two_sat_language,
)

pin0 = crisp_relation(1, 2, [(0,)])
pin1 = crisp_relation(1, 2, [(1,)])
pinned_triangle = instance(
    3,
    2,
    [cut_cost(), pin0, pin1],
    [(0, (0, 1)), (0, (1, 2)), (0, (0, 2)), (1, (0,)), (2, (2,))],
)

opt, _ = brute_force_opt(pinned_triangle)
print(f"true optimum: {opt}")
for k, l in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]:
    res = solve_sa(pinned_triangle, k, l)
    print(f"  SA({k},{l}) = {res.value}")

# self-reduction: pin variables one at a time while the relaxation value
# stays put; the result is a certified optimal assignment
ext = extract_assignment(pinned_triangle, 1, 2)
print(f"extracted assignment {ext.assignment} with value {ext.value}")

# (k,l)-minimality propagates crisp constraints to a fixpoint; an odd
# disequality cycle empties at level (2,3), an even one survives
for n in (3, 4):
    ring = instance(
        n, 2, [neq_relation()], [(0, (i, (i + 1) % n)) for i in range(n)]
    )
    state = kl_minimality(ring, 2, 3)
    print(f"disequality {n}-cycle: {'empty' if state.empty else 'nonempty'}")

# on 2-SAT the fixpoint keeps exactly the extendable partial assignments
two = two_sat_language(with_constants=True)
inst = instance(
    3, 2, list(two.values()),
    [(2, (0, 1)), (2, (1, 2)), (5, (0,))],  # an implication chain, x0 pinned
)
state = kl_minimality(inst, 2, 3)
print("surviving singleton assignments under implications with a pin:")
for v in range(3):
    print(f"  variable {v}: {sorted(state.sets[(v,)])}")
