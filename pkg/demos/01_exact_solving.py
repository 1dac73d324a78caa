"""Build a small valued CSP, evaluate assignments, and solve it exactly.

The running example is a triangle whose edges carry the cut cost (1 when
the endpoints differ) with the two endpoints of one edge pinned to
different labels, forcing every assignment to cut at least two edges.
"""

from vcsp_sa import (
    brute_force_opt,
    crisp_relation,
    cut_cost,
    evaluate,
    express,
    instance,
    neq_relation,
)

pin0 = crisp_relation(1, 2, [(0,)])
pin1 = crisp_relation(1, 2, [(1,)])
triangle = instance(
    3,
    2,
    [cut_cost(), pin0, pin1],
    [(0, (0, 1)), (0, (1, 2)), (0, (0, 2)), (1, (0,)), (2, (2,))],
    names=["cut", "pin0", "pin1"],
)

print("A pinned cut triangle on variables 0, 1, 2:")
for sigma in [(0, 0, 1), (0, 1, 1), (1, 0, 1), (0, 0, 0)]:
    print(f"  value{sigma} = {evaluate(triangle, sigma)}")

value, witness = brute_force_opt(triangle)
print(f"optimum {value} at {witness}")

# brute force reports infinity (and no witness) on unsatisfiable instances
conflict = instance(1, 2, [pin0, pin1], [(0, (0,)), (1, (0,))])
value, witness = brute_force_opt(conflict)
print(f"conflicting pins: optimum {value}, witness {witness}")

# new relations can be expressed from old ones by minimizing out auxiliaries:
# chaining two disequalities yields equality
chain = instance(3, 2, [neq_relation()], [(0, (0, 2)), (0, (2, 1))])
eq = express(chain, (0, 1))
print("equality expressed from a disequality chain:")
for t in eq.feasible_tuples():
    print(f"  allows {t}")
