"""An unsatisfiable instance that every level-(k,k) relaxation calls feasible.

Linear equations over a finite Abelian group are arranged on an n-by-n
torus so that the constraint sums telescope to a contradiction: the
instance has no solution, yet for n > 2k an explicit family of local
distributions satisfies every SA(k,k) marginal constraint with objective
0.  The construction makes the relaxation's blind spot exact and
machine-checkable.
"""

from vcsp_sa import (
    audit_gap_solution,
    brute_force_opt,
    build_gap_solution,
    closure_Xbar,
    closure_assignments,
    cyclic_group,
    make_torus_instance,
    verify_sa_feasible,
)

group = cyclic_group(2)

# small tori are brute-forceable and genuinely unsatisfiable
for n in (1, 2):
    _, inst = make_torus_instance(group, n)
    value, witness = brute_force_opt(inst)
    print(f"n={n}: {inst.num_vars} variables, "
          f"{len(inst.constraints)} constraints, optimum {value}")

# the certificate rests on a counting law: the assignments that satisfy
# every constraint inside the closure of a scope number exactly
# |G|^(cells + horizontal runs + vertical runs)
torus, inst = make_torus_instance(group, 5)
scope = (torus.y(0, 0),)
clo = closure_Xbar(scope, torus)
assignments = closure_assignments(torus, clo)
print(f"closure of {{y(0,0)}}: {len(clo.vertices)} cells, "
      f"{len(assignments)} = {group.order}^{clo.free_count} local solutions")

# build the SA(2,2) certificate for the 5x5 torus and verify it exactly
solution = build_gap_solution(torus, 2)
check = verify_sa_feasible(inst, solution, 2, 2)
print(f"n=5, k=2: certificate scopes={len(solution.dists)}, "
      f"feasible={check.feasible}, objective={check.objective}")

# larger tori are audited by sampling marginal rows instead of
# materializing the full certificate
audit = audit_gap_solution(make_torus_instance(group, 9)[0], 4, samples=50, seed=1)
print(f"n=9, k=4 randomized audit: checked={audit.checked}, "
      f"feasible={audit.feasible}")

print()
print("The full n=7, k=3 run is the command-line pipeline:")
print("  vcsp-sa gen-gap --group Z2 --n 7 > torus7.vcsp")
print("  vcsp-sa gap-cert --group Z2 --n 7 --k 3 > torus7.cert")
print("  vcsp-sa verify torus7.vcsp torus7.cert --k 3 --l 3")
