"""The exact rational simplex solver on classical corner cases.

Floating-point LP solvers answer "0.05000000000000002"; this one answers
1/20.  The demo solves a textbook program, the cycling example that
defeats naive pivoting, and shows infeasible/unbounded detection.
"""

from vcsp_sa import check_point, linear_program, solve_lp

# maximize 3x + 5y (i.e. minimize the negation) under three resource rows
lp = linear_program(
    2,
    [-3, -5],
    [({0: 1}, "<=", 4), ({1: 2}, "<=", 12), ([3, 2], "<=", 18)],
)
res = solve_lp(lp)
point = ", ".join(str(x) for x in res.point)
print(f"resource allocation: status={res.status} value={res.value} at ({point})")
ok, violations, value = check_point(lp, res.point)
print(f"  independent re-check: ok={ok} value={value}")

# the cycling program: Dantzig's rule loops forever without
# anti-cycling safeguards; both pivot rules terminate here
beale = linear_program(
    4,
    ["-3/4", 150, "-1/50", 6],
    [
        (["1/4", -60, "-1/25", 9], "<=", 0),
        (["1/2", -90, "-1/50", 3], "<=", 0),
        ({2: 1}, "<=", 1),
    ],
)
for pivot in ("bland", "dantzig"):
    res = solve_lp(beale, pivot=pivot)
    print(f"cycling example with {pivot}: {res.value} in {res.iterations} pivots")

# statuses are explicit, never encoded as huge numbers
print("x >= 2 and x <= 1:", solve_lp(linear_program(1, [1], [({0: 1}, ">=", 2), ({0: 1}, "<=", 1)])).status)
print("minimize -x, x free above:", solve_lp(linear_program(1, [-1], [])).status)

# rational data stays rational: coefficients can be strings, ints, or Q
tight = linear_program(1, [-1], [({0: 1}, "<=", "7/3")])
print("max x s.t. x <= 7/3:", -solve_lp(tight).value)
