"""
Certifying a maximal-support solution
=====================================

Draw a small random instance whose solution set is not a single point,
enumerate that set with the brute-force oracle and check that the
interior-point limit sits in its relative interior.
"""

import numpy as np

from analasso import certify_maximal, d_support, random_instance, solve, solve_oracle

rng = np.random.default_rng(3)

# keep drawing until the solution set has at least two vertices
while True:
    problem = random_instance(rng, degenerate=True)
    ref = solve_oracle(problem)
    if ref.k >= 2:
        break

print(f"n={problem.n}, p={problem.p}, q={problem.q}, lambda={problem.lam:.4f}")
print(f"{ref.k} vertices, optimal value {ref.optimal_value:.10f}")

pt, trace = solve(problem)
print(f"solver: {trace.status} in {trace.iterations} iterations")
print("distance to analytic center:", np.max(np.abs(pt.x - ref.analytic_center)))

# each vertex misses part of the support; the solver limit does not
for v in ref.vertices:
    print("vertex support   ", d_support(v, problem.d).indices)
print("candidate support", d_support(pt.x, problem.d).indices)

report = certify_maximal(pt.x, ref.vertices, problem)
print("\ncertificate:", {k: v for k, v in report.to_dict().items() if k != "details"})

# a vertex, by contrast, is not maximal
bad = certify_maximal(ref.vertices[0], ref.vertices, problem)
print("vertex as candidate passes?", bad.passed, "- missing", bad.details["missing_indices"])
