"""
Central path on a two-variable example
======================================

Minimize ``1/2 (1 - x1 - x2)^2 + 1/2 (|x1| + |x2|)``.  Every point of the
segment from (1/2, 0) to (0, 1/2) is optimal, and the two endpoints have
a smaller support than the interior points.  The interior-point solver
lands on the midpoint (1/4, 1/4) regardless of where it starts.
"""

import numpy as np

from analasso import least_squares_start, segment_example, solve, solve_oracle

problem = segment_example()

# the brute-force oracle gives the segment and its analytic center
ref = solve_oracle(problem)
print("optimal value   ", ref.optimal_value)
print("vertices        ", [v.tolist() for v in ref.vertices])
print("analytic center ", ref.analytic_center)

# two different starting points
starts = {"(0.7, 0)": np.array([0.7, 0.0]), "least squares": least_squares_start(problem)}
paths = {}
for name, x0 in starts.items():
    pt, trace = solve(problem, start=x0)
    paths[name] = trace.path()
    print(f"\nstart {name}: {trace.status} after {trace.iterations} iterations")
    print("  iter          mu        x1        x2  kind")
    for rec in trace.records[:: max(1, len(trace.records) // 8)]:
        print(f"  {rec.iter:4d}  {rec.mu:10.2e}  {rec.x[0]:8.5f}  {rec.x[1]:8.5f}  {rec.kind}")
    print("  final x =", pt.x)

# plotting is optional
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.plot([0.5, 0.0], [0.0, 0.5], "k-", lw=3, alpha=0.3, label="solution set")
    for name, path in paths.items():
        ax.plot(path[:, 0], path[:, 1], ".-", label=f"start {name}")
    ax.plot(0.25, 0.25, "r*", ms=12, label="analytic center")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig("worked_example_path.png", dpi=120)
    print("\nwrote worked_example_path.png")
