"""
Why the solver takes centering steps
====================================

A predictor-corrector method drives the complementarity gap to zero very
quickly.  On a problem with many solutions that speed has a cost: the
iterates can settle on the optimal face before they have been pulled to
its center.  The solver therefore inserts pure centering steps whenever
the products ``z_i s_i`` drift too far from their mean.
"""

import numpy as np

from analasso import SolverConfig, objective, segment_example, solve

problem = segment_example()
x0 = np.array([0.7, 0.0])

plain, tr_plain = solve(problem, SolverConfig(center_tol=None), start=x0)
centered, tr_centered = solve(problem, start=x0)

for name, pt, tr in (("plain", plain, tr_plain), ("with centering", centered, tr_centered)):
    kinds = [r.kind for r in tr.records]
    print(f"{name:15s} x = {np.round(pt.x, 6)}  objective {objective(problem, pt.x):.9f}  "
          f"iterations {tr.iterations}  centering steps {kinds.count('center')}")

# both points are optimal, only one is the analytic center (1/4, 1/4)
