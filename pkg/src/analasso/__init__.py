"""Analysis-Lasso solver that returns the solution of maximal D-support.

The interior-point method in :mod:`analasso.ipm` follows the central path
of the lifted quadratic program to its limit, the analytic center of the
solution polytope.  :mod:`analasso.oracle` provides brute-force ground
truth and :mod:`analasso.geometry` the certificates tying the two together.
"""
from .geometry import (
    CertificateReport,
    OrthantTransform,
    SupportPattern,
    certify_maximal,
    d_support,
    kernel_singleton_check,
    orthant_transform,
    same_image,
    sign_consistent,
)
from .instances import (
    kernel_example,
    segment_example,
    random_instance,
    random_instances,
    strictly_convex_example,
)
from .ipm import SolverConfig, SolveTrace, least_squares_start, solve
from .kkt import PrimalDualPoint, Residuals, duality_gap, residuals
from .model import (
    AugmentedQP,
    Problem,
    ProblemError,
    RestrictedInjectivityError,
    lift,
    objective,
    split_variable,
    validate,
)
from .oracle import OracleResult, solve_oracle

__version__ = "0.1.0"
