"""Mehrotra predictor-corrector interior-point solver for the lifted problem.

Each iteration computes an affine-scaling direction, estimates the
complementarity reachable along it, picks the centering weight
``sigma = (mu_aff / mu)^3``, adds a second-order corrector and takes a
single relaxed step for all four blocks.  The primal limit of the
iterates is the analytic center of the solution polytope, i.e. a solution
of maximal D-support.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import kkt
from .kkt import PrimalDualPoint
from .model import check_problem, itilde, itilde_adj, lift, split_variable

logger = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITERS = "max-iters"
NUMERICAL_FAILURE = "numerical-failure"


class NumericalFailure(RuntimeError):
    """The reduced Newton system could not be factorized."""


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    Parameters
    ----------
    eps : float
        Stopping tolerance on every KKT block norm and on ``mu``.
    eta : float
        Step relaxation in (0, 1).
    max_iters : int
        Iteration budget.
    t_cap : float
        Upper bound on the step length.
    reg : float
        First diagonal regularization tried when the Newton matrix is singular.
    center_tol : float or None
        Pure centering steps (``sigma = 1``) are taken before a
        predictor-corrector step while ``max |z_i s_i / mu - 1|`` exceeds
        this value.  ``None`` disables them.
    max_center_steps : int
        Cap on consecutive centering steps.
    """

    eps: float = 1e-8
    eta: float = 0.95
    max_iters: int = 200
    t_cap: float = 1.0
    reg: float = 1e-12
    center_tol: float | None = 1e-8
    max_center_steps: int = 30

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.t_cap > 0:
            raise ValueError("t_cap must be positive")
        if self.reg < 0:
            raise ValueError("reg must be nonnegative")


@dataclass(frozen=True)
class Direction:
    dx: np.ndarray
    dz: np.ndarray
    du: np.ndarray
    ds: np.ndarray

    def __add__(self, other):
        return Direction(
            self.dx + other.dx, self.dz + other.dz, self.du + other.du, self.ds + other.ds
        )


@dataclass
class IterRecord:
    iter: int
    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    s: np.ndarray
    mu: float
    res_norms: tuple
    step: float
    sigma: float
    kind: str


@dataclass
class SolveTrace:
    """Per-iteration history; ``records[0]`` is the starting point."""

    records: list = field(default_factory=list)
    status: str = ""

    @property
    def iterations(self):
        return max(len(self.records) - 1, 0)

    def path(self):
        """Primal iterates stacked as an array of shape (iterations + 1, n)."""
        return np.array([r.x for r in self.records])


def _reduced_matrix(qp, d, pt):
    w = pt.z / pt.s
    n, p = qp.n, qp.p
    k = np.empty((n + p, n + p))
    k[:n, :n] = qp.q_mat
    k[:n, n:] = -d
    k[n:, :n] = d.T
    k[n:, n:] = np.diag(w[:p] + w[p:])
    return k


def _factor_solve(k, b, regs):
    size = k.shape[0]
    for delta in regs:
        kk = k if delta == 0 else k + delta * np.eye(size)
        try:
            lu, piv = linalg.lu_factor(kk, check_finite=True)
        except (linalg.LinAlgError, ValueError):
            continue
        if np.any(np.diag(lu) == 0):
            continue
        sol = linalg.lu_solve((lu, piv), b)
        if np.all(np.isfinite(sol)):
            if delta:
                logger.debug("Newton system regularized with delta=%g", delta)
            return sol
    raise NumericalFailure("reduced Newton system is singular after regularization")


def newton_solve(qp, d, pt, rhs, reg=1e-12):
    """Solve the linearized KKT system at ``pt``.

    Finds the direction satisfying::

        Q dx - D du          = -r1
        -ds - Itilde^T du    = -r2
        S dz + Z ds          = -r3
        D^T dx + Itilde dz   = -r4

    where ``rhs = (r1, r2, r3, r4)``.  ``ds`` and ``dz`` are eliminated and
    the remaining ``(n + p)`` system in ``(dx, du)`` is solved by LU.
    Diagonal regularization (``reg``, then ``1e-8``) is only used if the
    plain factorization breaks down.
    """
    r1, r2, r3, r4 = (np.asarray(r, dtype=float) for r in rhs)
    n = qp.n
    top = -r1
    bot = -r4 + itilde((r3 + pt.z * r2) / pt.s)
    k = _reduced_matrix(qp, d, pt)
    regs = [0.0] + [r for r in (reg, 1e-8) if r > 0]
    sol = _factor_solve(k, np.concatenate([top, bot]), regs)
    dx, du = sol[:n], sol[n:]
    ds = r2 - itilde_adj(du)
    dz = (-r3 - pt.z * ds) / pt.s
    return Direction(dx, dz, du, ds)


def max_step(pt, direction):
    """Largest ``t >= 0`` keeping ``z + t dz`` and ``s + t ds`` nonnegative.

    Returns ``math.inf`` when no direction component is negative.
    """
    v = np.concatenate([pt.z, pt.s])
    dv = np.concatenate([direction.dz, direction.ds])
    neg = dv < 0
    if not np.any(neg):
        return math.inf
    return float(np.min(-v[neg] / dv[neg]))


def centering_sigma(mu, mu_affine):
    """Centering weight ``(mu_affine / mu)^3`` clamped to [0, 1]."""
    if mu <= 0:
        return 0.0
    return float(np.clip((mu_affine / mu) ** 3, 0.0, 1.0))


def affine_mu(pt, direction, t_affine):
    """Complementarity measure at the trial point ``pt + t_affine * direction``."""
    z = pt.z + t_affine * direction.dz
    s = pt.s + t_affine * direction.ds
    return kkt.complementarity(z, s)


def corrector_rhs(res, dir_affine, sigma, mu):
    """Right-hand sides of the corrector system.

    Only the complementarity block is nonzero: ``-dz_a * ds_a + sigma mu e``.
    The values are the right-hand sides themselves, i.e. the negatives of
    the residual-shaped input expected by :func:`newton_solve`.
    """
    n, p2, p = res.r1.shape[0], res.r2.shape[0], res.r4.shape[0]
    r3 = -dir_affine.dz * dir_affine.ds + sigma * mu
    return (np.zeros(n), np.zeros(p2), r3, np.zeros(p))


def initial_point(problem, x0=None, qp=None):
    """Strictly interior starting point.

    ``x0`` defaults to the ridge solution of ``(Q + I) x = c``.  The split
    variable is shifted by 1/2 so that ``z > 0`` while keeping
    ``D^T x + Itilde z = 0``; ``u = 0`` and ``s = lam e`` (floored at
    ``lam / 2``, or at 1 for ``lam < 1e-6``).
    """
    qp = lift(problem) if qp is None else qp
    if x0 is None:
        x0 = linalg.solve(qp.q_mat + np.eye(qp.n), qp.c, assume_a="pos")
    x0 = np.array(x0, dtype=float).reshape(-1)
    if x0.shape != (problem.n,):
        raise ValueError(f"start has shape {x0.shape}, expected ({problem.n},)")
    z0 = split_variable(problem.d.T @ x0) + 0.5
    u0 = np.zeros(problem.p)
    floor = 0.5 * problem.lam if problem.lam >= 1e-6 else 1.0
    s0 = np.maximum(problem.lam - itilde_adj(u0), floor)
    return PrimalDualPoint(x0, z0, u0, s0)


def least_squares_start(problem):
    """Starting point built from the minimum-norm least-squares solution."""
    x0 = np.linalg.lstsq(problem.phi, problem.y, rcond=None)[0]
    return initial_point(problem, x0)


def _record(trace, it, pt, res, step, sigma, kind):
    trace.records.append(
        IterRecord(
            it, pt.x.copy(), pt.z.copy(), pt.u.copy(), pt.s.copy(),
            res.mu, res.norms(), step, sigma, kind,
        )
    )


def proximity(pt, mu):
    """Distance to the central path, ``max_i |z_i s_i / mu - 1|``."""
    if mu <= 0 or pt.z.size == 0:
        return 0.0
    return float(np.max(np.abs(pt.z * pt.s / mu - 1.0)))


def _predictor_corrector(qp, d, pt, res, config):
    mu = res.mu
    da = newton_solve(qp, d, pt, (res.r1, res.r2, res.r3, res.r4), config.reg)
    ta = max_step(pt, da)
    if math.isinf(ta):
        ta = config.t_cap
    mu_a = affine_mu(pt, da, ta)
    sigma = centering_sigma(mu, mu_a)
    rc = corrector_rhs(res, da, sigma, mu)
    dc = newton_solve(qp, d, pt, tuple(-v for v in rc), config.reg)
    return da + dc, sigma


def solve(problem, config=None, start=None):
    """Run the predictor-corrector iteration.

    Parameters
    ----------
    problem : Problem
    config : SolverConfig, optional
    start : PrimalDualPoint or array_like, optional
        Full primal-dual start, or a primal vector passed to
        :func:`initial_point`.  Defaults to the ridge start.

    Returns
    -------
    point : PrimalDualPoint
        Final iterate (the best one seen if the solver did not converge).
    trace : SolveTrace
    """
    config = SolverConfig() if config is None else config
    check_problem(problem)
    qp = lift(problem)
    d = problem.d
    if start is None or not isinstance(start, PrimalDualPoint):
        pt = initial_point(problem, start, qp)
    else:
        pt = start
        if not pt.is_interior():
            raise ValueError("starting point must satisfy z > 0 and s > 0")

    trace = SolveTrace()
    res = kkt.residuals(qp, d, pt)
    _record(trace, 0, pt, res, math.nan, math.nan, "start")
    best, best_score = pt, max(res.max_norm(), res.mu)

    it = 0
    n_center = 0
    while res.max_norm() > config.eps or res.mu > config.eps:
        if it >= config.max_iters:
            trace.status = MAX_ITERS
            return best, trace
        it += 1
        mu = res.mu
        center = (
            config.center_tol is not None
            and n_center < config.max_center_steps
            and proximity(pt, mu) > config.center_tol
        )
        try:
            if center:
                n_center += 1
                sigma = 1.0
                direction = newton_solve(
                    qp, d, pt, (res.r1, res.r2, res.r3 - mu, res.r4), config.reg
                )
            else:
                n_center = 0
                direction, sigma = _predictor_corrector(qp, d, pt, res, config)
        except NumericalFailure:
            logger.warning("numerical failure at iteration %d", it)
            trace.status = NUMERICAL_FAILURE
            return best, trace
        step = min(config.eta * max_step(pt, direction), config.t_cap)
        pt = PrimalDualPoint(
            pt.x + step * direction.dx,
            pt.z + step * direction.dz,
            pt.u + step * direction.du,
            pt.s + step * direction.ds,
        )
        if not pt.is_finite():
            trace.status = NUMERICAL_FAILURE
            return best, trace
        res = kkt.residuals(qp, d, pt)
        _record(trace, it, pt, res, step, sigma, "center" if center else "pc")
        score = max(res.max_norm(), res.mu)
        if score <= best_score:
            best, best_score = pt, score
        logger.debug("iter %d %s mu=%.3e res=%.3e step=%.3f sigma=%.3e",
                     it, "center" if center else "pc", res.mu, res.max_norm(), step, sigma)

    trace.status = CONVERGED
    return pt, trace
