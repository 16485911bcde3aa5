"""Brute-force reference solutions for small instances.

Nothing here touches the interior-point code.  The optimal value comes
from enumerating the ``3^p`` sign patterns of ``D^T x`` and solving the
corresponding linear stationarity systems.  The solution polytope is
recovered by enumerating basic subsystems, and its analytic center by a
damped Newton method on the affine hull of the vertices.
"""
import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from .kkt import PrimalDualPoint
from .model import check_problem, objective, split_variable

logger = logging.getLogger(__name__)

P_MAX = 10
N_MAX = 8
FEAS_TOL = 1e-9
DEDUP_TOL = 1e-7


class OracleLimitError(ValueError):
    """Instance too large for exhaustive enumeration."""


class InvalidInput(ValueError):
    """Input points are not (numerically) optimal."""


@dataclass
class OracleResult:
    optimal_value: float
    vertices: list
    witness: np.ndarray
    analytic_center: np.ndarray

    @property
    def k(self):
        return len(self.vertices)


def _check_size(problem, p_max, n_max=None):
    if problem.p > p_max:
        raise OracleLimitError(f"p = {problem.p} exceeds oracle limit {p_max}")
    if n_max is not None and problem.n > n_max:
        raise OracleLimitError(f"n = {problem.n} exceeds oracle limit {n_max}")


def _subgradient_feasible(problem, x, signs, tol=FEAS_TOL):
    """Find ``v`` in the subdifferential of ``||.||_1`` at ``D^T x`` solving
    stationarity, with ``v_i = signs_i`` off the zero set.  Returns the
    residual norm of the best bounded least-squares fit."""
    qx = problem.phi.T @ (problem.phi @ x - problem.y)
    support = signs != 0
    b = -qx / problem.lam - problem.d[:, support] @ signs[support]
    dz = problem.d[:, ~support]
    if dz.shape[1] == 0:
        return float(np.linalg.norm(b))
    fit = optimize.lsq_linear(dz, b, bounds=(-1.0, 1.0), tol=1e-12, lsmr_tol="auto")
    return float(np.linalg.norm(dz @ fit.x - b))


def _accepted_patterns(problem):
    """Yield ``(x, signs)`` for every sign pattern whose stationarity
    system has a consistent solution."""
    n, p = problem.n, problem.p
    phi, d, lam = problem.phi, problem.d, problem.lam
    q_mat = phi.T @ phi
    c = phi.T @ problem.y
    scale = 1.0 + np.max(np.abs(c), initial=0.0) + lam * np.max(np.abs(d), initial=0.0)
    for zmask in itertools.product((False, True), repeat=p):
        zmask = np.array(zmask, dtype=bool)
        zero = np.flatnonzero(zmask)
        supp = np.flatnonzero(~zmask)
        nz = zero.size
        a = np.zeros((n + nz, n + nz))
        a[:n, :n] = q_mat
        a[:n, n:] = lam * d[:, zero]
        a[n:, :n] = d[:, zero].T
        a_pinv = linalg.pinv(a)
        sigmas = np.array(list(itertools.product((-1.0, 1.0), repeat=supp.size)),
                          dtype=float).reshape(2 ** supp.size, supp.size)
        rhs = np.zeros((n + nz, sigmas.shape[0]))
        rhs[:n] = c[:, None] - lam * d[:, supp] @ sigmas.T
        sol = a_pinv @ rhs
        fit = np.max(np.abs(a @ sol - rhs), axis=0, initial=0.0)
        for j in np.flatnonzero(fit <= FEAS_TOL * scale):
            x = sol[:n, j]
            v = sol[n:, j]
            dx = d.T @ x
            margin = FEAS_TOL * (1.0 + np.max(np.abs(dx), initial=0.0))
            if np.any(sigmas[j] * dx[supp] <= margin):
                continue
            signs = np.zeros(p)
            signs[supp] = sigmas[j]
            if np.all(np.abs(v) <= 1.0 + FEAS_TOL):
                yield x, signs
            elif _subgradient_feasible(problem, x, signs) <= FEAS_TOL * scale:
                # dependent atoms in the zero set: min-norm v is not the only choice
                yield x, signs


def optimal_value_by_sign_enumeration(problem, p_max=P_MAX):
    """Optimal value and one minimizer by exhaustive sign enumeration.

    Returns
    -------
    value : float
        Minimum of ``1/2 ||y - Phi x||^2 + lam ||D^T x||_1``.
    witness : ndarray
    """
    check_problem(problem)
    _check_size(problem, p_max)
    best_val, best_x = np.inf, None
    for x, _ in _accepted_patterns(problem):
        val = objective(problem, x)
        if val < best_val:
            best_val, best_x = val, x
    if best_x is None:
        raise RuntimeError("no sign pattern satisfied the optimality system")
    return best_val, best_x


def is_optimal(problem, x, tol=FEAS_TOL):
    """Dual certificate test: does some subgradient make ``x`` stationary?"""
    dx = problem.d.T @ x
    thr = 1e-9 * (1.0 + np.max(np.abs(dx), initial=0.0))
    signs = np.where(np.abs(dx) > thr, np.sign(dx), 0.0)
    scale = 1.0 + np.max(np.abs(problem.phi.T @ problem.y), initial=0.0) / problem.lam
    return _subgradient_feasible(problem, x, signs) <= tol * 1e3 * scale


def _extreme_signs(problem, b, ell, tol):
    """Sign of each ``(D^T x)_i`` over the solution set, via 2p linear programs
    ``max +-(D^T x)_i`` subject to ``Phi x = b, ||D^T x||_1 <= ell``."""
    n, p = problem.n, problem.p
    dt = problem.d.T
    # variables (x, t); -t <= D^T x <= t, sum t <= ell, Phi x = b
    a_ub = np.vstack([
        np.hstack([dt, -np.eye(p)]),
        np.hstack([-dt, -np.eye(p)]),
        np.hstack([np.zeros((1, n)), np.ones((1, p))]),
    ])
    b_ub = np.concatenate([np.zeros(2 * p), [ell]])
    a_eq = np.hstack([problem.phi, np.zeros((problem.q, p))])
    bounds = [(None, None)] * n + [(0, None)] * p
    signs = np.zeros(p)
    for i in range(p):
        reach = []
        for sgn in (1.0, -1.0):
            cost = np.zeros(n + p)
            cost[:n] = -sgn * dt[i]
            out = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b,
                                   bounds=bounds, method="highs")
            if out.status != 0:
                raise RuntimeError(f"linear program failed: {out.message}")
            reach.append(-out.fun)
        if reach[0] > tol and reach[1] > tol:
            raise InvalidInput(f"index {i} takes both signs on the solution set")
        if reach[0] > tol:
            signs[i] = 1.0
        elif reach[1] > tol:
            signs[i] = -1.0
    return signs


def _dedup_sorted(points, tol=DEDUP_TOL):
    kept = []
    for x in points:
        if all(np.max(np.abs(x - y)) > tol for y in kept):
            kept.append(x)
    kept.sort(key=lambda v: tuple(v))
    return kept


def enumerate_vertices(problem, witness, p_max=P_MAX, n_max=N_MAX):
    """Extreme points of the solution set.

    The solution set is ``{x : Phi x = Phi w, ||D^T x||_1 = ||D^T w||_1}``
    for any minimizer ``w``.  With ``eps`` the D-sign pattern of the
    solution set it is the polytope::

        Phi x = Phi w,  (D^T x)_i = 0 off supp(eps),
        eps_i (D^T x)_i >= 0,  <eps, D^T x> = ||D^T w||_1

    whose vertices are found by making every subset of the sign
    inequalities active and keeping the feasible unique solutions.
    """
    check_problem(problem)
    _check_size(problem, p_max, n_max)
    witness = np.asarray(witness, dtype=float)
    if not is_optimal(problem, witness):
        raise InvalidInput("witness is not an optimal point")
    n = problem.n
    dt = problem.d.T
    b = problem.phi @ witness
    ell = float(np.sum(np.abs(dt @ witness)))
    tol = 1e-7 * max(1.0, ell)
    eps = _extreme_signs(problem, b, ell, tol)
    on = np.flatnonzero(eps != 0)
    off = np.flatnonzero(eps == 0)
    base = np.vstack([problem.phi, dt[off], (eps[on] @ dt[on])[None, :]])
    base_rhs = np.concatenate([b, np.zeros(off.size), [ell]])
    scale = 1.0 + np.max(np.abs(witness))
    found = []
    for r in range(on.size + 1):
        for active in itertools.combinations(on, r):
            m = np.vstack([base, dt[list(active)]]) if active else base
            rhs = np.concatenate([base_rhs, np.zeros(len(active))])
            sol, _, rank, _ = np.linalg.lstsq(m, rhs, rcond=None)
            if rank < n:
                continue
            if np.max(np.abs(m @ sol - rhs)) > FEAS_TOL * (1.0 + np.max(np.abs(rhs))) * 1e2:
                continue
            if np.any(eps[on] * (dt[on] @ sol) < -FEAS_TOL * scale):
                continue
            found.append(sol)
    vertices = _dedup_sorted(found)
    if not vertices:
        raise RuntimeError("vertex enumeration found no feasible basic point")
    return vertices


def union_signs(problem, points, tol=None):
    """Sign pattern of ``D^T x`` united over ``points``."""
    vals = np.array([problem.d.T @ x for x in points])
    if tol is None:
        tol = 1e-7 * (1.0 + np.max(np.abs(vals), initial=0.0))
    signs = np.zeros(problem.p)
    for row in vals:
        mask = np.abs(row) > tol
        signs[mask] = np.sign(row[mask])
    return signs


def _face_log_barrier(g_mat, offset, theta):
    g = offset + g_mat @ theta
    if np.any(g <= 0):
        return -np.inf, g
    return float(np.sum(np.log(g))), g


def analytic_center_bruteforce(problem, vertices, tol=1e-14, max_iter=200):
    """Analytic center of the face spanned by ``vertices``.

    Maximizes ``sum_{i in E} log |(D^T x)_i|`` over the relative interior
    of ``conv(vertices)``, where ``E`` is the union D-support of the
    vertices.  The face is parameterized by an orthonormal basis of its
    affine hull and the concave objective is maximized by damped Newton
    steps starting at the vertex centroid.
    """
    verts = np.array(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[0] == 0:
        raise ValueError("need at least one vertex")
    if verts.shape[0] == 1:
        return verts[0].copy()
    center0 = verts.mean(axis=0)
    diffs = verts - center0
    _, sv, vt = np.linalg.svd(diffs, full_matrices=False)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
    if rank == 0:
        return center0
    basis = vt[:rank].T
    eps = union_signs(problem, verts)
    on = np.flatnonzero(eps != 0)
    g_mat = (eps[on, None] * problem.d.T[on]) @ basis
    offset = eps[on] * (problem.d.T[on] @ center0)
    theta = np.zeros(rank)
    val, g = _face_log_barrier(g_mat, offset, theta)
    if not np.isfinite(val):
        raise RuntimeError("vertex centroid is not in the relative interior")
    for _ in range(max_iter):
        grad = g_mat.T @ (1.0 / g)
        hess = (g_mat / g[:, None] ** 2).T @ g_mat
        step = linalg.solve(hess, grad, assume_a="pos")
        decrement = float(grad @ step)
        if decrement < tol:
            break
        t = 1.0
        while True:
            new_val, new_g = _face_log_barrier(g_mat, offset, theta + t * step)
            if new_val >= val + 0.25 * t * decrement:
                break
            t *= 0.5
            if t < 1e-16:
                break
        theta = theta + t * step
        val, g = new_val, new_g
    return center0 + basis @ theta


def solve_oracle(problem, p_max=P_MAX, n_max=N_MAX):
    """Run the full brute-force pipeline."""
    value, witness = optimal_value_by_sign_enumeration(problem, p_max)
    vertices = enumerate_vertices(problem, witness, p_max, n_max)
    center = analytic_center_bruteforce(problem, vertices)
    return OracleResult(value, vertices, witness, center)


def optimal_primal_dual(problem, x):
    """Optimal primal-dual point of the lifted problem for an optimal ``x``.

    With ``v`` a stationary subgradient (``Qx - c + lam D v = 0``) the
    multiplier is ``u = -lam v`` and the dual slack ``s = lam (1 + v; 1 - v)``.
    """
    x = np.asarray(x, dtype=float)
    dx = problem.d.T @ x
    thr = 1e-9 * (1.0 + np.max(np.abs(dx), initial=0.0))
    signs = np.where(np.abs(dx) > thr, np.sign(dx), 0.0)
    v = signs.copy()
    zero = signs == 0
    if np.any(zero):
        qx = problem.phi.T @ (problem.phi @ x - problem.y)
        b = -qx / problem.lam - problem.d[:, ~zero] @ signs[~zero]
        v[zero] = optimize.lsq_linear(problem.d[:, zero], b, bounds=(-1.0, 1.0), tol=1e-12).x
    u = -problem.lam * v
    s = problem.lam * np.concatenate([1.0 + v, 1.0 - v])
    return PrimalDualPoint(x, split_variable(dx), u, s)
