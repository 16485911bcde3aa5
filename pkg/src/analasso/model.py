"""Problem definition, validation and the lifted quadratic program.

The analysis-Lasso reads::

    minimize  h(x) = 1/2 ||y - Phi x||^2 + lam ||D^T x||_1

with ``Phi`` of shape (q, n) and the dictionary ``D`` of shape (n, p).

The lifted problem introduces ``z >= 0`` of length ``2p`` holding the
negative parts followed by the positive parts of ``D^T x``. With
``Itilde = [I_p, -I_p]`` the coupling constraint is ``D^T x + Itilde z = 0``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg


class ProblemError(ValueError):
    """Raised on malformed problem data (shapes, non-finite entries, lam <= 0)."""


class RestrictedInjectivityError(ProblemError):
    """Raised when Ker D^T and Ker Phi intersect non-trivially."""


@dataclass(frozen=True)
class Problem:
    """Data ``(phi, d, y, lam)`` of an analysis-Lasso instance.

    Arrays are copied to float64 and made read-only on construction.
    """

    phi: np.ndarray
    d: np.ndarray
    y: np.ndarray
    lam: float

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float, ndmin=2)
        d = np.array(self.d, dtype=float, ndmin=2)
        y = np.array(self.y, dtype=float).reshape(-1)
        for a in (phi, d, y):
            a.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n(self):
        return self.phi.shape[1]

    @property
    def p(self):
        return self.d.shape[1]

    @property
    def q(self):
        return self.phi.shape[0]


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`, one entry per invariant."""

    checks: dict = field(default_factory=dict)
    rank: int | None = None
    message: str = ""

    @property
    def ok(self):
        return all(self.checks.values())


def _stacked_rank(phi, d):
    """Numerical rank of ``[Phi; D^T]`` from a column-pivoted QR."""
    m = np.vstack([phi, d.T])
    rows, n = m.shape
    if n == 0:
        return 0
    if rows == 0:
        return 0
    _, r, _ = linalg.qr(m, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    col_norm = np.max(np.linalg.norm(m, axis=0))
    tau = max(rows, n) * np.finfo(float).eps * col_norm
    return int(np.sum(diag > tau))


def validate(problem):
    """Check the invariants of ``problem``.

    Returns
    -------
    ValidationReport
        ``checks`` maps ``"lambda_positive"``, ``"dimensions"``, ``"finite"``
        and ``"restricted_injectivity"`` to booleans. ``rank`` holds the
        numerical rank of ``[Phi; D^T]`` when the dimensions allow computing it.
    """
    pb = problem
    rep = ValidationReport()
    rep.checks["lambda_positive"] = bool(np.isfinite(pb.lam) and pb.lam > 0)
    dims = (
        pb.phi.ndim == 2
        and pb.d.ndim == 2
        and pb.d.shape[0] == pb.phi.shape[1]
        and pb.y.shape[0] == pb.phi.shape[0]
    )
    rep.checks["dimensions"] = bool(dims)
    rep.checks["finite"] = bool(
        np.all(np.isfinite(pb.phi)) and np.all(np.isfinite(pb.d)) and np.all(np.isfinite(pb.y))
    )
    if not dims:
        rep.checks["restricted_injectivity"] = False
        rep.message = (
            f"dimension mismatch: phi {pb.phi.shape}, d {pb.d.shape}, y {pb.y.shape}"
        )
        return rep
    if not rep.checks["finite"]:
        rep.checks["restricted_injectivity"] = False
        rep.message = "non-finite entries in problem data"
        return rep
    rep.rank = _stacked_rank(pb.phi, pb.d)
    rep.checks["restricted_injectivity"] = rep.rank == pb.n
    failed = [k for k, v in rep.checks.items() if not v]
    if "restricted_injectivity" in failed:
        rep.message = (
            f"restricted injectivity violated: Ker D* ∩ Ker Φ = {{0}} fails, "
            f"rank([Φ; D*]) = {rep.rank} < n = {pb.n}"
        )
    elif failed:
        rep.message = "failed: " + ", ".join(failed)
    return rep


def check_problem(problem):
    """Raise unless ``problem`` passes :func:`validate`."""
    rep = validate(problem)
    if rep.ok:
        return rep
    if rep.checks["dimensions"] and rep.checks["finite"] and rep.checks["lambda_positive"]:
        raise RestrictedInjectivityError(rep.message)
    raise ProblemError(rep.message or "invalid problem")


def objective(problem, x):
    """Evaluate ``1/2 ||y - Phi x||^2 + lam ||D^T x||_1``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ProblemError(f"x has shape {x.shape}, expected ({problem.n},)")
    r = problem.y - problem.phi @ x
    return 0.5 * float(r @ r) + problem.lam * float(np.sum(np.abs(problem.d.T @ x)))


@dataclass(frozen=True)
class AugmentedQP:
    """Lifted quadratic program ``1/2 <Qx,x> - <c,x> + lam <e,z>``.

    ``half_norm_y_sq`` is the constant that turns the lifted objective back
    into ``h(x)``.
    """

    q_mat: np.ndarray
    c: np.ndarray
    lam: float
    n: int
    p: int
    half_norm_y_sq: float

    def f(self, x, z):
        """Lifted objective, ignoring the coupling constraint."""
        return 0.5 * float(x @ self.q_mat @ x) - float(self.c @ x) + self.lam * float(np.sum(z))


def lift(problem):
    """Build the lifted QP with ``Q = Phi^T Phi`` and ``c = Phi^T y``."""
    phi = problem.phi
    q_mat = phi.T @ phi
    # exact symmetry; the product is symmetric only up to rounding
    q_mat = 0.5 * (q_mat + q_mat.T)
    c = phi.T @ problem.y
    q_mat.setflags(write=False)
    c.setflags(write=False)
    return AugmentedQP(
        q_mat=q_mat,
        c=c,
        lam=problem.lam,
        n=problem.n,
        p=problem.p,
        half_norm_y_sq=0.5 * float(problem.y @ problem.y),
    )


def split_variable(d_adj_x):
    """Split ``D^T x`` into ``z = (negative parts; positive parts)``.

    >>> split_variable(np.array([3.0, -2.0]))
    array([0., 2., 3., 0.])
    """
    v = np.asarray(d_adj_x, dtype=float)
    return np.concatenate([np.maximum(-v, 0.0), np.maximum(v, 0.0)])


def itilde(z):
    """Apply ``Itilde = [I_p, -I_p]`` to a vector of length ``2p``."""
    p = z.shape[0] // 2
    return z[:p] - z[p:]


def itilde_adj(u):
    """Apply ``Itilde^T``, mapping ``u`` to ``(u; -u)``."""
    return np.concatenate([u, -u])


def itilde_matrix(p):
    """Dense ``p x 2p`` matrix of ``Itilde``."""
    eye = np.eye(p)
    return np.hstack([eye, -eye])
