"""Support extraction and geometric certificates on the solution set.

A point of the solution set has maximal D-support exactly when it lies
in the relative interior of that set.  ``certify_maximal`` checks this
numerically against a list of optimal points (typically the vertices
produced by :mod:`analasso.oracle`).
"""
import itertools
from dataclasses import dataclass, field

import numpy as np

from .model import objective


def default_tol(d_adj_x):
    """Scale-aware zero threshold ``1e-7 (1 + ||D^T x||_inf)``."""
    return 1e-7 * (1.0 + float(np.max(np.abs(d_adj_x), initial=0.0)))


@dataclass(frozen=True)
class SupportPattern:
    """Support and signs of ``D^T x``; indices are 0-based."""

    indices: tuple
    signs: np.ndarray
    tol: float

    def __len__(self):
        return len(self.indices)

    def issubset(self, other):
        return set(self.indices) <= set(other.indices)


def d_support(x, d, tol=None):
    """Indices ``i`` with ``|(D^T x)_i| > tol`` and the corresponding signs."""
    v = np.asarray(d, dtype=float).T @ np.asarray(x, dtype=float)
    tol = default_tol(v) if tol is None else float(tol)
    mask = np.abs(v) > tol
    signs = np.where(mask, np.sign(v), 0.0)
    return SupportPattern(tuple(int(i) for i in np.flatnonzero(mask)), signs, tol)


def sign_consistent(x1, x2, d, tol=1e-7):
    """True when ``(D^T x1)_i (D^T x2)_i >= -tol^2`` for every ``i``."""
    d = np.asarray(d, dtype=float)
    prod = (d.T @ x1) * (d.T @ x2)
    return bool(np.all(prod >= -tol * tol))


def same_image(x1, x2, problem, tol=1e-7):
    """True when ``Phi x1 == Phi x2`` and the analysis l1-norms agree, to ``tol``."""
    phi, dt = problem.phi, problem.d.T
    img = float(np.max(np.abs(phi @ x1 - phi @ x2), initial=0.0))
    l1 = abs(float(np.sum(np.abs(dt @ x1)) - np.sum(np.abs(dt @ x2))))
    return img <= tol and l1 <= tol


@dataclass(frozen=True)
class OrthantTransform:
    """Signed permutation ``Gamma = Lambda Sigma``.

    ``perm[j]`` is the original index sent to position ``j``: support indices
    first in ascending order, then the rest.  ``lambda_diag`` is the diagonal
    of ``Lambda`` in permuted coordinates, so its nonzeros are the first ``m``
    entries.
    """

    perm: np.ndarray
    lambda_diag: np.ndarray
    m: int

    def apply(self, v):
        """``Gamma v`` for a vector ``v`` of length p."""
        return self.lambda_diag * np.asarray(v, dtype=float)[self.perm]

    def matrix(self):
        p = self.perm.size
        sigma = np.zeros((p, p))
        sigma[np.arange(p), self.perm] = 1.0
        return np.diag(self.lambda_diag) @ sigma

    @property
    def signs(self):
        """``Lambda`` expressed in the original index order."""
        out = np.zeros(self.perm.size)
        out[self.perm] = self.lambda_diag
        return out


def orthant_transform(x_plus, d, tol=None):
    """Signed permutation sending the D-image of solutions to the nonnegative
    orthant of the first ``m`` coordinates, built from a maximal-support point."""
    sp = d_support(x_plus, d, tol)
    p = sp.signs.size
    on = list(sp.indices)
    off = [i for i in range(p) if i not in set(on)]
    perm = np.array(on + off, dtype=int)
    lam = sp.signs[perm]
    return OrthantTransform(perm, lam, len(on))


def kernel_singleton_check(x, problem, tol=1e-7):
    """True when ``||D^T x||_inf <= tol``; an optimal such ``x`` is then the
    unique minimizer."""
    return bool(np.max(np.abs(problem.d.T @ np.asarray(x, dtype=float)), initial=0.0) <= tol)


@dataclass
class CertificateReport:
    support_inclusion: bool = False
    sign_consistency: bool = False
    same_image: bool = False
    orthant: bool = False
    valid_input: bool = True
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.valid_input and all(
            (self.support_inclusion, self.sign_consistency, self.same_image, self.orthant)
        )

    def to_dict(self):
        return {
            "support_inclusion": self.support_inclusion,
            "sign_consistency": self.sign_consistency,
            "same_image": self.same_image,
            "orthant": self.orthant,
            "pass": self.passed,
            "valid_input": self.valid_input,
            "details": self.details,
        }


def certify_maximal(candidate, vertices, problem, tol=None, pair_tol=None, obj_tol=None):
    """Check that ``candidate`` has maximal D-support among ``vertices``.

    Parameters
    ----------
    candidate : array_like
        Numerically optimal point to certify.
    vertices : sequence of array_like
        Optimal points, e.g. the extreme points of the solution set.
    problem : Problem
    tol : float, optional
        Zero threshold for supports and orthant membership; defaults to
        ``1e-7 (1 + max ||D^T x||_inf)`` over the inputs.
    pair_tol : float, optional
        Tolerance of the pairwise sign and image comparisons; defaults to
        ``1e-6 (1 + max(||Phi x||_inf, ||D^T x||_1))`` over the inputs, which
        absorbs the accuracy of an interior-point candidate.
    obj_tol : float, optional
        Allowed spread of objective values among the inputs; defaults to
        ``1e-6 (1 + |h(candidate)|)``.  A larger spread marks the report as
        invalid input rather than a failed certificate.
    """
    cand = np.asarray(candidate, dtype=float)
    verts = [np.asarray(v, dtype=float) for v in vertices]
    rep = CertificateReport()
    h_cand = objective(problem, cand)
    obj_tol = 1e-6 * (1.0 + abs(h_cand)) if obj_tol is None else obj_tol
    spread = max((abs(objective(problem, v) - h_cand) for v in verts), default=0.0)
    rep.details["objective_spread"] = spread
    if spread > obj_tol:
        rep.valid_input = False
        rep.details["message"] = "inputs do not share the optimal value"
        return rep

    d = problem.d
    pts = [cand] + verts
    if tol is None:
        tol = max(default_tol(d.T @ x) for x in pts)
    if pair_tol is None:
        size = max(
            max(np.max(np.abs(problem.phi @ x), initial=0.0), np.sum(np.abs(d.T @ x)))
            for x in pts
        )
        pair_tol = 1e-6 * (1.0 + size)
    rep.details["tol"] = tol
    rep.details["pair_tol"] = pair_tol
    cand_supp = d_support(cand, d, tol)
    rep.details["candidate_support"] = list(cand_supp.indices)
    missing = sorted(
        {i for v in verts for i in d_support(v, d, tol).indices} - set(cand_supp.indices)
    )
    rep.details["missing_indices"] = missing
    rep.support_inclusion = not missing

    pairs = list(itertools.combinations(pts, 2))
    rep.sign_consistency = all(sign_consistent(a, b, d, pair_tol) for a, b in pairs)
    rep.same_image = all(same_image(a, b, problem, pair_tol) for a, b in pairs)

    gamma = orthant_transform(cand, d, tol)
    ok = True
    for v in verts:
        gv = gamma.apply(d.T @ v)
        tail = (d.T @ v)[gamma.perm[gamma.m:]]
        if np.any(gv[: gamma.m] < -tol) or np.any(np.abs(tail) > tol):
            ok = False
            break
    rep.orthant = ok
    rep.details["m"] = gamma.m
    rep.details["n_vertices"] = len(verts)
    return rep
