"""KKT residuals, complementarity and duality gap of the lifted problem."""
from dataclasses import dataclass

import numpy as np

from .model import itilde, itilde_adj


@dataclass(frozen=True)
class PrimalDualPoint:
    """Iterate ``(x, z, u, s)``; ``z`` and ``s`` have length ``2p``."""

    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    s: np.ndarray

    def is_interior(self):
        return bool(np.min(self.z, initial=np.inf) > 0 and np.min(self.s, initial=np.inf) > 0)

    def is_finite(self):
        return all(np.all(np.isfinite(v)) for v in (self.x, self.z, self.u, self.s))


@dataclass(frozen=True)
class Residuals:
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray
    mu: float

    def norms(self):
        """Euclidean norm of each block, in order."""
        return tuple(float(np.linalg.norm(r)) for r in (self.r1, self.r2, self.r3, self.r4))

    def max_norm(self):
        return max(self.norms())


def complementarity(z, s):
    """Average pairwise product ``<z, s> / 2p`` (zero when ``p == 0``)."""
    if z.size == 0:
        return 0.0
    return float(z @ s) / z.size


def residuals(qp, d, pt):
    """Residuals of the perturbed KKT system at ``pt``.

    ``r1 = Qx - c - D u``, ``r2 = lam e - s - Itilde^T u``, ``r3 = Z s``
    and ``r4 = D^T x + Itilde z``.
    """
    r1 = qp.q_mat @ pt.x - qp.c - d @ pt.u
    r2 = qp.lam - pt.s - itilde_adj(pt.u)
    r3 = pt.z * pt.s
    r4 = d.T @ pt.x + itilde(pt.z)
    return Residuals(r1, r2, r3, r4, complementarity(pt.z, pt.s))


def duality_gap(qp, d, pt):
    """Primal minus dual objective, ``f(x, z) + 1/2 <Qx, x>``.

    On points with ``r1 = r2 = r4 = 0`` this equals ``<z, s>``.
    """
    return qp.f(pt.x, pt.z) + 0.5 * float(pt.x @ qp.q_mat @ pt.x)
