"""Small reference instances and a random generator for desk-scale tests."""
import numpy as np

from .model import Problem, validate


def segment_example():
    """``Phi = (1 1)``, ``D = I_2``, ``y = 1``, ``lam = 1/2``.

    The solution set is the segment between ``(1/2, 0)`` and ``(0, 1/2)``.
    """
    return Problem(np.array([[1.0, 1.0]]), np.eye(2), np.array([1.0]), 0.5)


def strictly_convex_example():
    """Soft-thresholding instance with unique solution ``(1, -1)``."""
    return Problem(np.eye(2), np.eye(2), np.array([2.0, -2.0]), 1.0)


def kernel_example():
    """Soft-thresholding instance whose unique solution is ``0``."""
    return Problem(np.eye(2), np.eye(2), np.array([0.1, 0.1]), 1.0)


def random_instance(rng, n_max=6, q_max=4, p_max=8, degenerate=None):
    """Draw a random instance with standard normal entries.

    Degenerate draws duplicate (and positively rescale) columns of ``Phi``
    together with the matching entries of a diagonal dictionary, which
    produces solution sets that are segments or higher-dimensional faces.
    Generic draws use a dense Gaussian dictionary.  ``lam`` is a random
    fraction of ``||Phi^T y||_inf``.  Draws violating restricted
    injectivity are rejected.
    """
    if degenerate is None:
        degenerate = rng.random() < 0.5
    while True:
        q = int(rng.integers(1, q_max + 1))
        if degenerate:
            n = int(rng.integers(2, n_max + 1))
            base = int(rng.integers(1, n))
            g = rng.standard_normal((q, base))
            cols = list(range(base)) + list(rng.integers(0, base, size=n - base))
            scale = np.abs(rng.standard_normal(n)) + 0.5
            scale[:base] = 1.0
            phi = g[:, cols] * scale
            # matching atom weights keep the duplicated directions tied
            d = np.diag(np.abs(rng.standard_normal(base))[cols] * scale + 0.1 * scale)
        else:
            n = int(rng.integers(1, n_max + 1))
            p = int(rng.integers(1, p_max + 1))
            phi = rng.standard_normal((q, n))
            d = rng.standard_normal((n, p))
        y = rng.standard_normal(q)
        lam_max = float(np.max(np.abs(phi.T @ y)))
        if lam_max < 1e-3:
            continue
        lam = float(rng.uniform(0.05, 0.7)) * lam_max
        pb = Problem(phi, d, y, lam)
        if pb.p <= p_max and validate(pb).ok:
            return pb


def random_instances(count, seed=0, **kw):
    """``count`` instances from a fixed-seed generator."""
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(count)]
