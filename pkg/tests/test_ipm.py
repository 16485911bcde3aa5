import math

import numpy as np
import pytest

from analasso import ipm, oracle
from analasso.ipm import (
    Direction,
    SolverConfig,
    affine_mu,
    centering_sigma,
    corrector_rhs,
    initial_point,
    least_squares_start,
    max_step,
    newton_solve,
    solve,
)
from analasso.kkt import PrimalDualPoint, Residuals, residuals
from analasso.model import (
    AugmentedQP,
    Problem,
    RestrictedInjectivityError,
    itilde,
    itilde_adj,
    lift,
    objective,
)


def block_residual(qp, d, pt, rhs, dr):
    """Largest violation of the four linearized equations."""
    r1, r2, r3, r4 = rhs
    e1 = qp.q_mat @ dr.dx - d @ dr.du + r1
    e2 = -dr.ds - itilde_adj(dr.du) + r2
    e3 = pt.s * dr.dz + pt.z * dr.ds + r3
    e4 = d.T @ dr.dx + itilde(dr.dz) + r4
    return max(np.max(np.abs(e)) for e in (e1, e2, e3, e4))


def test_zero_rhs_gives_zero_direction(segment):
    qp = lift(segment)
    pt = initial_point(segment)
    dr = newton_solve(qp, segment.d, pt, (np.zeros(2), np.zeros(4), np.zeros(4), np.zeros(2)))
    for v in (dr.dx, dr.dz, dr.du, dr.ds):
        assert np.all(v == 0)


def test_planted_solution_recovered():
    qp = AugmentedQP(np.array([[2.0]]), np.zeros(1), 1.0, 1, 1, 0.0)
    d = np.array([[1.0]])
    pt = PrimalDualPoint(np.zeros(1), np.ones(2), np.zeros(1), np.ones(2))
    dx, du = np.array([1.0]), np.array([0.0])
    dz = np.array([0.3, 0.1])
    ds = np.array([-0.4, 0.7])
    # right-hand sides that make the planted direction exact
    r1 = -(qp.q_mat @ dx - d @ du)
    r2 = ds + itilde_adj(du)
    r3 = -(pt.s * dz + pt.z * ds)
    r4 = -(d.T @ dx + itilde(dz))
    # the reduced system fixes (dx, du) uniquely; ds and dz follow from them
    dr = newton_solve(qp, d, pt, (r1, r2, r3, r4))
    np.testing.assert_allclose(dr.dx, dx, atol=1e-10)
    np.testing.assert_allclose(dr.du, du, atol=1e-10)
    np.testing.assert_allclose(dr.ds, ds, atol=1e-10)
    np.testing.assert_allclose(dr.dz, dz, atol=1e-10)


def test_newton_first_iterate_segment_example(segment):
    qp = lift(segment)
    pt = initial_point(segment, [0.7, 0.0])
    res = residuals(qp, segment.d, pt)
    rhs = (res.r1, res.r2, res.r3, res.r4)
    dr = newton_solve(qp, segment.d, pt, rhs)
    assert block_residual(qp, segment.d, pt, rhs, dr) <= 1e-8


def test_max_step_examples():
    pt = PrimalDualPoint(np.zeros(1), np.array([1.0, 1.0]), np.zeros(1), np.array([1.0]))
    dr = Direction(np.zeros(1), np.array([-2.0, 1.0]), np.zeros(1), np.array([0.0]))
    assert max_step(pt, dr) == 0.5
    dr = Direction(np.zeros(1), np.array([0.0, 1.0]), np.zeros(1), np.array([2.0]))
    assert math.isinf(max_step(pt, dr))
    pt = PrimalDualPoint(np.zeros(1), np.array([2.0, 4.0]), np.zeros(1), np.array([3.0]))
    dr = Direction(np.zeros(1), np.array([-1.0, -8.0]), np.zeros(1), np.array([-3.0]))
    assert max_step(pt, dr) == 0.5


def test_centering_sigma():
    assert centering_sigma(1e-2, 1e-3) == pytest.approx(1e-3, rel=1e-12)
    assert centering_sigma(0.3, 0.3) == 1.0
    assert centering_sigma(0.3, 0.0) == 0.0
    assert centering_sigma(0.0, 0.1) == 0.0
    assert centering_sigma(0.1, 0.5) == 1.0


def test_affine_mu():
    pt = PrimalDualPoint(np.zeros(1), np.ones(2), np.zeros(1), np.ones(2))
    zero = Direction(np.zeros(1), np.zeros(2), np.zeros(1), np.zeros(2))
    assert affine_mu(pt, zero, 0.7) == 1.0
    full = Direction(np.zeros(1), -np.ones(2), np.zeros(1), -np.ones(2))
    assert affine_mu(pt, full, 1.0) == 0.0


def test_affine_mu_decreases_first_iteration(segment):
    qp = lift(segment)
    pt = initial_point(segment, [0.7, 0.0])
    res = residuals(qp, segment.d, pt)
    da = newton_solve(qp, segment.d, pt, (res.r1, res.r2, res.r3, res.r4))
    ta = max_step(pt, da)
    mu_a = affine_mu(pt, da, 1.0 if math.isinf(ta) else ta)
    assert 0 <= mu_a <= res.mu


def test_corrector_rhs():
    def res(p):
        return Residuals(np.zeros(2), np.zeros(2 * p), np.zeros(2 * p), np.zeros(p), 0.0)

    zero = Direction(np.zeros(2), np.zeros(2), np.zeros(1), np.zeros(2))
    out = corrector_rhs(res(1), zero, 0.0, 0.0)
    assert all(np.all(v == 0) for v in out)

    da = Direction(np.zeros(2), np.array([1.0, -1.0]), np.zeros(1), np.array([2.0, 2.0]))
    out = corrector_rhs(res(1), da, 0.0, 1.0)
    np.testing.assert_array_equal(out[2], [-2.0, 2.0])
    assert not np.any(out[0]) and not np.any(out[1]) and not np.any(out[3])

    out = corrector_rhs(res(1), zero, 1.0, 0.5)
    np.testing.assert_array_equal(out[2], [0.5, 0.5])


def test_initial_point_is_interior_and_coupled(rng):
    for _ in range(5):
        pb = Problem(rng.standard_normal((2, 4)), rng.standard_normal((4, 6)), rng.standard_normal(2), 0.4)
        pt = initial_point(pb)
        assert pt.is_interior()
        np.testing.assert_allclose(pb.d.T @ pt.x + itilde(pt.z), 0, atol=1e-12)
        np.testing.assert_allclose(pt.s, 0.4)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(eta=1.0)
    with pytest.raises(ValueError):
        SolverConfig(eps=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)


def test_solver_refuses_non_injective():
    pb = Problem(np.zeros((1, 2)), np.array([[1.0], [-1.0]]), [0.0], 1.0)
    with pytest.raises(RestrictedInjectivityError):
        solve(pb)


def test_solver_rejects_non_interior_start(segment):
    pt = PrimalDualPoint(np.zeros(2), np.zeros(4), np.zeros(2), np.ones(4))
    with pytest.raises(ValueError):
        solve(segment, start=pt)


@pytest.mark.parametrize("start", ["fixed", "lstsq", "ridge"])
def test_segment_example_limit(segment, start):
    if start == "fixed":
        st = np.array([0.7, 0.0])
    elif start == "lstsq":
        st = least_squares_start(segment)
    else:
        st = None
    pt, trace = solve(segment, start=st)
    assert trace.status == ipm.CONVERGED
    np.testing.assert_allclose(pt.x, [0.25, 0.25], atol=1e-6)


def test_strictly_convex_instance(strict):
    pt, trace = solve(strict)
    assert trace.status == ipm.CONVERGED
    np.testing.assert_allclose(pt.x, [1.0, -1.0], atol=1e-6)
    value, _ = oracle.optimal_value_by_sign_enumeration(strict)
    assert objective(strict, pt.x) <= value + 1e-6 * (1 + abs(value))


def test_iteration_invariants(segment, rng):
    """Interior preservation and exact linear algebra at every iteration."""
    from analasso.instances import random_instances
    problems = [segment] + random_instances(6, seed=7)
    for pb in problems:
        qp = lift(pb)
        pt = initial_point(pb)
        cfg = SolverConfig()
        for _ in range(60):
            res = residuals(qp, pb.d, pt)
            if max(res.max_norm(), res.mu) <= cfg.eps:
                break
            rhs_a = (res.r1, res.r2, res.r3, res.r4)
            da = newton_solve(qp, pb.d, pt, rhs_a)
            scale = 1 + max(np.max(np.abs(r)) for r in rhs_a)
            assert block_residual(qp, pb.d, pt, rhs_a, da) <= 1e-8 * scale
            direction, _ = ipm._predictor_corrector(qp, pb.d, pt, res, cfg)
            rc = corrector_rhs(res, da, 0.3, res.mu)
            dc = newton_solve(qp, pb.d, pt, tuple(-v for v in rc))
            scale = 1 + max(np.max(np.abs(r)) for r in rc)
            assert block_residual(qp, pb.d, pt, tuple(-v for v in rc), dc) <= 1e-8 * scale
            step = min(cfg.eta * max_step(pt, direction), 1.0)
            pt = PrimalDualPoint(pt.x + step * direction.dx, pt.z + step * direction.dz,
                                 pt.u + step * direction.du, pt.s + step * direction.ds)
            assert pt.is_interior()


def test_trace_records_every_iteration(segment):
    pt, trace = solve(segment, start=np.array([0.7, 0.0]))
    assert len(trace.records) == trace.iterations + 1
    assert trace.records[0].iter == 0 and math.isnan(trace.records[0].step)
    for rec in trace.records:
        assert np.all(rec.z > 0) and np.all(rec.s > 0)
    last = trace.records[-1]
    assert max(last.res_norms) <= 1e-8 and last.mu <= 1e-8
    assert trace.path().shape == (trace.iterations + 1, 2)


def test_max_iters_status(segment):
    pt, trace = solve(segment, SolverConfig(max_iters=2), start=np.array([0.7, 0.0]))
    assert trace.status == ipm.MAX_ITERS
    assert trace.iterations == 2
    assert pt.is_interior()


def test_loose_tolerance_converges_faster(segment):
    _, tight = solve(segment)
    pt, loose = solve(segment, SolverConfig(eps=1e-2))
    assert loose.status == ipm.CONVERGED
    assert loose.iterations < tight.iterations
    assert max(loose.records[-1].res_norms) <= 1e-2


def test_plain_mehrotra_misses_center(segment):
    """Without centering steps the limit is optimal but off-center."""
    pt, trace = solve(segment, SolverConfig(center_tol=None), start=np.array([0.7, 0.0]))
    assert trace.status == ipm.CONVERGED
    assert objective(segment, pt.x) == pytest.approx(0.375, abs=1e-7)
    assert np.max(np.abs(pt.x - 0.25)) > 1e-3


def test_numerical_failure_reported(monkeypatch, segment):
    def boom(*a, **k):
        raise ipm.NumericalFailure("forced")

    monkeypatch.setattr(ipm, "newton_solve", boom)
    pt, trace = solve(segment)
    assert trace.status == ipm.NUMERICAL_FAILURE
    assert trace.iterations == 0
