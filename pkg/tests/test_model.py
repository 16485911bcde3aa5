import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from analasso.model import (
    Problem,
    ProblemError,
    RestrictedInjectivityError,
    check_problem,
    itilde,
    itilde_adj,
    itilde_matrix,
    lift,
    objective,
    split_variable,
    validate,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_validate_segment_example(segment):
    rep = validate(segment)
    assert rep.ok
    assert rep.rank == 2


def test_validate_detects_common_kernel():
    # (1, 1) lies in Ker Phi and in Ker D^T
    pb = Problem(np.zeros((1, 2)), np.array([[1.0], [-1.0]]), [0.0], 1.0)
    rep = validate(pb)
    assert not rep.checks["restricted_injectivity"]
    assert rep.rank == 1
    assert "Ker D* ∩ Ker Φ = {0}" in rep.message
    with pytest.raises(RestrictedInjectivityError):
        check_problem(pb)


@pytest.mark.parametrize("seed", range(5))
def test_identity_dictionary_always_injective(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    phi = rng.standard_normal((int(rng.integers(1, 4)), n)) * rng.integers(0, 2)
    pb = Problem(phi, np.eye(n), np.zeros(phi.shape[0]), 1.0)
    assert validate(pb).ok


def test_validate_structural_errors():
    pb = Problem(np.ones((2, 3)), np.eye(2), [1.0, 1.0], 1.0)
    rep = validate(pb)
    assert not rep.checks["dimensions"]
    with pytest.raises(ProblemError) as info:
        check_problem(pb)
    assert not isinstance(info.value, RestrictedInjectivityError)

    assert not validate(Problem(np.eye(2), np.eye(2), [1.0], 1.0)).checks["dimensions"]
    assert not validate(Problem(np.eye(2), np.eye(2), [1.0, 1.0], 0.0)).checks["lambda_positive"]
    assert not validate(Problem(np.eye(2), np.eye(2), [1.0, np.nan], 1.0)).checks["finite"]


def test_objective_segment_values(segment):
    # 1/2 (1 - 1/2)^2 + 1/2 * 1/2 = 3/8 at both points
    assert objective(segment, np.array([0.5, 0.0])) == pytest.approx(0.375, abs=1e-15)
    assert objective(segment, np.array([0.25, 0.25])) == pytest.approx(0.375, abs=1e-15)
    assert objective(segment, np.zeros(2)) == 0.5


def test_objective_rejects_bad_shape(segment):
    with pytest.raises(ProblemError):
        objective(segment, np.zeros(3))


def test_lift_values(segment):
    qp = lift(segment)
    np.testing.assert_array_equal(qp.q_mat, [[1.0, 1.0], [1.0, 1.0]])
    np.testing.assert_array_equal(qp.c, [1.0, 1.0])

    qp = lift(Problem(np.eye(2), np.eye(2), [3.0, -7.0], 1.0))
    np.testing.assert_array_equal(qp.q_mat, np.eye(2))
    np.testing.assert_array_equal(qp.c, [3.0, -7.0])

    qp = lift(Problem([[2.0]], [[1.0]], [3.0], 1.0))
    assert qp.q_mat[0, 0] == 4.0 and qp.c[0] == 6.0
    assert qp.half_norm_y_sq == 4.5


def test_lift_repeatable(rng):
    pb = Problem(rng.standard_normal((3, 4)), rng.standard_normal((4, 5)), rng.standard_normal(3), 0.3)
    a, b = lift(pb), lift(pb)
    assert np.array_equal(a.q_mat, b.q_mat) and np.array_equal(a.c, b.c)
    assert np.array_equal(a.q_mat, a.q_mat.T)
    assert np.min(np.linalg.eigvalsh(a.q_mat)) >= -1e-10 * np.linalg.norm(a.q_mat)


def test_split_variable_examples():
    np.testing.assert_array_equal(split_variable([3.0, -2.0]), [0.0, 2.0, 3.0, 0.0])
    np.testing.assert_array_equal(split_variable([0.0, 0.0]), np.zeros(4))
    z = split_variable([0.25, 0.25])
    np.testing.assert_array_equal(z, [0.0, 0.0, 0.25, 0.25])
    assert z.sum() == 0.5


def test_itilde_helpers_match_matrix(rng):
    z, u = rng.standard_normal(6), rng.standard_normal(3)
    m = itilde_matrix(3)
    np.testing.assert_allclose(itilde(z), m @ z, atol=0)
    np.testing.assert_allclose(itilde_adj(u), m.T @ u, atol=0)


@settings(max_examples=60, deadline=None)
@given(arrays(float, (3, 4), elements=finite), arrays(float, (4, 5), elements=finite),
       arrays(float, 3, elements=finite), arrays(float, 4, elements=finite),
       st.floats(0.01, 5))
def test_lifted_objective_matches(phi, d, y, x, lam):
    pb = Problem(phi, d, y, lam)
    qp = lift(pb)
    z = split_variable(d.T @ x)
    h = objective(pb, x)
    assert qp.f(x, z) + qp.half_norm_y_sq == pytest.approx(h, rel=1e-10, abs=1e-10)
    # coupling constraint D^T x + Itilde z = 0
    assert np.max(np.abs(d.T @ x + itilde(z)), initial=0) <= 1e-12 * (1 + np.max(np.abs(d.T @ x)))
