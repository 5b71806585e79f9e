"""
Unit Tests for the least-distance QP solver
"""

from unittest.mock import patch

import numpy as np
import pytest

from app.domain.models.oracle import Qp
from app.infrastructure.qp.ldp_solver import solve_qp
from app.utils.exceptions import ArgumentError


def test_no_constraints():
    """Test the unconstrained projection is x itself"""
    solution = solve_qp(Qp(x=np.array([0.3, 0.4]), A=np.empty((0, 2)), b=np.empty(0)))

    assert solution.feasible
    assert solution.norm == 0.0
    np.testing.assert_array_equal(solution.z, [0.3, 0.4])


def test_single_violated_halfspace():
    """Test projection onto z1 >= 1 from the origin"""
    # Act
    solution = solve_qp(Qp(x=np.zeros(2), A=np.array([[-1.0, 0.0]]), b=np.array([-1.0])))

    # Assert
    assert solution.feasible
    np.testing.assert_allclose(solution.z, [1.0, 0.0], atol=1e-12)
    assert solution.norm == pytest.approx(1.0)
    assert solution.kkt_residual <= 1e-8


def test_corner():
    """Test two active constraints meeting at (1, 1)"""
    # Act
    solution = solve_qp(Qp(x=np.zeros(2), A=np.array([[-1.0, 0.0], [0.0, -1.0]]), b=np.array([-1.0, -1.0])))

    # Assert
    np.testing.assert_allclose(solution.z, [1.0, 1.0], atol=1e-12)
    assert solution.norm == pytest.approx(np.sqrt(2.0))
    np.testing.assert_allclose(solution.multipliers, [2.0, 2.0], atol=1e-9)


def test_satisfied_constraints_leave_x():
    """Test an interior point"""
    solution = solve_qp(Qp(x=np.array([0.2]), A=np.array([[1.0]]), b=np.array([0.5])))

    assert solution.norm == 0.0


def test_empty_polyhedron():
    """Test z1 <= 0 and z1 >= 1"""
    solution = solve_qp(Qp(x=np.zeros(2), A=np.array([[1.0, 0.0], [-1.0, 0.0]]), b=np.array([0.0, -1.0])))

    assert not solution.feasible
    assert solution.z is None


def test_unsatisfiable_zero_row():
    """Test 0 . z <= -1"""
    solution = solve_qp(Qp(x=np.zeros(2), A=np.zeros((1, 2)), b=np.array([-1.0])))

    assert not solution.feasible


def test_box_faces():
    """Test the box constraint clips a point outside the unit square"""
    # Act
    solution = solve_qp(Qp(x=np.array([1.5, 0.5]), A=np.empty((0, 2)), b=np.empty(0), box=True))

    # Assert
    np.testing.assert_allclose(solution.z, [1.0, 0.5], atol=1e-12)
    assert solution.norm == pytest.approx(0.5)


def test_halfspace_with_box():
    """Test a halfspace projection pushed back into the box"""
    # z1 + z2 >= 1.8 from (0.9, 0): unconstrained answer (1.35, 0.45) leaves the box
    solution = solve_qp(
        Qp(x=np.array([0.9, 0.0]), A=np.array([[-1.0, -1.0]]), b=np.array([-1.8]), box=True)
    )

    np.testing.assert_allclose(solution.z, [1.0, 0.8], atol=1e-9)


def test_random_polyhedra_kkt(rng):
    """Test KKT residuals on random feasible polyhedra"""
    for _ in range(50):
        # Arrange
        d = int(rng.integers(2, 6))
        rows = int(rng.integers(1, 12))
        A = rng.normal(size=(rows, d))
        inside = rng.normal(size=d)
        b = A @ inside + rng.uniform(0.0, 0.5, size=rows)
        x = rng.normal(size=d) * 3.0

        # Act
        solution = solve_qp(Qp(x=x, A=A, b=b))

        # Assert
        assert solution.feasible
        assert solution.kkt_residual <= 1e-8
        assert solution.norm <= np.linalg.norm(inside - x) + 1e-9


def test_qp_shape_mismatch():
    """Test A and b row counts"""
    with pytest.raises(ArgumentError):
        Qp(x=np.zeros(2), A=np.zeros((2, 2)), b=np.zeros(3))


def test_qp_non_finite():
    """Test NaN data"""
    with pytest.raises(ArgumentError):
        Qp(x=np.array([np.nan, 0.0]), A=np.empty((0, 2)), b=np.empty(0))


def test_invalid_tolerance():
    """Test tol <= 0"""
    with pytest.raises(ArgumentError):
        solve_qp(Qp(x=np.zeros(1), A=np.empty((0, 1)), b=np.empty(0)), tol=0.0)


def _voronoi_cell(points: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows of 2(p_t - p_s) . z <= |p_t|^2 - |p_s|^2 for every t != s"""
    others = np.delete(points, s, axis=0)
    A = 2.0 * (others - points[s])
    b = np.sum(others * others, axis=1) - points[s] @ points[s]
    return A, b


def test_voronoi_cells_are_never_empty(rng):
    """Test every k=1 cell containing its own generator is solved as non-empty"""
    for _ in range(10):
        # Arrange
        points = rng.uniform(size=(30, 2))
        x = rng.uniform(size=2)

        for s in range(points.shape[0]):
            A, b = _voronoi_cell(points, s)

            # Act
            solution = solve_qp(Qp(x=x, A=A, b=b, box=True))

            # Assert
            assert solution.feasible
            assert solution.norm <= np.linalg.norm(points[s] - x) + 1e-9
            assert solution.kkt_residual <= 1e-8


def _missing_nnls(E, f, maxiter=None):
    return np.zeros(E.shape[1]), 0.0


def test_nnls_miss_falls_back_to_bvls():
    """Test a constraint-violating NNLS answer is re-solved instead of reported empty"""
    qp = Qp(x=np.zeros(2), A=np.array([[-1.0, 0.0], [0.0, -1.0]]), b=np.array([-1.0, -1.0]))

    with patch("app.infrastructure.qp.ldp_solver.nnls", side_effect=_missing_nnls):
        solution = solve_qp(qp)

    assert solution.feasible
    np.testing.assert_allclose(solution.z, [1.0, 1.0], atol=1e-9)
    assert solution.kkt_residual <= 1e-8


def test_least_squares_misses_fall_back_to_projection():
    """Test the phase-one start and SLSQP projection when both NNLS and BVLS miss"""
    # Arrange
    qp = Qp(x=np.array([0.9, 0.0]), A=np.array([[-1.0, -1.0]]), b=np.array([-1.8]), box=True)

    # Act
    with patch("app.infrastructure.qp.ldp_solver.nnls", side_effect=_missing_nnls), patch(
        "app.infrastructure.qp.ldp_solver.lsq_linear",
        side_effect=lambda E, f, **kwargs: type("Fit", (), {"x": np.zeros(E.shape[1])})(),
    ):
        solution = solve_qp(qp)

    # Assert
    assert solution.feasible
    np.testing.assert_allclose(solution.z, [1.0, 0.8], atol=1e-6)


def test_empty_verdict_needs_the_lp():
    """Test an empty polyhedron stays empty when NNLS returns garbage"""
    qp = Qp(x=np.zeros(2), A=np.array([[1.0, 0.0], [-1.0, 0.0]]), b=np.array([0.0, -1.0]))

    with patch("app.infrastructure.qp.ldp_solver.nnls", side_effect=_missing_nnls):
        solution = solve_qp(qp)

    assert not solution.feasible
