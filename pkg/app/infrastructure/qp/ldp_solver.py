"""
Least-Distance QP Solver
Projection of a point onto a polyhedron via NNLS, polished on the active set
"""

import logging
from typing import Optional

import numpy as np
from scipy.optimize import linprog, lsq_linear, minimize, nnls

from app.config import settings
from app.domain.models.oracle import Qp, QpSolution
from app.utils.exceptions import ArgumentError

logger = logging.getLogger(__name__)

_INFEASIBLE_RESIDUAL = 1e-10
_ACTIVE_TOL = 1e-9
_STATIONARITY_LIMIT = 1e-6


def _normalized_rows(A: np.ndarray, b: np.ndarray) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Unit-norm constraint rows; None when a zero row is unsatisfiable"""
    norms = np.linalg.norm(A, axis=1)
    zero = norms == 0.0
    if np.any(b[zero] < 0.0):
        return None
    keep = ~zero
    return A[keep] / norms[keep, None], b[keep] / norms[keep]


def _ldp_system(A: np.ndarray, b: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Lawson-Hanson reduction of min |z - x| s.t. A z <= b

    With u = z - x the problem is min |u| s.t. G u >= h for G = -A, h = A x - b.
    The nonnegative least squares problem on E = [G^T; h^T], f = e_{d+1} has
    residual r = E lam - f with u = -r[:d] / r[d].
    """
    d = x.shape[0]
    E = np.vstack([-A.T, (A @ x - b)[None, :]])
    f = np.zeros(d + 1)
    f[-1] = 1.0
    return E, f


def _point_from_residual(r: np.ndarray, x: np.ndarray) -> Optional[np.ndarray]:
    if np.linalg.norm(r) <= _INFEASIBLE_RESIDUAL or r[-1] >= 0.0:
        return None
    return x - r[:-1] / r[-1]


def _nnls_point(E: np.ndarray, f: np.ndarray, x: np.ndarray) -> Optional[np.ndarray]:
    lam, _ = nnls(E, f, maxiter=50 * max(E.shape))
    return _point_from_residual(E @ lam - f, x)


def _bvls_point(E: np.ndarray, f: np.ndarray, x: np.ndarray) -> Optional[np.ndarray]:
    fit = lsq_linear(E, f, bounds=(0.0, np.inf), method="bvls", tol=1e-14)
    return _point_from_residual(E @ fit.x - f, x)


def _phase_one(A: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """Some point of {z : A z <= b}, or None when the LP proves it empty"""
    d = A.shape[1]
    lp = linprog(np.zeros(d), A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
    if lp.status == 2:
        return None
    if lp.status != 0:
        logger.warning("Phase-one LP ended with status %d (%s)", lp.status, lp.message)
        return None
    return lp.x


def _project_from(A: np.ndarray, b: np.ndarray, x: np.ndarray, start: np.ndarray) -> np.ndarray:
    """SLSQP projection started from a feasible point"""
    fit = minimize(
        lambda z: float((z - x) @ (z - x)),
        start,
        jac=lambda z: 2.0 * (z - x),
        constraints=[{"type": "ineq", "fun": lambda z: b - A @ z, "jac": lambda z: -A}],
        method="SLSQP",
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    return fit.x if np.all(np.isfinite(fit.x)) else start


def _polish(A: np.ndarray, b: np.ndarray, x: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    """Re-solve the KKT system on the active rows; keep z if that does not improve it"""
    active = A @ z - b >= -_ACTIVE_TOL
    if not np.any(active):
        return z
    A_act, b_act = A[active], b[active]
    d, p = x.shape[0], A_act.shape[0]
    kkt = np.block([[2.0 * np.eye(d), A_act.T], [A_act, np.zeros((p, p))]])
    rhs = np.concatenate([2.0 * x, b_act])
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    candidate = sol[:d]
    if np.max(A @ candidate - b) <= max(tol, 0.0) and np.linalg.norm(candidate - x) <= np.linalg.norm(z - x) + 1e-9:
        return candidate
    return z


def _multipliers(A: np.ndarray, b: np.ndarray, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Nonnegative multipliers of the near-active rows fitting 2(z - x) + A^T lam = 0"""
    lam = np.zeros(A.shape[0])
    active = np.flatnonzero(A @ z - b >= -_ACTIVE_TOL)
    if not active.size:
        return lam
    target = -2.0 * (z - x)
    fit, _ = nnls(A[active].T, target, maxiter=50 * max(A.shape))
    if np.linalg.norm(A[active].T @ fit - target) > _INFEASIBLE_RESIDUAL:
        alt = lsq_linear(A[active].T, target, bounds=(0.0, np.inf), method="bvls", tol=1e-14).x
        if np.linalg.norm(A[active].T @ alt - target) < np.linalg.norm(A[active].T @ fit - target):
            fit = alt
    lam[active] = fit
    return lam


def _stationarity(A: np.ndarray, b: np.ndarray, x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, float]:
    lam = _multipliers(A, b, x, z)
    return lam, float(np.max(np.abs(2.0 * (z - x) + A.T @ lam)))


def solve_qp(qp: Qp, tol: Optional[float] = None) -> QpSolution:
    """
    Minimize |z - x|^2 over {z : A z <= b} (box faces included when requested)

    NNLS is tried first, then BVLS on the same reduction, then an SLSQP
    projection from a phase-one point. A point that breaks its constraints is
    a solver miss, never an emptiness verdict: only the phase-one LP declares
    a cell empty. Residuals are reported on the row-normalized system.
    """
    tol = settings.qp_tol if tol is None else tol
    if tol <= 0:
        raise ArgumentError("tol must be positive")

    x = qp.x
    A, b = qp.rows()
    normalized = _normalized_rows(A, b)
    if normalized is None:
        return QpSolution.infeasible()
    A, b = normalized

    if A.shape[0] == 0 or np.all(A @ x - b <= 0.0):
        return QpSolution(feasible=True, z=x.copy(), norm=0.0, multipliers=np.zeros(A.shape[0]))

    limit = max(1e3 * tol, 1e-7)
    E, f = _ldp_system(A, b, x)
    best: Optional[tuple[np.ndarray, np.ndarray, float]] = None

    for method in (_nnls_point, _bvls_point):
        try:
            z = method(E, f, x)
        except (RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
            logger.debug("%s failed: %s", method.__name__, exc)
            continue
        if z is None:
            continue
        z = _polish(A, b, x, z, tol)
        violation = float(np.max(A @ z - b))
        if violation > limit:
            logger.debug("%s point violates its constraints by %.3g", method.__name__, violation)
            continue
        lam, stationarity = _stationarity(A, b, x, z)
        if best is None or stationarity < best[2]:
            best = (z, lam, stationarity)
        if stationarity <= _STATIONARITY_LIMIT:
            break

    if best is None or best[2] > _STATIONARITY_LIMIT:
        start = _phase_one(A, b)
        if start is None:
            if best is None:
                return QpSolution.infeasible()
        else:
            z = _polish(A, b, x, _project_from(A, b, x, start), tol)
            if float(np.max(A @ z - b)) <= limit:
                lam, stationarity = _stationarity(A, b, x, z)
                if best is None or stationarity < best[2]:
                    best = (z, lam, stationarity)
            elif best is None:
                logger.warning("Projection left the cell; returning the phase-one point")
                best = (start, *_stationarity(A, b, x, start))

    z, lam, stationarity = best
    feasibility = max(0.0, float(np.max(A @ z - b)))
    complementarity = float(np.max(np.abs(lam * (A @ z - b)))) if lam.size else 0.0
    return QpSolution(
        feasible=True,
        z=z,
        norm=float(np.linalg.norm(z - x)),
        multipliers=lam,
        stationarity=stationarity,
        feasibility=feasibility,
        complementarity=complementarity,
    )
