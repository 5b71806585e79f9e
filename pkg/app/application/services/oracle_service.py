"""
Oracle Service
Exact minimum-norm attacks on plain kNN and a 2D grid verifier
"""

import itertools
import logging
import math
import time
from typing import Iterator, Optional

import numpy as np

from app.config import settings
from app.domain.models.dataset import Dataset
from app.domain.models.neighbor_index import NeighborIndex
from app.domain.models.oracle import OracleResult, Qp
from app.infrastructure.qp.ldp_solver import solve_qp
from app.utils.exceptions import ArgumentError, ScaleError
from app.utils.validators import as_vector, require_count

logger = logging.getLogger(__name__)

_PUSH_ATTEMPTS = 4
_GRID_BLOCK = 65536
_REFINE_LEVELS = 3
_REFINE_HALF_WIDTH = 5


def _halfspace_gaps(features: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    gaps[s, t]: distance from x to the halfspace of points at least as close to s as to t

    Zero when x already lies on the s side.
    """
    sq = np.sum(features * features, axis=1)
    v = 2.0 * (features @ x) - sq
    violation = v[None, :] - v[:, None]
    gram = features @ features.T
    norms = 2.0 * np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        gaps = np.where(norms > 0.0, violation / norms, 0.0)
    return np.maximum(gaps, 0.0)


def _closer_rows(features: np.ndarray, near: np.ndarray, far: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows of 2(x_t - x_s) . z <= |x_t|^2 - |x_s|^2 for every s in near, t in far"""
    s = features[near]
    t = features[far]
    A = 2.0 * (t[None, :, :] - s[:, None, :])
    b = np.sum(t * t, axis=1)[None, :] - np.sum(s * s, axis=1)[:, None]
    return A.reshape(-1, features.shape[1]), b.reshape(-1)


class OracleService:
    """Exact attacks by enumerating order-k neighbor cells"""

    def __init__(self, max_cells: Optional[int] = None, tol: Optional[float] = None, push: Optional[float] = None):
        self.max_cells = settings.oracle_max_cells if max_cells is None else max_cells
        self.tol = settings.qp_tol if tol is None else tol
        self.push = settings.oracle_push if push is None else push

    def _cells(self, labels: np.ndarray, n: int, k: int, y: int) -> Iterator[tuple[tuple[int, ...], Optional[int]]]:
        """
        Wrong-majority k-subsets

        Yields (subset, None) for cells whose majority excludes y outright, and
        (subset, leader) sub-cells when y ties with wrong classes: leader is a
        member of a wrong tied class that must be the nearest of all tied members.
        """
        num_classes = int(labels.max()) + 1 if labels.size else 0
        for subset in itertools.combinations(range(n), k):
            counts = np.bincount(labels[list(subset)], minlength=max(num_classes, y + 1))
            tied = np.flatnonzero(counts == counts.max())
            if y not in tied:
                yield subset, None
                continue
            if tied.size == 1:
                continue
            for s in subset:
                if labels[s] != y and labels[s] in tied:
                    yield subset, s

    def _cell_qp(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        x: np.ndarray,
        subset: tuple[int, ...],
        leader: Optional[int],
        box: bool,
    ) -> Qp:
        inside = np.array(subset, dtype=np.int64)
        outside = np.setdiff1d(np.arange(features.shape[0]), inside)
        A, b = _closer_rows(features, inside, outside)
        if leader is not None:
            counts = np.bincount(labels[inside])
            tied_members = inside[counts[labels[inside]] == counts.max()]
            others = tied_members[tied_members != leader]
            A2, b2 = _closer_rows(features, np.array([leader]), others)
            A, b = np.vstack([A, A2]), np.concatenate([b, b2])
        return Qp(x=x, A=A, b=b, box=box)

    def _certify(
        self,
        index: NeighborIndex,
        qp: Qp,
        z: np.ndarray,
        x: np.ndarray,
        y: int,
        k: int,
    ) -> Optional[tuple[np.ndarray, int]]:
        """A point next to z that the kNN really misclassifies, with its prediction"""
        direction = z - x
        length = np.linalg.norm(direction)
        push = self.push
        for _ in range(_PUSH_ATTEMPTS):
            candidate = z + push * direction / length if length > 0 else z.copy()
            if qp.box:
                candidate = np.clip(candidate, 0.0, 1.0)
            predicted = index.classify(candidate, k).predicted
            if predicted != y:
                return candidate, predicted
            push *= 10.0

        # shrink the cell so its projection lands strictly inside
        norms = np.linalg.norm(qp.A, axis=1)
        tightened = solve_qp(Qp(x=x, A=qp.A, b=qp.b - self.push * norms, box=qp.box), self.tol)
        if tightened.feasible:
            predicted = index.classify(tightened.z, k).predicted
            if predicted != y:
                return tightened.z, predicted
        return None

    def exact_min_attack(self, ds: Dataset, x: np.ndarray, y: int, k: int, box: bool = False) -> OracleResult:
        """
        Smallest perturbation that moves x into a wrong-majority neighbor cell

        Cells are visited in order of a lower bound (the farthest single
        bisector halfspace) and the scan stops once that bound reaches the best
        norm found. Each winner is certified by classifying a point pushed just
        past the cell boundary.
        """
        started = time.monotonic()
        x = as_vector(x, ds.dim, "x")
        require_count(k, len(ds))
        if not 0 <= y < ds.num_classes:
            raise ArgumentError(f"label {y} is outside [0, {ds.num_classes})")

        cell_count = math.comb(len(ds), k)
        if cell_count > self.max_cells:
            raise ScaleError(
                f"{cell_count} candidate cells exceed the limit of {self.max_cells}; reduce the training set or k"
            )

        index = NeighborIndex.from_dataset(ds)
        vote = index.classify(x, k)
        if vote.predicted != y:
            return OracleResult(
                success=True, norm=0.0, z=x.copy(), adv=x.copy(),
                subset=tuple(int(i) for i in index.neighbor_indices(x, k)),
                predicted=vote.predicted, wall_time=time.monotonic() - started,
            )

        features, labels = ds.features, ds.labels
        gaps = _halfspace_gaps(features, x)
        all_idx = np.arange(len(ds))
        candidates = []
        for subset, leader in self._cells(labels, len(ds), k, y):
            inside = np.array(subset)
            outside = np.setdiff1d(all_idx, inside)
            bound = float(gaps[np.ix_(inside, outside)].max()) if outside.size else 0.0
            candidates.append((bound, subset, leader))
        candidates.sort(key=lambda item: item[0])

        result = OracleResult(success=False)
        best = math.inf
        for position, (bound, subset, leader) in enumerate(candidates):
            if bound >= best:
                result.cells_pruned = len(candidates) - position
                break
            qp = self._cell_qp(features, labels, x, subset, leader, box)
            solution = solve_qp(qp, self.tol)
            result.cells_solved += 1
            if not solution.feasible:
                result.infeasible_cells += 1
                continue
            result.residuals.append(solution.kkt_residual)
            result.max_kkt_residual = max(result.max_kkt_residual, solution.kkt_residual)
            if solution.norm >= best:
                continue
            certified = self._certify(index, qp, solution.z, x, y, k)
            if certified is None:
                logger.debug("Cell %s optimum could not be certified; skipped", subset)
                continue
            best = solution.norm
            result.success = True
            result.norm = solution.norm
            result.z = solution.z
            result.adv, result.predicted = certified
            result.subset = tuple(int(i) for i in subset)

        result.wall_time = time.monotonic() - started
        logger.debug(
            "Oracle solved %d of %d cells (%d empty, %d pruned)",
            result.cells_solved, len(candidates), result.infeasible_cells, result.cells_pruned,
        )
        return result

    @staticmethod
    def _grid_minimum(
        index: NeighborIndex, labels: np.ndarray, num_classes: int, grid: np.ndarray, x: np.ndarray, y: int, k: int
    ) -> tuple[float, Optional[np.ndarray]]:
        """Nearest grid point the kNN classifies away from y, with its distance"""
        best, best_point = math.inf, None
        for start in range(0, grid.shape[0], _GRID_BLOCK):
            block = grid[start:start + _GRID_BLOCK]
            nearest = labels[index.neighbor_indices_batch(block, k)]
            counts = np.stack([np.count_nonzero(nearest == c, axis=1) for c in range(num_classes)], axis=1)
            rows = np.arange(block.shape[0])[:, None]
            # nearest neighbor whose class reaches the top count decides ties
            is_top = counts[rows, nearest] == counts.max(axis=1, keepdims=True)
            predicted = nearest[np.arange(block.shape[0]), np.argmax(is_top, axis=1)]
            wrong = np.flatnonzero(predicted != y)
            if wrong.size:
                norms = np.linalg.norm(block[wrong] - x, axis=1)
                i = int(np.argmin(norms))
                if norms[i] < best:
                    best, best_point = float(norms[i]), block[wrong[i]]
        return best, best_point

    @staticmethod
    def grid_verify_2d(
        ds: Dataset, x: np.ndarray, y: int, k: int, resolution: float, refine_levels: int = _REFINE_LEVELS
    ) -> Optional[float]:
        """
        Brute-force minimum over a regular grid on [0, 1]^2

        Returns the smallest |g - x| over grid points g the kNN classifies away
        from y, 0 when x itself is misclassified, or None when no grid point is.
        After the coarse scan, each refinement level rescans a window of
        five steps either side of the best hit at a tenth of the spacing,
        so thin wedges at cell corners are followed toward their tip. Every
        reported value is attained by a misclassified point, so it never
        undercuts the exact minimum.
        """
        if ds.dim != 2:
            raise ArgumentError(f"grid verification needs 2D data, got dimension {ds.dim}")
        if not 0.0 < resolution <= 1.0:
            raise ArgumentError("resolution must lie in (0, 1]")
        if refine_levels < 0:
            raise ArgumentError("refine_levels must be non-negative")
        x = as_vector(x, 2, "x")
        index = NeighborIndex.from_dataset(ds)
        if index.classify(x, k).predicted != y:
            return 0.0

        axis = np.linspace(0.0, 1.0, int(round(1.0 / resolution)) + 1)
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
        best, point = OracleService._grid_minimum(index, ds.labels, ds.num_classes, grid, x, y, k)
        if point is None:
            return None

        step = resolution
        for _ in range(refine_levels):
            half = _REFINE_HALF_WIDTH * step
            step /= 10.0
            axes = [
                np.clip(np.linspace(c - half, c + half, 2 * int(round(half / step)) + 1), 0.0, 1.0)
                for c in point
            ]
            gx, gy = np.meshgrid(*axes, indexing="ij")
            window = np.unique(np.stack([gx.ravel(), gy.ravel()], axis=1), axis=0)
            found, found_point = OracleService._grid_minimum(index, ds.labels, ds.num_classes, window, x, y, k)
            if found < best:
                best, point = found, found_point
        return best
