"""
Neighbor Index
Exact distance-ordered neighbor queries over a reference set
"""

import enum
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from app.domain.models.dataset import Dataset
from app.domain.models.vote import Neighbor, Vote, majority
from app.utils.exceptions import ArgumentError
from app.utils.validators import as_vector, require_count

# Upper bound on the elements of one (queries, points, dim) difference block
_BLOCK_ELEMENTS = 4_000_000


class Metric(str, enum.Enum):
    """Distance metric"""
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


class SearchBackend(str, enum.Enum):
    """Neighbor search strategy"""
    LINEAR = "linear"
    KDTREE = "kdtree"


class NeighborIndex:
    """
    Immutable exact neighbor index

    Neighbors are ordered by non-decreasing distance; equal distances are
    ordered by ascending reference index.
    """

    def __init__(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        num_classes: int,
        metric: Metric = Metric.EUCLIDEAN,
        backend: SearchBackend = SearchBackend.LINEAR,
    ):
        features = np.array(features, dtype=np.float64, copy=True)
        labels = np.array(labels, dtype=np.int64, copy=True)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise ArgumentError("features must be (n, d) and labels (n,)")

        self.metric = Metric(metric)
        self.backend = SearchBackend(backend)
        self.num_classes = num_classes
        self.features = features
        self.labels = labels
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

        self._norms: Optional[np.ndarray] = None
        self._tree: Optional[cKDTree] = None

        if self.metric == Metric.COSINE:
            norms = np.linalg.norm(features, axis=1)
            if np.any(norms == 0.0):
                raise ArgumentError("cosine distance is undefined for zero reference vectors")
            self._norms = norms
            if self.backend == SearchBackend.KDTREE:
                raise ArgumentError("the kdtree backend supports the euclidean metric only")
        elif self.backend == SearchBackend.KDTREE and len(features):
            self._tree = cKDTree(features)

    @classmethod
    def from_dataset(
        cls,
        ds: Dataset,
        metric: Metric = Metric.EUCLIDEAN,
        backend: SearchBackend = SearchBackend.LINEAR,
    ) -> "NeighborIndex":
        return cls(ds.features, ds.labels, ds.num_classes, metric=metric, backend=backend)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    # ------------------------------------------------------------------
    # Distances
    # ------------------------------------------------------------------

    def distances(self, x: np.ndarray) -> np.ndarray:
        """Distance from x to every reference point"""
        x = as_vector(x, self.dim)
        if self.metric == Metric.EUCLIDEAN:
            return np.sqrt(np.sum((self.features - x) ** 2, axis=1))

        x_norm = np.linalg.norm(x)
        if x_norm == 0.0:
            raise ArgumentError("cosine distance is undefined for a zero query vector")
        cos = (self.features @ x) / (self._norms * x_norm)
        return np.maximum(1.0 - cos, 0.0)

    def distances_batch(self, queries: np.ndarray) -> np.ndarray:
        """Distance matrix (queries x reference points)"""
        queries = np.asarray(queries, dtype=np.float64)
        if queries.ndim != 2 or queries.shape[1] != self.dim:
            raise ArgumentError(f"queries must have shape (q, {self.dim})")

        if self.metric == Metric.COSINE:
            q_norms = np.linalg.norm(queries, axis=1)
            if np.any(q_norms == 0.0):
                raise ArgumentError("cosine distance is undefined for a zero query vector")
            cos = (queries @ self.features.T) / np.outer(q_norms, self._norms)
            return np.maximum(1.0 - cos, 0.0)

        out = np.empty((queries.shape[0], self.n))
        step = max(1, _BLOCK_ELEMENTS // max(1, self.n * self.dim))
        for start in range(0, queries.shape[0], step):
            block = queries[start:start + step]
            diff = block[:, None, :] - self.features[None, :, :]
            out[start:start + step] = np.sqrt(np.sum(diff * diff, axis=2))
        return out

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def _order(self, x: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        require_count(k, self.n)
        if self._tree is not None:
            return self._order_kdtree(as_vector(x, self.dim), k)
        dists = self.distances(x)
        order = np.argsort(dists, kind="stable")[:k]
        return order, dists[order]

    def _order_kdtree(self, x: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        tree_dists, _ = self._tree.query(x, k=k)
        radius = float(np.max(np.atleast_1d(tree_dists)))
        candidates = np.array(
            sorted(self._tree.query_ball_point(x, radius * (1.0 + 1e-9) + 1e-12)),
            dtype=np.int64,
        )
        exact = np.sqrt(np.sum((self.features[candidates] - x) ** 2, axis=1))
        order = np.lexsort((candidates, exact))[:k]
        return candidates[order], exact[order]

    def neighbors(self, x: np.ndarray, k: int) -> list[Neighbor]:
        """The k nearest reference points, nearest first"""
        indices, dists = self._order(x, k)
        return [Neighbor(index=int(i), distance=float(d)) for i, d in zip(indices, dists)]

    def neighbor_indices(self, x: np.ndarray, k: int) -> np.ndarray:
        return self._order(x, k)[0]

    def counts_for(self, indices: np.ndarray) -> np.ndarray:
        return np.bincount(self.labels[indices], minlength=self.num_classes)

    def classify(self, x: np.ndarray, k: int) -> Vote:
        """Majority vote among the k nearest reference points"""
        indices = self.neighbor_indices(x, k)
        counts = self.counts_for(indices)
        predicted = majority(counts, self.labels[indices])
        return Vote(counts=counts, predicted=predicted, fraction=float(counts[predicted]) / k)

    def kth_distance(self, x: np.ndarray, k: int) -> float:
        """Distance from x to its k-th nearest reference point"""
        _, dists = self._order(x, k)
        return float(dists[-1])

    def vote_fraction(self, x: np.ndarray, k: int, target: int) -> float:
        """Fraction of the k nearest reference points labeled target"""
        indices = self.neighbor_indices(x, k)
        return float(np.count_nonzero(self.labels[indices] == target)) / k

    def neighbor_indices_batch(self, queries: np.ndarray, k: int) -> np.ndarray:
        """k nearest reference indices for every query row"""
        require_count(k, self.n)
        if self._tree is not None:
            return np.stack([self._order_kdtree(q, k)[0] for q in np.asarray(queries, dtype=np.float64)])
        dists = self.distances_batch(queries)
        return np.argsort(dists, axis=1, kind="stable")[:, :k]
