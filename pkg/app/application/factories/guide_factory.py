"""
Guide Factory
Factory for the guide samples that shape the attack objective
"""

from typing import Optional

import numpy as np

from app.domain.models.attack import GuideHeuristic, GuideSet
from app.domain.models.neighbor_index import NeighborIndex
from app.utils.exceptions import ArgumentError, InsufficientSamplesError


def _nearest_of_class(index: NeighborIndex, dists: np.ndarray, label: int, count: int) -> np.ndarray:
    """The count nearest members of a class, ties by ascending index"""
    members = np.flatnonzero(index.labels == label)
    order = np.lexsort((members, dists[members]))[:count]
    return members[order]


class GuideFactory:
    """Factory for guide sets"""

    @staticmethod
    def select_guides_sw(
        index: NeighborIndex,
        query: np.ndarray,
        y: int,
        m: int,
        target: Optional[int] = None,
    ) -> GuideSet:
        """
        m nearest samples of the single wrong class with the smallest distance sum

        With a target only that class is considered. All weights are +1.
        """
        if m < 1:
            raise ArgumentError("m must be at least 1")
        dists = index.distances(query)
        candidates = [target] if target is not None else [c for c in range(index.num_classes) if c != y]

        best_indices, best_label, best_total = None, None, np.inf
        for label in candidates:
            if np.count_nonzero(index.labels == label) < m:
                continue
            chosen = _nearest_of_class(index, dists, label, m)
            total = float(dists[chosen].sum())
            if total < best_total:
                best_indices, best_label, best_total = chosen, label, total

        if best_indices is None:
            which = f"class {target}" if target is not None else f"no class other than {y}"
            raise InsufficientSamplesError(f"{which} has {m} training samples")

        return GuideSet(
            indices=best_indices,
            labels=np.full(m, best_label, dtype=np.int64),
            weights=np.ones(m),
            adv_label=int(best_label),
        )

    @staticmethod
    def select_guides_half(
        index: NeighborIndex,
        query: np.ndarray,
        y: int,
        m: int,
        target: Optional[int] = None,
    ) -> GuideSet:
        """m/2 wrong-class guides (weight +1) followed by the m/2 nearest samples labeled y (weight -1)"""
        if m < 2 or m % 2:
            raise ArgumentError(f"half_half guide selection needs an even m >= 2, got {m}")
        half = m // 2
        wrong = GuideFactory.select_guides_sw(index, query, y, half, target=target)

        if np.count_nonzero(index.labels == y) < half:
            raise InsufficientSamplesError(f"class {y} has fewer than {half} training samples")
        correct = _nearest_of_class(index, index.distances(query), y, half)

        return GuideSet(
            indices=np.concatenate([wrong.indices, correct]),
            labels=np.concatenate([wrong.labels, np.full(half, y, dtype=np.int64)]),
            weights=np.concatenate([np.ones(half), -np.ones(half)]),
            adv_label=wrong.adv_label,
        )

    @staticmethod
    def select(
        heuristic: GuideHeuristic,
        index: NeighborIndex,
        query: np.ndarray,
        y: int,
        m: int,
        target: Optional[int] = None,
    ) -> GuideSet:
        if heuristic == GuideHeuristic.HALF_HALF:
            return GuideFactory.select_guides_half(index, query, y, m, target=target)
        return GuideFactory.select_guides_sw(index, query, y, m, target=target)
