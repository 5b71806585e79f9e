"""
Vote Model
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Neighbor:
    """One entry of a distance-ordered neighbor list"""
    index: int
    distance: float


@dataclass(frozen=True, eq=False)
class Vote:
    """Per-class neighbor counts and the resulting prediction"""
    counts: np.ndarray
    predicted: int
    fraction: float

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def fraction_of(self, label: int) -> float:
        """Share of the counted neighbors carrying a label"""
        if label < 0 or label >= self.counts.shape[0]:
            return 0.0
        return float(self.counts[label]) / self.total


def majority(counts: np.ndarray, ordered_labels) -> int:
    """
    Majority label with the nearest-neighbor tie rule

    Among the classes sharing the maximum count, the class of the nearest
    neighbor wins; the smallest label wins if none of the ordered labels is tied.
    """
    top = counts.max()
    tied = np.flatnonzero(counts == top)
    if tied.shape[0] == 1:
        return int(tied[0])
    tied_set = set(int(c) for c in tied)
    for label in ordered_labels:
        if int(label) in tied_set:
            return int(label)
    return int(tied[0])
