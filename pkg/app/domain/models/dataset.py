"""
Dataset Model
Labeled points in [0, 1]^d used as kNN training sets and attack targets
"""

from dataclasses import dataclass, field

import numpy as np

from app.utils.exceptions import ArgumentError, ValidationError
from app.utils.validators import is_in_unit_box


@dataclass(frozen=True)
class LabeledPoint:
    """A single labeled sample"""
    x: np.ndarray
    y: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable ordered collection of labeled points"""
    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    _class_indices: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)

        if features.ndim != 2:
            raise ArgumentError(f"features must be a 2-D array, got shape {features.shape}")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise ArgumentError("labels must be a vector with one entry per row of features")
        if self.num_classes < 1:
            raise ArgumentError("num_classes must be positive")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ValidationError(f"labels must lie in [0, {self.num_classes - 1}]")
        if not is_in_unit_box(features):
            raise ValidationError("every feature must lie in [0, 1]")

        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(
            self,
            "_class_indices",
            {c: np.flatnonzero(labels == c) for c in range(self.num_classes)}
        )

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.features.shape[0]

    def __getitem__(self, i: int) -> LabeledPoint:
        return LabeledPoint(x=self.features[i], y=int(self.labels[i]))

    @property
    def points(self) -> list[LabeledPoint]:
        return [self[i] for i in range(len(self))]

    def class_indices(self, label: int) -> np.ndarray:
        """Indices of the points carrying a label, ascending"""
        return self._class_indices.get(label, np.empty(0, dtype=np.int64))

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)

    def subset(self, indices, num_classes: int | None = None, labels=None) -> "Dataset":
        """New dataset made of the given rows, optionally relabeled"""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[indices].reshape(len(indices), self.dim),
            labels=self.labels[indices] if labels is None else labels,
            num_classes=self.num_classes if num_classes is None else num_classes,
        )
