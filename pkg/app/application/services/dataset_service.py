"""
Dataset Service
Loading, filtering and generating labeled datasets
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.domain.models.dataset import Dataset
from app.domain.repositories.dataset_repository import DatasetRepository
from app.utils.exceptions import ArgumentError, InsufficientSamplesError

logger = logging.getLogger(__name__)


class DatasetService:
    """Dataset service with dependency injection"""

    def __init__(self, dataset_repository: DatasetRepository):
        self.dataset_repository = dataset_repository

    def load_idx(self, images_path: Path, labels_path: Path, scale: bool = True) -> Dataset:
        return self.dataset_repository.load_idx(images_path, labels_path, scale=scale)

    def load_csv(self, path: Path, num_classes: Optional[int] = None) -> Dataset:
        return self.dataset_repository.load_csv(path, num_classes=num_classes)

    def write_csv(self, ds: Dataset, path: Path) -> None:
        self.dataset_repository.write_csv(ds, path)

    @staticmethod
    def filter_binary(ds: Dataset, class_a: int, class_b: int, per_class: int) -> Dataset:
        """
        Two-class subset

        Takes the first per_class samples of each class, keeps their original
        relative order and relabels class_a -> 0, class_b -> 1.
        """
        if class_a == class_b:
            raise ArgumentError("class_a and class_b must differ")
        if per_class < 0:
            raise ArgumentError("per_class must be non-negative")

        chosen = []
        for label in (class_a, class_b):
            available = ds.class_indices(label)
            if available.shape[0] < per_class:
                raise InsufficientSamplesError(
                    f"class {label} has {available.shape[0]} samples, {per_class} requested"
                )
            chosen.append(available[:per_class])

        indices = np.sort(np.concatenate(chosen))
        new_labels = (ds.labels[indices] == class_b).astype(np.int64)
        return ds.subset(indices, num_classes=2, labels=new_labels)

    @staticmethod
    def balanced_head(ds: Dataset, per_class: int) -> Dataset:
        """First per_class samples of every class, original order"""
        chosen = [ds.class_indices(c)[:per_class] for c in range(ds.num_classes)]
        indices = np.sort(np.concatenate(chosen)) if chosen else np.empty(0, dtype=np.int64)
        return ds.subset(indices)

    @staticmethod
    def gen_gaussian_blobs(
        seed: int,
        centers: Sequence[Sequence[float]],
        std: float,
        per_class: int
    ) -> Dataset:
        """Isotropic Gaussian clusters, one class per center, clipped to [0, 1]^d"""
        centers = np.asarray(centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] < 1:
            raise ArgumentError("centers must be a non-empty list of vectors")
        if std < 0:
            raise ArgumentError("std must be non-negative")
        if per_class < 0:
            raise ArgumentError("per_class must be non-negative")

        rng = np.random.default_rng(seed)
        num_classes, dim = centers.shape
        noise = rng.normal(0.0, 1.0, size=(num_classes, per_class, dim)) * std
        features = np.clip(centers[:, None, :] + noise, 0.0, 1.0).reshape(-1, dim)
        labels = np.repeat(np.arange(num_classes), per_class)
        return Dataset(features=features, labels=labels, num_classes=num_classes)

    @staticmethod
    def gen_moons(seed: int, per_class: int, noise: float = 0.1) -> Dataset:
        """Two interleaved half circles rescaled into [0, 1]^2"""
        if per_class < 0:
            raise ArgumentError("per_class must be non-negative")
        if noise < 0:
            raise ArgumentError("noise must be non-negative")

        rng = np.random.default_rng(seed)
        angles = np.linspace(0.0, np.pi, per_class) if per_class > 1 else np.zeros(per_class)
        upper = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        lower = np.stack([1.0 - np.cos(angles), 0.5 - np.sin(angles)], axis=1)
        points = np.concatenate([upper, lower]) + rng.normal(0.0, noise, size=(2 * per_class, 2))
        # raw moons span roughly [-1, 2] x [-0.5, 1]
        features = np.clip((points - np.array([-1.25, -0.75])) / np.array([3.5, 2.0]), 0.0, 1.0)
        labels = np.repeat(np.arange(2), per_class)
        return Dataset(features=features, labels=labels, num_classes=2)
