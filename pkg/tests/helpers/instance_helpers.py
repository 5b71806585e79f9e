"""
Instance Helpers
Random attack instances for the acceptance suites
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.application.services.dataset_service import DatasetService
from app.domain.models.dataset import Dataset
from app.domain.models.knn_model import KnnModel


@dataclass
class Instance:
    """One training set and one correctly classified target"""
    train: Dataset
    x: np.ndarray
    y: int
    k: int


def blob_instance(seed: int, k: int, max_per_class: int = 10) -> Optional[Instance]:
    """Random two-blob training set with a target the plain kNN gets right"""
    rng = np.random.default_rng(seed)
    per_class = int(rng.integers(k + 2, max_per_class + 1))
    centers = [rng.uniform(0.25, 0.45, size=2), rng.uniform(0.55, 0.75, size=2)]
    train = DatasetService.gen_gaussian_blobs(seed, centers, 0.1, per_class)
    candidates = DatasetService.gen_gaussian_blobs(seed + 10_000, centers, 0.1, 2)

    model = KnnModel.plain(train, k)
    for i in rng.permutation(len(candidates)):
        x, y = candidates.features[i], int(candidates.labels[i])
        if model.predict(x) == y:
            return Instance(train=train, x=x, y=y, k=k)
    return None


def blob_suite(count: int, ks: tuple[int, ...], max_per_class: int = 10) -> list[Instance]:
    """count instances cycling through ks"""
    instances: list[Instance] = []
    seed = 0
    while len(instances) < count:
        instance = blob_instance(seed, ks[len(instances) % len(ks)], max_per_class)
        if instance is not None:
            instances.append(instance)
        seed += 1
    return instances


def scattered_instance(seed: int, k: int, max_points: int = 15) -> Instance:
    """Uniform points with random binary labels and a uniform target"""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(max(k + 1, 4), max_points + 1))
    features = rng.uniform(0.0, 1.0, size=(n, 2))
    labels = np.concatenate([[0, 1], rng.integers(0, 2, size=n - 2)])
    train = Dataset(features=features, labels=labels, num_classes=2)
    x = rng.uniform(0.0, 1.0, size=2)
    return Instance(train=train, x=x, y=KnnModel.plain(train, k).predict(x), k=k)
