"""
Test Data Factory
Factory functions for creating test datasets, models and configs
"""

from typing import Optional, Sequence

import numpy as np

from app.application.services.dataset_service import DatasetService
from app.application.services.feature_service import init_mlp
from app.domain.models.dataset import Dataset
from app.domain.models.knn_model import KnnModel
from app.domain.models.mlp import Mlp
from app.domain.models.neighbor_index import Metric
from app.domain.models.report import SampleRecord
from app.schemas.attack import AttackConfig


def create_test_dataset(
    features: Sequence[Sequence[float]],
    labels: Sequence[int],
    num_classes: Optional[int] = None,
) -> Dataset:
    """Create a dataset from literal rows"""
    labels = list(labels)
    return Dataset(
        features=np.array(features, dtype=np.float64),
        labels=np.array(labels, dtype=np.int64),
        num_classes=num_classes if num_classes is not None else max(labels) + 1,
    )


def create_two_point_dataset() -> Dataset:
    """1D training set {0 -> class 0, 1 -> class 1}"""
    return create_test_dataset([[0.0], [1.0]], [0, 1])


def create_blobs(
    seed: int = 0,
    centers: Sequence[Sequence[float]] = ((0.3, 0.3), (0.7, 0.7)),
    std: float = 0.08,
    per_class: int = 10,
) -> Dataset:
    """Gaussian blobs in the unit square"""
    return DatasetService.gen_gaussian_blobs(seed, centers, std, per_class)


def create_test_mlp(widths: Sequence[int] = (2, 6, 5, 2), seed: int = 0) -> Mlp:
    """Randomly initialized network"""
    return init_mlp(list(widths), seed)


def create_plain_model(ds: Dataset, k: int = 1, metric: Metric = Metric.EUCLIDEAN) -> KnnModel:
    return KnnModel.plain(ds, k, metric)


def create_attack_config(**overrides) -> AttackConfig:
    """Attack config sized for fast unit tests"""
    params = {
        "k": 1,
        "q": 1,
        "max_steps": 200,
        "bs_steps": 3,
        "lr": 0.02,
        "seed": 0,
    }
    params.update(overrides)
    return AttackConfig(**params)


def create_sample_record(
    index: int = 0,
    success: bool = True,
    norm: Optional[float] = 1.0,
    label: int = 0,
    **kwargs,
) -> SampleRecord:
    """Create a sample record"""
    return SampleRecord(index=index, label=label, success=success, norm=norm if success else None, **kwargs)


def create_blobs_experiment(output: str, **overrides) -> dict:
    """Experiment file content for a small two-blob campaign"""
    cfg = {
        "dataset": {
            "kind": "blobs",
            "centers": [[0.3, 0.3], [0.7, 0.7]],
            "std": 0.08,
            "per_class": 10,
            "test_size": 3,
            "seed": 0,
        },
        "model": {"kind": "plain", "k": 1},
        "attack": {"method": "attack", "params": {"q": 1, "max_steps": 100, "bs_steps": 2, "lr": 0.02}},
        "selection": {"count": 4},
        "seed": 7,
        "output": output,
    }
    cfg.update(overrides)
    return cfg
