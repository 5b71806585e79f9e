"""
Fixture Helpers
Additional fixtures for test data setup
"""

import pytest

from app.domain.models.dataset import Dataset
from app.domain.models.knn_model import KnnModel
from app.domain.models.mlp import Mlp
from tests.helpers.test_data_factory import (
    create_blobs,
    create_plain_model,
    create_test_dataset,
    create_test_mlp,
    create_two_point_dataset,
)


@pytest.fixture
def two_point_dataset() -> Dataset:
    """Fixture for the 1D two-point training set"""
    return create_two_point_dataset()


@pytest.fixture
def two_point_model(two_point_dataset) -> KnnModel:
    """Fixture for a 1-NN over the two-point set"""
    return create_plain_model(two_point_dataset, k=1)


@pytest.fixture
def blobs() -> Dataset:
    """Fixture for two separated Gaussian blobs"""
    return create_blobs(seed=0)


@pytest.fixture
def three_class_blobs() -> Dataset:
    """Fixture for three Gaussian blobs"""
    return create_blobs(seed=1, centers=((0.2, 0.2), (0.8, 0.2), (0.5, 0.8)), per_class=8)


@pytest.fixture
def ten_point_dataset() -> Dataset:
    """Fixture for a 10-point 2D binary set"""
    return create_test_dataset(
        [
            [0.10, 0.20], [0.20, 0.10], [0.25, 0.30], [0.40, 0.35], [0.15, 0.45],
            [0.60, 0.55], [0.75, 0.80], [0.85, 0.60], [0.55, 0.90], [0.90, 0.90],
        ],
        [0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
    )


@pytest.fixture
def small_mlp() -> Mlp:
    """Fixture for a random 2-6-5-2 network"""
    return create_test_mlp((2, 6, 5, 2), seed=3)
