"""
Unit Tests for DatasetService
"""

from pathlib import Path

import numpy as np
import pytest

from app.application.services.dataset_service import DatasetService
from app.domain.models.dataset import Dataset
from app.utils.exceptions import ArgumentError, InsufficientSamplesError, ValidationError
from tests.helpers.test_data_factory import create_test_dataset


@pytest.fixture
def dataset_service(mock_dataset_repo):
    """Create DatasetService with mock repository"""
    return DatasetService(mock_dataset_repo)


@pytest.fixture
def digits() -> Dataset:
    """Labels 3 and 5 interleaved with a distractor class"""
    labels = [3, 5, 1, 3, 5, 3, 1, 5]
    features = [[i / 10.0] for i in range(len(labels))]
    return create_test_dataset(features, labels, num_classes=10)


def test_load_csv_delegates(dataset_service, mock_dataset_repo):
    """Test CSV loading goes through the repository"""
    # Arrange
    expected = create_test_dataset([[0.0]], [0])
    mock_dataset_repo.load_csv.return_value = expected

    # Act
    result = dataset_service.load_csv(Path("train.csv"), num_classes=2)

    # Assert
    assert result is expected
    mock_dataset_repo.load_csv.assert_called_once_with(Path("train.csv"), num_classes=2)


def test_load_idx_delegates(dataset_service, mock_dataset_repo):
    """Test IDX loading goes through the repository"""
    dataset_service.load_idx(Path("img"), Path("lbl"))

    mock_dataset_repo.load_idx.assert_called_once_with(Path("img"), Path("lbl"), scale=True)


def test_filter_binary_relabels_in_order(digits):
    """Test 3-vs-5 filtering keeps order and maps 3 -> 0, 5 -> 1"""
    # Act
    ds = DatasetService.filter_binary(digits, 3, 5, 2)

    # Assert
    assert len(ds) == 4
    assert ds.num_classes == 2
    np.testing.assert_allclose(ds.features[:, 0], [0.0, 0.1, 0.3, 0.4])
    assert list(ds.labels) == [0, 1, 0, 1]


def test_filter_binary_zero_per_class(digits):
    """Test per_class=0 gives an empty dataset"""
    ds = DatasetService.filter_binary(digits, 3, 5, 0)

    assert len(ds) == 0


def test_filter_binary_insufficient(digits):
    """Test asking for more samples than a class holds"""
    with pytest.raises(InsufficientSamplesError, match="class 3"):
        DatasetService.filter_binary(digits, 3, 5, 4)


def test_filter_binary_same_class(digits):
    """Test identical classes"""
    with pytest.raises(ArgumentError):
        DatasetService.filter_binary(digits, 3, 3, 1)


def test_balanced_head(digits):
    """Test first samples of every class"""
    ds = DatasetService.balanced_head(digits, 1)

    assert sorted(ds.labels.tolist()) == [1, 3, 5]
    np.testing.assert_allclose(ds.features[:, 0], [0.0, 0.1, 0.2])


def test_gen_gaussian_blobs_shape():
    """Test one class per center"""
    # Act
    ds = DatasetService.gen_gaussian_blobs(0, [[0.2, 0.2], [0.8, 0.8]], 0.05, 20)

    # Assert
    assert len(ds) == 40
    assert ds.dim == 2
    assert ds.class_counts().tolist() == [20, 20]


def test_gen_gaussian_blobs_zero_std():
    """Test degenerate noise puts every point on its center"""
    ds = DatasetService.gen_gaussian_blobs(3, [[0.2, 0.2], [0.8, 0.8]], 0.0, 5)

    np.testing.assert_array_equal(ds.features[:5], np.tile([0.2, 0.2], (5, 1)))
    np.testing.assert_array_equal(ds.features[5:], np.tile([0.8, 0.8], (5, 1)))


def test_gen_gaussian_blobs_deterministic():
    """Test the same seed gives the same dataset"""
    a = DatasetService.gen_gaussian_blobs(11, [[0.3, 0.3], [0.7, 0.7]], 0.2, 10)
    b = DatasetService.gen_gaussian_blobs(11, [[0.3, 0.3], [0.7, 0.7]], 0.2, 10)

    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_gen_gaussian_blobs_clipped():
    """Test wide noise stays in the unit box"""
    ds = DatasetService.gen_gaussian_blobs(0, [[0.0, 1.0]], 1.0, 50)

    assert ds.features.min() >= 0.0
    assert ds.features.max() <= 1.0


def test_gen_gaussian_blobs_negative_std():
    """Test negative noise"""
    with pytest.raises(ArgumentError):
        DatasetService.gen_gaussian_blobs(0, [[0.5, 0.5]], -0.1, 5)


def test_gen_moons():
    """Test two interleaved classes in the unit square"""
    ds = DatasetService.gen_moons(0, 15, noise=0.05)

    assert len(ds) == 30
    assert ds.num_classes == 2
    assert ds.features.min() >= 0.0 and ds.features.max() <= 1.0


def test_dataset_rejects_out_of_box():
    """Test the dataset invariant on features"""
    with pytest.raises(ValidationError):
        create_test_dataset([[1.2]], [0])


def test_dataset_is_immutable():
    """Test feature arrays are read-only"""
    ds = create_test_dataset([[0.5]], [0])

    with pytest.raises(ValueError):
        ds.features[0, 0] = 0.1
