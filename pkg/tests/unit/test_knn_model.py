"""
Unit Tests for KnnModel
"""

import numpy as np
import pytest

from app.domain.models.feature_map import IdentityMap
from app.domain.models.knn_model import KnnModel
from app.domain.models.mlp import Mlp
from app.domain.models.neighbor_index import Metric
from app.utils.exceptions import ArgumentError
from tests.helpers.test_data_factory import create_test_dataset


@pytest.fixture
def identity_pair_map():
    """Two-layer network whose layers both reproduce the input"""
    return Mlp(weights=[np.eye(2), np.eye(2)], biases=[np.zeros(2), np.zeros(2)])


def test_plain_predict(ten_point_dataset):
    """Test plain kNN on its own training points"""
    model = KnnModel.plain(ten_point_dataset, k=1)

    assert model.is_plain
    np.testing.assert_array_equal(model.training_predictions, ten_point_dataset.labels)
    assert model.accuracy(ten_point_dataset) == 1.0


def test_plain_cosine_is_not_plain(ten_point_dataset):
    """Test a cosine model is not eligible for the Euclidean oracle"""
    model = KnnModel.plain(ten_point_dataset, k=1, metric=Metric.COSINE)

    assert not model.is_plain


def test_votes_sum_across_layers(identity_pair_map):
    """Test two identical layers double every count"""
    # Arrange
    ds = create_test_dataset([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], [0, 1, 1])
    model = KnnModel(ds, identity_pair_map, ("fc1", "fc2"), k=3)

    # Act
    vote = model.vote(np.array([0.1, 0.0]))

    # Assert
    assert vote.counts.tolist() == [2, 4]
    assert vote.predicted == 1
    assert model.credibility(np.array([0.1, 0.0])) == pytest.approx(4 / 6)
    assert model.vote_fraction(np.array([0.1, 0.0]), 0) == pytest.approx(2 / 6)


def test_predict_batch_matches_predict(blobs, small_mlp):
    """Test batched predictions agree with single predictions"""
    # Arrange
    model = KnnModel(blobs, small_mlp, small_mlp.hidden_layers, k=3)

    # Act
    batch = model.predict_batch(blobs.features)

    # Assert
    assert batch.tolist() == [model.predict(x) for x in blobs.features]


def test_thresholds_identity_equals_kth_distance(ten_point_dataset):
    """Test thresholds reduce to the k-th neighbor distance"""
    model = KnnModel.plain(ten_point_dataset, k=3)
    x = np.array([0.5, 0.5])

    eta = model.thresholds(model.features_of(x))

    assert eta.tolist() == [model.indices[0].kth_distance(x, 3)]


def test_unknown_layer(ten_point_dataset):
    """Test layer handles are validated"""
    with pytest.raises(ArgumentError, match="Unknown layer"):
        KnnModel(ten_point_dataset, IdentityMap(2), ("fc1",), k=1)


def test_metric_count_mismatch(blobs, small_mlp):
    """Test one metric per layer"""
    with pytest.raises(ArgumentError):
        KnnModel(blobs, small_mlp, ("fc1", "fc2"), k=1, metrics=[Metric.EUCLIDEAN])


def test_k_exceeds_training_set(two_point_dataset):
    """Test k > n"""
    with pytest.raises(ArgumentError):
        KnnModel.plain(two_point_dataset, k=3)
