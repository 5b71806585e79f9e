"""
Unit Tests for NeighborIndex
"""

import numpy as np
import pytest

from app.domain.models.neighbor_index import Metric, NeighborIndex, SearchBackend
from app.domain.models.vote import majority
from app.utils.exceptions import ArgumentError


@pytest.fixture
def line_index():
    """(0,0), (2,0), (5,0) with labels 0, 1, 1"""
    return NeighborIndex(np.array([[0.0, 0.0], [2.0, 0.0], [5.0, 0.0]]), np.array([0, 1, 1]), 2)


@pytest.fixture
def small_index():
    """{(0,0): 0, (1,0): 1, (1,1): 1}"""
    return NeighborIndex(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]), np.array([0, 1, 1]), 2)


def test_neighbors_equidistant_tie(line_index):
    """Test equal distances are ordered by index"""
    # Act
    neighbors = line_index.neighbors(np.array([1.0, 0.0]), 2)

    # Assert
    assert [n.index for n in neighbors] == [0, 1]
    assert [n.distance for n in neighbors] == [1.0, 1.0]


def test_neighbors_at_training_point(line_index):
    """Test a query on a training point"""
    neighbors = line_index.neighbors(np.array([2.0, 0.0]), 1)

    assert neighbors[0].index == 1
    assert neighbors[0].distance == 0.0


def test_neighbors_cosine_parallel():
    """Test parallel vectors have cosine distance 0"""
    # Arrange
    index = NeighborIndex(np.array([[2.0, 0.0], [0.0, 1.0]]), np.array([0, 1]), 2, metric=Metric.COSINE)

    # Act
    neighbors = index.neighbors(np.array([1.0, 0.0]), 1)

    # Assert
    assert neighbors[0].index == 0
    assert neighbors[0].distance == pytest.approx(0.0)


def test_cosine_zero_query():
    """Test cosine distance of a zero vector"""
    index = NeighborIndex(np.array([[1.0, 0.0]]), np.array([0]), 1, metric=Metric.COSINE)

    with pytest.raises(ArgumentError, match="zero query"):
        index.distances(np.zeros(2))


def test_k_out_of_range(line_index):
    """Test k larger than n and k = 0"""
    with pytest.raises(ArgumentError):
        line_index.neighbors(np.array([0.0, 0.0]), 4)
    with pytest.raises(ArgumentError):
        line_index.neighbors(np.array([0.0, 0.0]), 0)


def test_classify_k1(small_index):
    """Test 1-NN"""
    vote = small_index.classify(np.array([0.1, 0.0]), 1)

    assert vote.predicted == 0


def test_classify_k3(small_index):
    """Test full enumeration votes 0:1, 1:2"""
    vote = small_index.classify(np.array([0.1, 0.0]), 3)

    assert vote.predicted == 1
    assert vote.counts.tolist() == [1, 2]
    assert vote.fraction == pytest.approx(2 / 3)


def test_classify_tie_goes_to_nearest():
    """Test a 1-1 vote follows the nearer neighbor"""
    # Arrange
    index = NeighborIndex(np.array([[0.0], [1.0]]), np.array([1, 0]), 2)

    # Act
    near_zero = index.classify(np.array([0.3]), 2)
    near_one = index.classify(np.array([0.7]), 2)

    # Assert
    assert near_zero.predicted == 1
    assert near_one.predicted == 0


def test_majority_smallest_label_fallback():
    """Test tie with no tied label among the ordered labels"""
    assert majority(np.array([2, 2, 0]), []) == 0


def test_kth_distance(line_index):
    """Test k-th neighbor distance"""
    x = np.array([1.0, 0.0])

    assert line_index.kth_distance(x, 2) == 1.0
    assert line_index.kth_distance(x, 3) == 4.0
    assert line_index.kth_distance(np.array([0.0, 0.0]), 1) == 0.0


def test_vote_fraction():
    """Test 21 of 75 neighbors of the target class"""
    # Arrange
    labels = np.array([1] * 21 + [0] * 54)
    features = np.arange(75, dtype=np.float64)[:, None]
    index = NeighborIndex(features, labels, 2)

    # Act
    fraction = index.vote_fraction(np.array([0.0]), 75, 1)

    # Assert
    assert fraction == pytest.approx(0.28)
    assert index.vote_fraction(np.array([0.0]), 21, 1) == 1.0
    assert index.vote_fraction(np.array([0.0]), 21, 0) == 0.0


def test_kdtree_matches_linear(rng):
    """Test both backends return identical neighbor lists"""
    # Arrange
    features = np.round(rng.random((60, 3)), 1)
    labels = rng.integers(0, 3, size=60)
    linear = NeighborIndex(features, labels, 3)
    tree = NeighborIndex(features, labels, 3, backend=SearchBackend.KDTREE)
    queries = np.round(rng.random((20, 3)), 1)

    # Act & Assert
    for q in queries:
        np.testing.assert_array_equal(linear.neighbor_indices(q, 5), tree.neighbor_indices(q, 5))


def test_kdtree_rejects_cosine():
    """Test the tree backend is Euclidean only"""
    with pytest.raises(ArgumentError):
        NeighborIndex(np.ones((2, 2)), np.array([0, 1]), 2, metric=Metric.COSINE, backend=SearchBackend.KDTREE)


def test_batch_matches_single(rng):
    """Test batched neighbor queries"""
    features = rng.random((30, 2))
    index = NeighborIndex(features, rng.integers(0, 2, size=30), 2)
    queries = rng.random((7, 2))

    batch = index.neighbor_indices_batch(queries, 3)

    for row, q in zip(batch, queries):
        np.testing.assert_array_equal(row, index.neighbor_indices(q, 3))


def test_index_is_immutable(line_index):
    """Test stored arrays are read-only"""
    with pytest.raises(ValueError):
        line_index.features[0, 0] = 1.0


def test_classify_ignores_training_order(rng):
    """Test a shuffled training set gives the same vote when distances are distinct"""
    # Arrange
    features = rng.uniform(size=(40, 3))
    labels = rng.integers(0, 3, size=40)
    order = rng.permutation(40)
    original = NeighborIndex(features, labels, 3)
    shuffled = NeighborIndex(features[order], labels[order], 3)

    for query in rng.uniform(size=(30, 3)):
        for k in (1, 3, 5, 7):
            # Act
            a = original.classify(query, k)
            b = shuffled.classify(query, k)

            # Assert
            assert a.predicted == b.predicted
            assert a.counts.tolist() == b.counts.tolist()
