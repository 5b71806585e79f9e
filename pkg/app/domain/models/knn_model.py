"""
kNN Model
kNN over one or more layers of a feature map, with votes summed across layers
"""

import enum
from functools import cached_property
from typing import Sequence

import numpy as np

from app.domain.models.dataset import Dataset
from app.domain.models.feature_map import FeatureMap, IdentityMap
from app.domain.models.neighbor_index import Metric, NeighborIndex, SearchBackend
from app.domain.models.vote import Vote, majority
from app.utils.exceptions import ArgumentError
from app.utils.validators import as_vector, require_count


class ModelKind(str, enum.Enum):
    """kNN model family"""
    PLAIN = "plain"
    DEEP = "deep"
    SINGLE_LAYER = "single_layer"
    AFFINE = "affine"


class KnnModel:
    """Immutable kNN classifier over feature-mapped training data"""

    def __init__(
        self,
        train: Dataset,
        feature_map: FeatureMap,
        layers: Sequence[str],
        k: int,
        metrics: Metric | Sequence[Metric] = Metric.EUCLIDEAN,
        backend: SearchBackend = SearchBackend.LINEAR,
    ):
        layers = tuple(layers)
        if not layers:
            raise ArgumentError("a kNN model needs at least one layer")
        for layer in layers:
            if layer not in feature_map.layers:
                raise ArgumentError(f"Unknown layer '{layer}'")
        if isinstance(metrics, (str, Metric)):
            metrics = [metrics] * len(layers)
        metrics = tuple(Metric(m) for m in metrics)
        if len(metrics) != len(layers):
            raise ArgumentError("one metric per layer is required")
        if feature_map.input_dim != train.dim:
            raise ArgumentError(f"feature map expects dimension {feature_map.input_dim}, data has {train.dim}")
        require_count(k, len(train))

        self.train = train
        self.feature_map = feature_map
        self.layers = layers
        self.metrics = metrics
        self.k = k
        self.layer_features = [feature_map.forward_batch(train.features, layer) for layer in layers]
        self.indices = [
            NeighborIndex(feats, train.labels, train.num_classes, metric=metric, backend=backend)
            for feats, metric in zip(self.layer_features, metrics)
        ]

    @classmethod
    def plain(
        cls,
        train: Dataset,
        k: int,
        metric: Metric = Metric.EUCLIDEAN,
        backend: SearchBackend = SearchBackend.LINEAR,
    ) -> "KnnModel":
        """kNN directly on the inputs"""
        return cls(train, IdentityMap(train.dim), (IdentityMap.LAYER,), k, metric, backend)

    @property
    def num_classes(self) -> int:
        return self.train.num_classes

    @property
    def input_dim(self) -> int:
        return self.train.dim

    @property
    def is_plain(self) -> bool:
        return isinstance(self.feature_map, IdentityMap) and self.metrics == (Metric.EUCLIDEAN,)

    def features_of(self, x: np.ndarray) -> list[np.ndarray]:
        """Feature vectors of x at every model layer"""
        feats = self.feature_map.forward_layers(as_vector(x, self.input_dim), self.layers)
        return [feats[layer] for layer in self.layers]

    def vote_from_features(self, feats: Sequence[np.ndarray]) -> Vote:
        counts = np.zeros(self.num_classes, dtype=np.int64)
        ordered = []
        for index, f in zip(self.indices, feats):
            nearest = index.neighbor_indices(f, self.k)
            counts += index.counts_for(nearest)
            ordered.extend(index.labels[nearest])
        predicted = majority(counts, ordered)
        return Vote(counts=counts, predicted=predicted, fraction=float(counts[predicted]) / counts.sum())

    def vote(self, x: np.ndarray) -> Vote:
        """Votes summed over all layers"""
        return self.vote_from_features(self.features_of(x))

    def predict(self, x: np.ndarray) -> int:
        return self.vote(x).predicted

    def vote_fraction(self, x: np.ndarray, target: int) -> float:
        """Fraction of all k-per-layer neighbors labeled target"""
        return self.vote(x).fraction_of(target)

    def credibility(self, x: np.ndarray) -> float:
        """Fraction of all neighbors agreeing with the prediction"""
        return self.vote(x).fraction

    def thresholds(self, feats: Sequence[np.ndarray]) -> np.ndarray:
        """k-th neighbor distance at every layer"""
        return np.array([index.kth_distance(f, self.k) for index, f in zip(self.indices, feats)])

    def predict_batch(self, inputs: np.ndarray) -> np.ndarray:
        inputs = np.asarray(inputs, dtype=np.float64)
        per_layer = []
        for layer, index in zip(self.layers, self.indices):
            feats = self.feature_map.forward_batch(inputs, layer)
            per_layer.append(index.neighbor_indices_batch(feats, self.k))

        labels = self.train.labels
        predictions = np.empty(inputs.shape[0], dtype=np.int64)
        for row in range(inputs.shape[0]):
            nearest = [labels[ids[row]] for ids in per_layer]
            counts = sum(np.bincount(lab, minlength=self.num_classes) for lab in nearest)
            predictions[row] = majority(counts, np.concatenate(nearest))
        return predictions

    @cached_property
    def training_predictions(self) -> np.ndarray:
        """Model classification of every training point"""
        return self.predict_batch(self.train.features)

    @cached_property
    def input_index(self) -> NeighborIndex:
        """Euclidean index over the raw training inputs"""
        return NeighborIndex.from_dataset(self.train)

    def accuracy(self, ds: Dataset) -> float:
        if len(ds) == 0:
            return float("nan")
        return float(np.mean(self.predict_batch(ds.features) == ds.labels))
