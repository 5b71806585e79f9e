"""
Affine Feature Map
kNN space d(x1, x2) = ||A(phi(x1) - mu) - A(phi(x2) - mu)||
where phi concatenates window-pooled activations of the source layers
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from app.domain.models.feature_map import FeatureMapKind, IdentityMap
from app.domain.models.mlp import Mlp
from app.utils.exceptions import ArgumentError
from app.utils.validators import as_vector


def pool_windows(width: int, pool: int) -> tuple[np.ndarray, np.ndarray]:
    """Start offsets and sizes of the non-overlapping pooling windows"""
    starts = np.arange(0, width, pool)
    sizes = np.minimum(starts + pool, width) - starts
    return starts, sizes


def pool_rows(values: np.ndarray, pool: int) -> np.ndarray:
    """Windowed mean along the last axis; the last window may be shorter"""
    if pool == 1:
        return values
    starts, sizes = pool_windows(values.shape[-1], pool)
    return np.add.reduceat(values, starts, axis=-1) / sizes


@dataclass(eq=False)
class AffineMap:
    """PCA projection of pooled, concatenated source-layer features"""
    A: np.ndarray
    mu: np.ndarray
    pool: int
    source_layers: tuple[str, ...]
    mlp: Optional[Mlp] = None
    input_width: Optional[int] = None
    kind: FeatureMapKind = field(default=FeatureMapKind.AFFINE, init=False)

    LAYER = "affine"

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=np.float64)
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.source_layers = tuple(self.source_layers)
        if self.pool < 1:
            raise ArgumentError("pool must be at least 1")
        if self.mlp is None:
            if self.input_width is None:
                raise ArgumentError("input_width is required when no network is given")
            self._source = IdentityMap(self.input_width)
            self.source_layers = (IdentityMap.LAYER,)
        else:
            self._source = self.mlp
            for layer in self.source_layers:
                self.mlp.parse_layer(layer)
        if self.A.ndim != 2 or self.A.shape[1] != self.mu.shape[0]:
            raise ArgumentError(f"A {self.A.shape} does not match mu {self.mu.shape}")
        if self.A.shape[1] != self.phi_dim:
            raise ArgumentError(f"A has {self.A.shape[1]} columns but phi has {self.phi_dim} entries")
        if self.A.shape[0] > self.A.shape[1]:
            raise ArgumentError("reduced dimension cannot exceed the pooled dimension")

    @property
    def input_dim(self) -> int:
        return self._source.input_dim

    @property
    def layers(self) -> tuple[str, ...]:
        return (self.LAYER,)

    @property
    def reduced_dim(self) -> int:
        return self.A.shape[0]

    def _source_width(self, layer: str) -> int:
        if self.mlp is None:
            return self.input_dim
        return self.mlp.layer_width(layer)

    @property
    def phi_dim(self) -> int:
        return sum(len(pool_windows(self._source_width(layer), self.pool)[0]) for layer in self.source_layers)

    def _check(self, layer: str) -> None:
        if layer != self.LAYER:
            raise ArgumentError(f"Unknown layer '{layer}' for affine map")

    def phi(self, x: np.ndarray) -> np.ndarray:
        feats = self._source.forward_layers(as_vector(x, self.input_dim), self.source_layers)
        return np.concatenate([pool_rows(feats[layer], self.pool) for layer in self.source_layers])

    def phi_batch(self, inputs: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [pool_rows(self._source.forward_batch(inputs, layer), self.pool) for layer in self.source_layers],
            axis=1,
        )

    def forward(self, x: np.ndarray, layer: str = LAYER) -> np.ndarray:
        self._check(layer)
        return self.A @ (self.phi(x) - self.mu)

    def forward_layers(self, x: np.ndarray, layers) -> dict[str, np.ndarray]:
        return {layer: self.forward(x, layer) for layer in layers}

    def forward_batch(self, inputs: np.ndarray, layer: str = LAYER) -> np.ndarray:
        self._check(layer)
        return (self.phi_batch(inputs) - self.mu) @ self.A.T

    def backward(self, x: np.ndarray, layer: str, upstream: np.ndarray) -> np.ndarray:
        return self.vjp(x, {layer: upstream})

    def vjp(self, x: np.ndarray, upstreams: Mapping[str, np.ndarray]) -> np.ndarray:
        grad_phi = np.zeros(self.phi_dim)
        for layer, upstream in upstreams.items():
            self._check(layer)
            grad_phi += self.A.T @ as_vector(upstream, self.reduced_dim, "upstream")

        source_grads = {}
        offset = 0
        for layer in self.source_layers:
            starts, sizes = pool_windows(self._source_width(layer), self.pool)
            segment = grad_phi[offset:offset + len(starts)]
            offset += len(starts)
            source_grads[layer] = np.repeat(segment / sizes, sizes)
        return self._source.vjp(x, source_grads)
