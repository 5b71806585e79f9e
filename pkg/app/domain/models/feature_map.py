"""
Feature Map Interface
Differentiable transforms placed between input space and kNN
"""

import enum
from typing import Protocol, Mapping

import numpy as np

from app.utils.exceptions import ArgumentError
from app.utils.validators import as_vector


class FeatureMapKind(str, enum.Enum):
    """Feature map kind"""
    IDENTITY = "identity"
    AFFINE = "affine"
    MLP = "mlp"


class FeatureMap(Protocol):
    """Feature map interface"""

    kind: FeatureMapKind

    @property
    def input_dim(self) -> int:
        ...

    @property
    def layers(self) -> tuple[str, ...]:
        """Layer handles this map exposes"""
        ...

    def forward(self, x: np.ndarray, layer: str) -> np.ndarray:
        """Feature vector of x at a layer"""
        ...

    def forward_layers(self, x: np.ndarray, layers) -> dict[str, np.ndarray]:
        """Feature vectors of x at several layers, one pass"""
        ...

    def forward_batch(self, inputs: np.ndarray, layer: str) -> np.ndarray:
        """Row-wise forward over a matrix of inputs"""
        ...

    def backward(self, x: np.ndarray, layer: str, upstream: np.ndarray) -> np.ndarray:
        """Gradient of <upstream, forward(x, layer)> with respect to x"""
        ...

    def vjp(self, x: np.ndarray, upstreams: Mapping[str, np.ndarray]) -> np.ndarray:
        """Gradient of sum_l <upstream_l, forward(x, l)> with respect to x"""
        ...


class IdentityMap:
    """Feature map that returns its input"""

    kind = FeatureMapKind.IDENTITY
    LAYER = "input"

    def __init__(self, dim: int):
        self._dim = dim

    @property
    def input_dim(self) -> int:
        return self._dim

    @property
    def layers(self) -> tuple[str, ...]:
        return (self.LAYER,)

    def _check(self, layer: str) -> None:
        if layer != self.LAYER:
            raise ArgumentError(f"Unknown layer '{layer}' for identity map")

    def forward(self, x: np.ndarray, layer: str = LAYER) -> np.ndarray:
        self._check(layer)
        return as_vector(x, self._dim).copy()

    def forward_layers(self, x: np.ndarray, layers) -> dict[str, np.ndarray]:
        return {layer: self.forward(x, layer) for layer in layers}

    def forward_batch(self, inputs: np.ndarray, layer: str = LAYER) -> np.ndarray:
        self._check(layer)
        return np.array(inputs, dtype=np.float64, copy=True)

    def backward(self, x: np.ndarray, layer: str, upstream: np.ndarray) -> np.ndarray:
        return self.vjp(x, {layer: upstream})

    def vjp(self, x: np.ndarray, upstreams: Mapping[str, np.ndarray]) -> np.ndarray:
        grad = np.zeros(self._dim)
        for layer, upstream in upstreams.items():
            self._check(layer)
            grad += as_vector(upstream, self._dim, "upstream")
        return grad
