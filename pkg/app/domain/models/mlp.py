"""
Multilayer Perceptron
Fully-connected ReLU network with exact analytic gradients
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from app.domain.models.feature_map import FeatureMapKind
from app.utils.exceptions import ArgumentError
from app.utils.validators import as_vector, is_finite

PRE_SUFFIX = "_pre"


@dataclass(eq=False)
class Mlp:
    """
    ReLU network; layer i (1-based) computes W_i a + b_i

    Layer handles are "fc{i}" (after ReLU; the last layer has no ReLU) and
    "fc{i}_pre" (before ReLU).
    """
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    train_accuracy: Optional[float] = None
    kind: FeatureMapKind = field(default=FeatureMapKind.MLP, init=False)

    def __post_init__(self):
        if not self.weights or len(self.weights) != len(self.biases):
            raise ArgumentError("Mlp needs one bias vector per weight matrix")
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in self.biases]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ArgumentError(f"layer {i + 1}: weight {w.shape} and bias {b.shape} do not match")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ArgumentError(f"layer {i + 1}: input width {w.shape[1]} does not compose")
            if not (is_finite(w) and is_finite(b)):
                raise ArgumentError(f"layer {i + 1}: parameters must be finite")

    @property
    def widths(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def num_outputs(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def layers(self) -> tuple[str, ...]:
        names = [f"fc{i}" for i in range(1, self.depth + 1)]
        return tuple(names + [name + PRE_SUFFIX for name in names])

    @property
    def hidden_layers(self) -> tuple[str, ...]:
        return tuple(f"fc{i}" for i in range(1, self.depth))

    @property
    def penultimate_layer(self) -> str:
        if self.depth < 2:
            raise ArgumentError("a single-layer network has no hidden layer")
        return f"fc{self.depth - 1}"

    def parse_layer(self, layer: str) -> tuple[int, bool]:
        """Layer handle -> (1-based index, pre-activation flag)"""
        pre = layer.endswith(PRE_SUFFIX)
        stem = layer[: -len(PRE_SUFFIX)] if pre else layer
        if not stem.startswith("fc") or not stem[2:].isdigit():
            raise ArgumentError(f"Unknown layer '{layer}'")
        index = int(stem[2:])
        if index < 1 or index > self.depth:
            raise ArgumentError(f"Unknown layer '{layer}' (network has {self.depth} layers)")
        return index, pre

    def layer_width(self, layer: str) -> int:
        index, _ = self.parse_layer(layer)
        return self.widths[index]

    def _activate(self, index: int, pre: np.ndarray) -> np.ndarray:
        return pre if index == self.depth else np.maximum(pre, 0.0)

    def _forward_all(self, x: np.ndarray, depth: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Pre- and post-activations of layers 1..depth (index 0 holds the input)"""
        pres = [x]
        posts = [x]
        a = x
        for i in range(1, depth + 1):
            z = self.weights[i - 1] @ a + self.biases[i - 1]
            a = self._activate(i, z)
            pres.append(z)
            posts.append(a)
        return pres, posts

    def forward(self, x: np.ndarray, layer: str) -> np.ndarray:
        index, pre = self.parse_layer(layer)
        pres, posts = self._forward_all(as_vector(x, self.input_dim), index)
        return (pres if pre else posts)[index].copy()

    def forward_layers(self, x: np.ndarray, layers) -> dict[str, np.ndarray]:
        parsed = {layer: self.parse_layer(layer) for layer in layers}
        depth = max((index for index, _ in parsed.values()), default=0)
        pres, posts = self._forward_all(as_vector(x, self.input_dim), depth)
        return {layer: (pres if pre else posts)[index].copy() for layer, (index, pre) in parsed.items()}

    def forward_batch(self, inputs: np.ndarray, layer: str) -> np.ndarray:
        index, pre = self.parse_layer(layer)
        a = np.asarray(inputs, dtype=np.float64)
        z = a
        for i in range(1, index + 1):
            z = a @ self.weights[i - 1].T + self.biases[i - 1]
            a = self._activate(i, z)
        return z if pre else a

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x, f"fc{self.depth}")

    def predict_batch(self, inputs: np.ndarray) -> np.ndarray:
        return np.argmax(self.forward_batch(inputs, f"fc{self.depth}"), axis=1)

    def backward(self, x: np.ndarray, layer: str, upstream: np.ndarray) -> np.ndarray:
        return self.vjp(x, {layer: upstream})

    def vjp(self, x: np.ndarray, upstreams: Mapping[str, np.ndarray]) -> np.ndarray:
        """Backpropagate upstream gradients injected at any set of layers"""
        x = as_vector(x, self.input_dim)
        post_grads: dict[int, np.ndarray] = {}
        pre_grads: dict[int, np.ndarray] = {}
        for layer, upstream in upstreams.items():
            index, pre = self.parse_layer(layer)
            upstream = as_vector(upstream, self.widths[index], "upstream")
            target = pre_grads if pre else post_grads
            target[index] = target.get(index, 0.0) + upstream

        depth = max(list(post_grads) + list(pre_grads), default=0)
        if depth == 0:
            return np.zeros(self.input_dim)

        pres, _ = self._forward_all(x, depth)
        grad = np.zeros(self.widths[depth])
        for i in range(depth, 0, -1):
            if i in post_grads:
                grad = grad + post_grads[i]
            if i < self.depth:
                grad = grad * (pres[i] > 0.0)
            if i in pre_grads:
                grad = grad + pre_grads[i]
            grad = self.weights[i - 1].T @ grad
        return grad
