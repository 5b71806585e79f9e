"""
Feature Service
Training the stand-in network and fitting the affine (PCA) map
"""

import logging
from typing import Optional, Sequence

import numpy as np

from app.domain.models.affine_map import AffineMap, pool_rows
from app.domain.models.dataset import Dataset
from app.domain.models.mlp import Mlp
from app.infrastructure.optim.optimizers import Adam
from app.utils.exceptions import ArgumentError, OptimizerError, TrainingError

logger = logging.getLogger(__name__)


def init_mlp(widths: Sequence[int], seed: int) -> Mlp:
    """Uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)]"""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        s = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-s, s, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-s, s, size=fan_out))
    return Mlp(weights=weights, biases=biases)


def _softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean loss and its gradient with respect to the logits"""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    n = logits.shape[0]
    loss = float(-np.mean(np.log(probs[np.arange(n), labels] + 1e-300)))
    grad = probs
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n


def _batch_gradients(mlp: Mlp, inputs: np.ndarray, labels: np.ndarray) -> tuple[float, list, list]:
    pres, posts = [inputs], [inputs]
    a = inputs
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases), start=1):
        z = a @ w.T + b
        a = z if i == mlp.depth else np.maximum(z, 0.0)
        pres.append(z)
        posts.append(a)

    loss, grad = _softmax_cross_entropy(posts[-1], labels)
    grad_w = [None] * mlp.depth
    grad_b = [None] * mlp.depth
    for i in range(mlp.depth, 0, -1):
        if i < mlp.depth:
            grad = grad * (pres[i] > 0.0)
        grad_w[i - 1] = grad.T @ posts[i - 1]
        grad_b[i - 1] = grad.sum(axis=0)
        grad = grad @ mlp.weights[i - 1]
    return loss, grad_w, grad_b


class FeatureService:
    """Feature-map construction"""

    @staticmethod
    def train_mlp(
        ds: Dataset,
        widths: Sequence[int],
        epochs: int,
        lr: float,
        seed: int,
        batch_size: int = 128,
    ) -> Mlp:
        """Softmax cross-entropy training with Adam; deterministic for a fixed seed"""
        widths = list(widths)
        if len(widths) < 2:
            raise ArgumentError("widths must list at least the input and output sizes")
        if widths[0] != ds.dim:
            raise ArgumentError(f"input width {widths[0]} does not match data dimension {ds.dim}")
        if widths[-1] != ds.num_classes:
            raise ArgumentError(f"output width {widths[-1]} does not match {ds.num_classes} classes")
        if epochs < 0 or lr <= 0 or batch_size < 1:
            raise ArgumentError("epochs must be >= 0, lr > 0 and batch_size >= 1")

        mlp = init_mlp(widths, seed)
        if epochs == 0 or len(ds) == 0:
            return mlp

        rng = np.random.default_rng(seed + 1)
        optimizer = Adam(learning_rate=lr)
        params = mlp.weights + mlp.biases
        loss = float("nan")
        for epoch in range(epochs):
            order = rng.permutation(len(ds))
            for start in range(0, len(ds), batch_size):
                batch = order[start:start + batch_size]
                loss, grad_w, grad_b = _batch_gradients(mlp, ds.features[batch], ds.labels[batch])
                if not np.isfinite(loss):
                    raise TrainingError(f"training loss became non-finite at epoch {epoch + 1}")
                try:
                    optimizer.update(params, grad_w + grad_b)
                except OptimizerError as e:
                    raise TrainingError(f"training diverged at epoch {epoch + 1}") from e
            logger.debug("epoch %d/%d loss=%.4f", epoch + 1, epochs, loss)

        mlp.train_accuracy = float(np.mean(mlp.predict_batch(ds.features) == ds.labels))
        logger.info("Trained MLP %s: final loss %.4f, training accuracy %.4f", widths, loss, mlp.train_accuracy)
        return mlp

    @staticmethod
    def fit_affine(
        ds: Dataset,
        mlp: Optional[Mlp],
        layers: Sequence[str],
        pool: int,
        r: int,
    ) -> AffineMap:
        """
        PCA over pooled, concatenated layer features

        mu is the mean of phi over the training set; the rows of A are the top-r
        principal directions, each with its first nonzero component positive.
        Without a network phi is the raw input.
        """
        if len(ds) < 2:
            raise ArgumentError("fit_affine needs at least two samples")
        if pool < 1:
            raise ArgumentError("pool must be at least 1")
        if mlp is not None:
            if not layers:
                raise ArgumentError("at least one source layer is required")
            phi = np.concatenate([pool_rows(mlp.forward_batch(ds.features, layer), pool) for layer in layers], axis=1)
        else:
            phi = pool_rows(ds.features, pool)

        dim = phi.shape[1]
        if r < 1 or r > dim:
            raise ArgumentError(f"reduced dimension r={r} must lie in [1, {dim}]")

        mu = phi.mean(axis=0)
        centered = phi - mu
        cov = centered.T @ centered / (len(ds) - 1)
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(-eigvals, kind="stable")[:r]
        basis = eigvecs[:, order].T.copy()
        for row in basis:
            nonzero = np.flatnonzero(np.abs(row) > 1e-12)
            if nonzero.size and row[nonzero[0]] < 0:
                row *= -1.0

        return AffineMap(
            A=basis,
            mu=mu,
            pool=pool,
            source_layers=tuple(layers) if mlp is not None else (),
            mlp=mlp,
            input_width=ds.dim,
        )
