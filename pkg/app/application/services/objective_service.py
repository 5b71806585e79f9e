"""
Objective Service
Hinge and sigmoid attack objectives, their input gradients and the box reparameterization
"""

from typing import Sequence

import numpy as np

from app.domain.models.attack import GuideSet, ObjectiveKind
from app.domain.models.feature_map import FeatureMap
from app.domain.models.neighbor_index import Metric, NeighborIndex
from app.utils.exceptions import ArgumentError
from app.utils.validators import as_vector

SIGMOID_CLAMP = 50.0
BOX_EPS = 1e-6
_NORM_FLOOR = 1e-12


def reparam_box(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """x = (tanh(z) + 1) / 2 and its elementwise derivative dx/dz"""
    t = np.tanh(z)
    return (t + 1.0) / 2.0, (1.0 - t * t) / 2.0


def inverse_box(x: np.ndarray) -> np.ndarray:
    """Free variable z with reparam_box(z) == x; box faces are pulled in by BOX_EPS"""
    return np.arctanh(np.clip(2.0 * np.asarray(x, dtype=np.float64) - 1.0, -1.0 + BOX_EPS, 1.0 - BOX_EPS))


def refresh_thresholds(indices: Sequence[NeighborIndex], feats: Sequence[np.ndarray], k: int) -> np.ndarray:
    """eta per layer: the k-th neighbor distance of the current point"""
    return np.array([index.kth_distance(f, k) for index, f in zip(indices, feats)])


def _layer_distances(metric: Metric, f: np.ndarray, guides: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Guide distances (squared for Euclidean) and their Jacobian rows with respect to f"""
    if metric == Metric.EUCLIDEAN:
        diff = guides - f
        return np.sum(diff * diff, axis=1), -2.0 * diff

    f_norm = max(float(np.linalg.norm(f)), _NORM_FLOOR)
    g_norms = np.maximum(np.linalg.norm(guides, axis=1), _NORM_FLOOR)
    cos = (guides @ f) / (g_norms * f_norm)
    d_cos = guides / (g_norms[:, None] * f_norm) - cos[:, None] * f[None, :] / (f_norm * f_norm)
    return 1.0 - cos, -d_cos


def objective_and_grad(
    x: np.ndarray,
    delta: np.ndarray,
    guides: GuideSet,
    feature_map: FeatureMap,
    layers: Sequence[str],
    metrics: Sequence[Metric],
    c: float,
    delta_margin: float,
    kind: ObjectiveKind = ObjectiveKind.RELU,
) -> tuple[float, np.ndarray]:
    """
    Attack loss at x + delta and its gradient with respect to delta

    relu:    sum_l sum_i max(w_i * (d_il - eta_l) + margin, 0) + c * |delta|^2
    sigmoid: sum_l sum_i w_i * sigmoid(d_il - eta_l) + c * |delta|^2

    d_il is the squared Euclidean distance (and eta_l squared with it) or the
    plain cosine distance, depending on the layer metric. Guides need their
    per-layer features and thresholds attached.
    """
    x = as_vector(x, feature_map.input_dim, "x")
    delta = as_vector(delta, feature_map.input_dim, "delta")
    if guides.m == 0:
        raise ArgumentError("the guide set is empty")
    if guides.features is None or guides.eta is None:
        raise ArgumentError("guide features and thresholds must be attached before evaluating the objective")
    if not (len(layers) == len(metrics) == len(guides.features) == len(guides.eta)):
        raise ArgumentError("layers, metrics, guide features and thresholds must have one entry per layer")

    x_hat = x + delta
    feats = feature_map.forward_layers(x_hat, layers)
    w = guides.weights
    loss = c * float(delta @ delta)
    upstreams: dict[str, np.ndarray] = {}

    for layer, metric, guide_feats, eta in zip(layers, metrics, guides.features, guides.eta):
        f = feats[layer]
        if guide_feats.shape[1] != f.shape[0]:
            raise ArgumentError(f"guide features at layer '{layer}' have width {guide_feats.shape[1]}, expected {f.shape[0]}")
        dist, jac = _layer_distances(metric, f, guide_feats)
        u = dist - (eta * eta if metric == Metric.EUCLIDEAN else eta)

        if kind == ObjectiveKind.RELU:
            h = w * u + delta_margin
            active = h > 0.0
            loss += float(np.sum(h[active]))
            coef = w * active
        else:
            clamped = np.clip(u, -SIGMOID_CLAMP, SIGMOID_CLAMP)
            s = 1.0 / (1.0 + np.exp(-clamped))
            loss += float(np.sum(w * s))
            coef = w * s * (1.0 - s) * (np.abs(u) < SIGMOID_CLAMP)

        upstream = coef @ jac
        upstreams[layer] = upstreams.get(layer, 0.0) + upstream

    grad = feature_map.vjp(x_hat, upstreams) + 2.0 * c * delta
    return loss, grad


def hinge_sum(
    x_hat: np.ndarray,
    guides: GuideSet,
    feature_map: FeatureMap,
    layers: Sequence[str],
    metrics: Sequence[Metric],
    delta_margin: float,
) -> float:
    """Hinge part of the relu objective at x_hat (no norm penalty)"""
    loss, _ = objective_and_grad(
        x_hat, np.zeros_like(x_hat), guides, feature_map, layers, metrics, 0.0, delta_margin, ObjectiveKind.RELU
    )
    return loss
