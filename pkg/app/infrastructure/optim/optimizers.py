"""
Gradient Optimizers
RMSprop (main attack) and Adam (baseline attack, network training)
"""

import numpy as np

from app.utils.exceptions import OptimizerError

NUMERIC_EPS = 1e-8


def _check_finite(grads: list[np.ndarray]) -> None:
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise OptimizerError("non-finite gradient")


class RMSprop:
    """
    RMSprop

    a <- decay * a + (1 - decay) * g^2
    p <- p - lr * g / sqrt(a + eps)
    """

    def __init__(self, learning_rate: float = 0.05, decay_rate: float = 0.99, epsilon: float = NUMERIC_EPS):
        if not 0.0 < decay_rate < 1.0:
            raise ValueError("decay_rate must lie in (0, 1)")
        self.learning_rate = learning_rate
        self.decay_rate = decay_rate
        self.epsilon = epsilon
        self.cache = None

    def update(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Update parameters in place"""
        _check_finite(grads)
        if self.cache is None:
            self.cache = [np.zeros_like(p) for p in params]

        for i in range(len(params)):
            self.cache[i] = self.decay_rate * self.cache[i] + (1 - self.decay_rate) * grads[i] ** 2
            params[i] -= self.learning_rate * grads[i] / np.sqrt(self.cache[i] + self.epsilon)


class Adam:
    """Adam with bias-corrected moment estimates"""

    def __init__(
        self,
        learning_rate: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = NUMERIC_EPS
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = None
        self.v = None
        self.t = 0

    def update(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Update parameters in place"""
        _check_finite(grads)
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]

        self.t += 1
        for i in range(len(params)):
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * grads[i]
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * grads[i] ** 2
            m_hat = self.m[i] / (1 - self.beta1 ** self.t)
            v_hat = self.v[i] / (1 - self.beta2 ** self.t)
            params[i] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)
