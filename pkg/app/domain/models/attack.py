"""
Attack Models
Guide sets, optimization state and attack results
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class AttackMode(str, enum.Enum):
    """What counts as a successful perturbation"""
    UNTARGETED = "untargeted"
    TARGETED = "targeted"
    CREDIBILITY = "credibility"


class GuideHeuristic(str, enum.Enum):
    """Guide sample selection rule"""
    SW_SAME_CLASS = "sw_same_class"
    HALF_HALF = "half_half"


class ObjectiveKind(str, enum.Enum):
    """Threshold function applied to each guide term"""
    RELU = "relu"
    SIGMOID = "sigmoid"


class OptimizerKind(str, enum.Enum):
    RMSPROP = "rmsprop"
    ADAM = "adam"


@dataclass(eq=False)
class GuideSet:
    """Guide samples with their signs and the per-layer thresholds"""
    indices: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    adv_label: int
    eta: Optional[np.ndarray] = None
    features: Optional[list[np.ndarray]] = None

    @property
    def m(self) -> int:
        return int(self.indices.shape[0])

    def with_eta(self, eta) -> "GuideSet":
        return replace(self, eta=np.asarray(eta, dtype=np.float64))

    def with_features(self, layer_features) -> "GuideSet":
        """Attach guide feature rows, one (m, D_l) matrix per layer"""
        return replace(self, features=[np.asarray(f)[self.indices] for f in layer_features])


@dataclass(eq=False)
class AttackState:
    """Evolving state of one attack call"""
    x: np.ndarray
    c: float
    m: int
    best_delta: Optional[np.ndarray] = None
    best_adv: Optional[np.ndarray] = None
    best_norm: float = math.inf
    best_predicted: Optional[int] = None
    best_c: Optional[float] = None
    best_m: Optional[int] = None
    saved_norms: list[float] = field(default_factory=list)
    steps: int = 0
    restarts: int = 0

    def save_if_better(self, x_hat: np.ndarray, predicted: int) -> bool:
        """Keep x_hat when it is smaller than every earlier success"""
        delta = x_hat - self.x
        norm = float(np.linalg.norm(delta))
        if norm < self.best_norm:
            self.best_delta = delta
            self.best_adv = x_hat.copy()
            self.best_norm = norm
            self.best_predicted = predicted
            self.best_c = self.c
            self.best_m = self.m
            self.saved_norms.append(norm)
            return True
        return False

    @property
    def success(self) -> bool:
        return self.best_delta is not None


@dataclass(eq=False)
class AttackResult:
    """Outcome of one attack on one sample"""
    success: bool
    adv: Optional[np.ndarray]
    norm: Optional[float]
    steps: int
    restarts: int
    wall_time: float = 0.0
    predicted: Optional[int] = None
    c: Optional[float] = None
    m: Optional[int] = None
    saved_norms: list[float] = field(default_factory=list)

    @classmethod
    def failure(cls, steps: int = 0, restarts: int = 0, wall_time: float = 0.0) -> "AttackResult":
        return cls(success=False, adv=None, norm=None, steps=steps, restarts=restarts, wall_time=wall_time)

    def same_outcome(self, other: "AttackResult") -> bool:
        """Equality on everything except wall time"""
        if (self.success, self.norm, self.steps, self.restarts, self.predicted, self.c, self.m) != (
            other.success, other.norm, other.steps, other.restarts, other.predicted, other.c, other.m
        ):
            return False
        if self.adv is None or other.adv is None:
            return self.adv is None and other.adv is None
        return bool(np.array_equal(self.adv, other.adv))
