"""
Oracle Models
Quadratic programs over neighbor cells and the exact attack result
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.utils.exceptions import ArgumentError


@dataclass(eq=False)
class Qp:
    """min |z - x|^2 subject to A z <= b, optionally inside [0, 1]^d"""
    x: np.ndarray
    A: np.ndarray
    b: np.ndarray
    box: bool = False

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64).reshape(-1)
        d = self.x.shape[0]
        self.A = np.asarray(self.A, dtype=np.float64).reshape(-1, d)
        self.b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if self.A.shape[0] != self.b.shape[0]:
            raise ArgumentError("A and b must have the same number of rows")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b))):
            raise ArgumentError("QP data must be finite")

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def rows(self) -> tuple[np.ndarray, np.ndarray]:
        """All constraint rows, box faces included"""
        if not self.box:
            return self.A, self.b
        eye = np.eye(self.dim)
        A = np.vstack([self.A, eye, -eye])
        b = np.concatenate([self.b, np.ones(self.dim), np.zeros(self.dim)])
        return A, b


@dataclass(eq=False)
class QpSolution:
    feasible: bool
    z: Optional[np.ndarray] = None
    norm: Optional[float] = None
    multipliers: Optional[np.ndarray] = None
    stationarity: float = 0.0
    feasibility: float = 0.0
    complementarity: float = 0.0

    @property
    def kkt_residual(self) -> float:
        return max(self.stationarity, self.feasibility, self.complementarity)

    @classmethod
    def infeasible(cls) -> "QpSolution":
        return cls(feasible=False)


@dataclass(eq=False)
class OracleResult:
    """Exact minimum-norm attack on a plain kNN"""
    success: bool
    norm: Optional[float] = None
    z: Optional[np.ndarray] = None
    adv: Optional[np.ndarray] = None
    subset: tuple[int, ...] = ()
    cells_solved: int = 0
    infeasible_cells: int = 0
    cells_pruned: int = 0
    max_kkt_residual: float = 0.0
    predicted: Optional[int] = None
    wall_time: float = 0.0
    residuals: list[float] = field(default_factory=list)
