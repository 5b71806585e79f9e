"""
Attack Schemas
Pydantic models for attack hyperparameters
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domain.models.attack import AttackMode, GuideHeuristic, ObjectiveKind, OptimizerKind


def default_guide_count(k: int) -> int:
    """Smallest even guide count covering k neighbors"""
    return k if k % 2 == 0 else k + 1


class AttackConfig(BaseModel):
    """All hyperparameters of one attack"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    k: int = Field(default=1, ge=1, description="Neighbors used by the attacked kNN")
    m: Optional[int] = Field(default=None, ge=1, description="Guide count; defaults to k (even k) or k+1")
    p: int = Field(default=20, ge=1, description="Guide and threshold refresh period in steps")
    q: int = Field(default=3, ge=0, description="Restarts from nearby wrong-class training points")
    delta_margin: float = Field(default=1e-5, ge=0.0)
    max_steps: int = Field(default=500, ge=0)
    lr: float = Field(default=0.05, gt=0.0)
    rms_decay: float = Field(default=0.99, gt=0.0, lt=1.0)
    adam_beta1: float = Field(default=0.9, gt=0.0, lt=1.0)
    adam_beta2: float = Field(default=0.999, gt=0.0, lt=1.0)
    bs_steps: int = Field(default=5, ge=1)
    c_init: float = Field(default=1.0, gt=0.0)
    c_lo: float = Field(default=1e-3, gt=0.0)
    c_hi: float = Field(default=1e3, gt=0.0)
    init_noise_std: float = Field(default=0.1, ge=0.0)
    check_period: int = Field(default=20, ge=1)
    mode: AttackMode = AttackMode.UNTARGETED
    target: Optional[int] = Field(default=None, ge=0)
    min_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    guide_heuristic: GuideHeuristic = GuideHeuristic.HALF_HALF
    objective: ObjectiveKind = ObjectiveKind.RELU
    optimizer: OptimizerKind = OptimizerKind.RMSPROP
    seed: int = 0

    @model_validator(mode="after")
    def validate_invariants(self) -> "AttackConfig":
        if self.m is None:
            object.__setattr__(self, "m", default_guide_count(self.k))
        if self.guide_heuristic == GuideHeuristic.HALF_HALF:
            if self.m % 2:
                raise ValueError(f"half_half guide selection needs an even m, got {self.m}")
            if self.m < self.m_floor:
                raise ValueError(f"m={self.m} is below its floor {self.m_floor} for k={self.k}")
        if self.objective == ObjectiveKind.RELU and self.delta_margin <= 0.0:
            raise ValueError("delta_margin must be positive for the relu objective")
        if not self.c_lo < self.c_hi:
            raise ValueError("c_lo must be smaller than c_hi")
        if not self.c_lo <= self.c_init <= self.c_hi:
            raise ValueError("c_init must lie in [c_lo, c_hi]")
        if self.mode == AttackMode.TARGETED and self.target is None:
            raise ValueError("targeted mode needs a target label")
        return self

    def with_updates(self, **changes) -> "AttackConfig":
        """Validated copy with some fields replaced"""
        data = self.model_dump()
        data.update(changes)
        return AttackConfig(**data)

    @property
    def m_floor(self) -> int:
        """Lower bound of the guide-count reduction"""
        if self.guide_heuristic == GuideHeuristic.HALF_HALF:
            return default_guide_count(self.k)
        return self.k
