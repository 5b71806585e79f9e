"""
Report Models
Per-sample attack records and campaign aggregates
"""

import enum
import statistics
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np


class Method(str, enum.Enum):
    """Attack method of a campaign"""
    ATTACK = "attack"
    BASELINE = "baseline"
    ALL_TARGETS = "all_targets"
    ORACLE = "oracle"


@dataclass(eq=False)
class SampleRecord:
    """Outcome for one test sample"""
    index: int
    label: int
    success: bool
    norm: Optional[float] = None
    predicted: Optional[int] = None
    steps: int = 0
    restarts: int = 0
    originally_misclassified: bool = False
    error: Optional[str] = None
    wall_time: float = 0.0
    adv: Optional[np.ndarray] = field(default=None, repr=False)

    def to_fields(self, include_timing: bool = False) -> dict[str, Any]:
        """Serializable fields in their fixed report order"""
        fields = {
            "index": self.index,
            "label": self.label,
            "success": self.success,
            "norm": self.norm,
            "predicted": self.predicted,
            "steps": self.steps,
            "restarts": self.restarts,
            "originally_misclassified": self.originally_misclassified,
            "error": self.error,
        }
        if include_timing:
            fields["wall_time"] = self.wall_time
        return fields

    @classmethod
    def from_fields(cls, data: dict[str, Any]) -> "SampleRecord":
        return cls(
            index=int(data["index"]),
            label=int(data["label"]),
            success=bool(data["success"]),
            norm=None if data.get("norm") is None else float(data["norm"]),
            predicted=data.get("predicted"),
            steps=int(data.get("steps", 0)),
            restarts=int(data.get("restarts", 0)),
            originally_misclassified=bool(data.get("originally_misclassified", False)),
            error=data.get("error"),
            wall_time=float(data.get("wall_time", 0.0)),
        )


@dataclass
class Aggregates:
    """Campaign metrics; mean and median over successful samples only"""
    attacked: int
    successes: int
    success_rate: Optional[float]
    mean_norm: Optional[float]
    median_norm: Optional[float]
    errors: int = 0

    def to_fields(self) -> dict[str, Any]:
        return {
            "attacked": self.attacked,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "mean_norm": self.mean_norm,
            "median_norm": self.median_norm,
            "errors": self.errors,
        }


def compute_metrics(records: Sequence[SampleRecord]) -> Aggregates:
    """
    Aggregate sample records

    A success without a norm (an originally misclassified sample) counts as
    norm 0. Without any success the mean and median are absent.
    """
    norms = [0.0 if r.norm is None else r.norm for r in records if r.success]
    attacked = len(records)
    return Aggregates(
        attacked=attacked,
        successes=len(norms),
        success_rate=len(norms) / attacked if attacked else None,
        mean_norm=float(np.mean(norms)) if norms else None,
        median_norm=float(statistics.median(norms)) if norms else None,
        errors=sum(1 for r in records if r.error is not None),
    )


@dataclass(eq=False)
class Report:
    """Records and summary of one attack campaign"""
    method: Method
    records: list[SampleRecord]
    aggregates: Aggregates
    config: dict[str, Any] = field(default_factory=dict)
    toolkit_version: str = ""
    clean_accuracy: Optional[float] = None
    total_runtime: float = 0.0
    include_timing: bool = False

    def summary_fields(self) -> dict[str, Any]:
        fields: dict[str, Any] = {"method": self.method.value, "toolkit_version": self.toolkit_version}
        fields.update(self.aggregates.to_fields())
        fields["clean_accuracy"] = self.clean_accuracy
        if self.include_timing:
            fields["total_runtime"] = self.total_runtime
        fields["config"] = self.config
        return fields
