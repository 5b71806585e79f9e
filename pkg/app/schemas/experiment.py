"""
Experiment Schemas
Pydantic models for experiment configuration files
"""

import enum
from pathlib import Path
from typing import Any, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.domain.models.knn_model import ModelKind
from app.domain.models.neighbor_index import Metric, SearchBackend
from app.domain.models.report import Method
from app.schemas.attack import AttackConfig


class DatasetKind(str, enum.Enum):
    CSV = "csv"
    IDX = "idx"
    BLOBS = "blobs"
    MOONS = "moons"


class DatasetSpec(BaseModel):
    """Where the training and test sets come from"""

    model_config = ConfigDict(extra="forbid")

    kind: DatasetKind
    # csv
    train_path: Optional[Path] = None
    test_path: Optional[Path] = None
    # idx
    train_images: Optional[Path] = None
    train_labels: Optional[Path] = None
    test_images: Optional[Path] = None
    test_labels: Optional[Path] = None
    # class filtering for file datasets
    classes: Optional[List[int]] = Field(default=None, description="Two labels to keep, relabeled to 0 and 1")
    train_per_class: Optional[int] = Field(default=None, ge=1)
    test_per_class: Optional[int] = Field(default=None, ge=1)
    # synthetic
    centers: Optional[List[List[float]]] = None
    std: float = Field(default=0.1, ge=0.0)
    noise: float = Field(default=0.1, ge=0.0)
    per_class: int = Field(default=20, ge=1)
    test_size: int = Field(default=10, ge=1, description="Synthetic test samples per class")
    seed: int = 0

    @model_validator(mode="after")
    def validate_kind(self) -> "DatasetSpec":
        if self.kind == DatasetKind.CSV and (self.train_path is None or self.test_path is None):
            raise ValueError("csv datasets need train_path and test_path")
        if self.kind == DatasetKind.IDX and None in (
            self.train_images, self.train_labels, self.test_images, self.test_labels
        ):
            raise ValueError("idx datasets need train_images, train_labels, test_images and test_labels")
        if self.kind == DatasetKind.BLOBS and not self.centers:
            raise ValueError("blobs datasets need centers")
        if self.classes is not None and (len(self.classes) != 2 or self.classes[0] == self.classes[1]):
            raise ValueError("classes must name two different labels")
        if self.classes is not None and self.train_per_class is None:
            raise ValueError("train_per_class is required with classes")
        return self

    def referenced_files(self) -> list[Path]:
        paths = [self.train_path, self.test_path, self.train_images, self.train_labels, self.test_images, self.test_labels]
        return [p for p in paths if p is not None]


class ModelSpec(BaseModel):
    """kNN model over the training set"""

    model_config = ConfigDict(extra="forbid")

    kind: ModelKind = ModelKind.PLAIN
    k: int = Field(default=1, ge=1)
    metric: Union[Metric, List[Metric]] = Metric.EUCLIDEAN
    layers: Optional[List[str]] = Field(default=None, description="Network layers; deep defaults to all hidden layers")
    mlp_path: Optional[Path] = None
    affine_path: Optional[Path] = None
    backend: SearchBackend = SearchBackend.LINEAR

    @model_validator(mode="after")
    def validate_sources(self) -> "ModelSpec":
        if self.kind in (ModelKind.DEEP, ModelKind.SINGLE_LAYER) and self.mlp_path is None:
            raise ValueError(f"{self.kind.value} models need mlp_path")
        if self.kind == ModelKind.AFFINE and self.affine_path is None:
            raise ValueError("affine models need affine_path")
        return self

    def referenced_files(self) -> list[Path]:
        return [p for p in (self.mlp_path, self.affine_path) if p is not None]


class AttackSpec(BaseModel):
    """Which attack runs and with what parameters"""

    model_config = ConfigDict(extra="forbid")

    method: Method = Method.ATTACK
    params: AttackConfig = Field(default_factory=AttackConfig)
    oracle_box: bool = False


class SelectionSpec(BaseModel):
    """Test samples to attack"""

    model_config = ConfigDict(extra="forbid")

    count: Optional[int] = Field(default=None, ge=1, description="First count eligible samples; all when absent")
    correct_only: bool = Field(default=False, description="Attack only samples the model classifies correctly")


class ReportSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    include_timing: bool = False
    dump_adv: Optional[Path] = None


class ExperimentConfig(BaseModel):
    """One attack campaign"""

    model_config = ConfigDict(extra="forbid")

    dataset: DatasetSpec
    model: ModelSpec = Field(default_factory=ModelSpec)
    attack: AttackSpec = Field(default_factory=AttackSpec)
    selection: SelectionSpec = Field(default_factory=SelectionSpec)
    report: ReportSpec = Field(default_factory=ReportSpec)
    seed: int = 0
    workers: Optional[int] = Field(default=None, ge=1)
    output: Optional[Path] = None

    @model_validator(mode="before")
    @classmethod
    def default_attack_k(cls, data: Any) -> Any:
        """Attack parameters inherit k from the model unless set"""
        if not isinstance(data, dict):
            return data
        model = data.get("model") or {}
        attack = data.get("attack")
        if isinstance(model, dict) and isinstance(attack, dict):
            params = attack.get("params")
            if isinstance(params, dict) and "k" not in params and "k" in model:
                attack = {**attack, "params": {**params, "k": model["k"]}}
                data = {**data, "attack": attack}
            elif params is None and "k" in model:
                data = {**data, "attack": {**attack, "params": {"k": model["k"]}}}
        elif isinstance(model, dict) and attack is None and "k" in model:
            data = {**data, "attack": {"params": {"k": model["k"]}}}
        return data

    @field_validator("output")
    @classmethod
    def validate_output(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and v.suffix == "":
            raise ValueError("output must be a file path")
        return v

    @model_validator(mode="after")
    def validate_consistency(self) -> "ExperimentConfig":
        if self.attack.params.k != self.model.k:
            raise ValueError(f"attack k={self.attack.params.k} differs from model k={self.model.k}")
        if self.attack.method == Method.ORACLE and self.model.kind != ModelKind.PLAIN:
            raise ValueError("the exact oracle only supports plain kNN models")
        return self

    def referenced_files(self) -> list[Path]:
        return self.dataset.referenced_files() + self.model.referenced_files()
