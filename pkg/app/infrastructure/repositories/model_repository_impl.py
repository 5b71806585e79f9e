"""
Model Repository Implementation
JSON storage for networks ("mlp-v1") and affine maps ("affine-v1")
"""

import json
from pathlib import Path
from typing import Optional

import numpy as np

from app.domain.models.affine_map import AffineMap
from app.domain.models.mlp import Mlp
from app.domain.repositories.model_repository import ModelRepository
from app.utils.exceptions import DatasetFormatError, NotFoundError

MLP_VERSION = "mlp-v1"
AFFINE_VERSION = "affine-v1"


def _read_json(path: Path, version: str) -> dict:
    path = Path(path)
    if not path.is_file():
        raise NotFoundError(f"File not found: {path}")
    with open(path, encoding="utf-8") as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(f"{path}: {e}") from e
    if payload.get("version") != version:
        raise DatasetFormatError(f"{path}: expected version '{version}', found '{payload.get('version')}'")
    return payload


def _write_json(payload: dict, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)
        f.write("\n")


class ModelRepositoryImpl(ModelRepository):
    """File-based feature-map repository"""

    def save_mlp(self, mlp: Mlp, path: Path) -> None:
        _write_json(
            {
                "version": MLP_VERSION,
                "widths": mlp.widths,
                "weights": [w.tolist() for w in mlp.weights],
                "biases": [b.tolist() for b in mlp.biases],
                "train_accuracy": mlp.train_accuracy,
            },
            path,
        )

    def load_mlp(self, path: Path) -> Mlp:
        payload = _read_json(path, MLP_VERSION)
        mlp = Mlp(
            weights=[np.array(w, dtype=np.float64) for w in payload["weights"]],
            biases=[np.array(b, dtype=np.float64) for b in payload["biases"]],
            train_accuracy=payload.get("train_accuracy"),
        )
        if mlp.widths != list(payload["widths"]):
            raise DatasetFormatError(f"{path}: widths {payload['widths']} do not match the stored parameters")
        return mlp

    def save_affine(self, affine: AffineMap, path: Path) -> None:
        _write_json(
            {
                "version": AFFINE_VERSION,
                "A": affine.A.tolist(),
                "mu": affine.mu.tolist(),
                "pool": affine.pool,
                "source_layers": list(affine.source_layers),
                "input_width": affine.input_dim,
                "uses_network": affine.mlp is not None,
            },
            path,
        )

    def load_affine(self, path: Path, mlp: Optional[Mlp] = None) -> AffineMap:
        payload = _read_json(path, AFFINE_VERSION)
        if payload.get("uses_network") and mlp is None:
            raise DatasetFormatError(f"{path}: this affine map was fitted on a network; pass it in")
        return AffineMap(
            A=np.array(payload["A"], dtype=np.float64),
            mu=np.array(payload["mu"], dtype=np.float64),
            pool=int(payload["pool"]),
            source_layers=tuple(payload["source_layers"]),
            mlp=mlp if payload.get("uses_network") else None,
            input_width=int(payload["input_width"]),
        )
