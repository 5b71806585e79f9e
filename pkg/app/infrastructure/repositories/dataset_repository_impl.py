"""
Dataset Repository Implementation
IDX (MNIST layout) and CSV file storage
"""

import csv
import gzip
import logging
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from app.domain.models.dataset import Dataset
from app.domain.repositories.dataset_repository import DatasetRepository
from app.utils.exceptions import (
    DatasetConsistencyError,
    DatasetFormatError,
    DatasetIOError,
    EmptyDatasetError,
    NotFoundError,
    ValidationError,
)

logger = logging.getLogger(__name__)

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


def _read_bytes(path: Path) -> bytes:
    path = Path(path)
    if not path.is_file():
        raise NotFoundError(f"File not found: {path}")
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        return f.read()


def _unpack_header(data: bytes, fields: int, path: Path) -> tuple[int, ...]:
    size = 4 * fields
    if len(data) < size:
        raise DatasetIOError(f"{path}: truncated header ({len(data)} bytes)")
    return struct.unpack(f">{fields}I", data[:size])


class DatasetRepositoryImpl(DatasetRepository):
    """File-based dataset repository"""

    def load_idx(self, images_path: Path, labels_path: Path, scale: bool = True) -> Dataset:
        """Load big-endian IDX images (magic 0x803) and labels (magic 0x801)"""
        image_data = _read_bytes(images_path)
        label_data = _read_bytes(labels_path)

        (image_magic,) = _unpack_header(image_data, 1, images_path)
        if image_magic != IDX_IMAGE_MAGIC:
            raise DatasetFormatError(f"{images_path}: bad image magic 0x{image_magic:08x}")
        (label_magic,) = _unpack_header(label_data, 1, labels_path)
        if label_magic != IDX_LABEL_MAGIC:
            raise DatasetFormatError(f"{labels_path}: bad label magic 0x{label_magic:08x}")

        _, count, rows, cols = _unpack_header(image_data, 4, images_path)
        _, label_count = _unpack_header(label_data, 2, labels_path)
        if count != label_count:
            raise DatasetConsistencyError(f"{count} images but {label_count} labels")

        dim = rows * cols
        pixels = np.frombuffer(image_data, dtype=np.uint8, offset=16)
        if pixels.shape[0] < count * dim:
            raise DatasetIOError(f"{images_path}: expected {count * dim} pixels, found {pixels.shape[0]}")
        labels = np.frombuffer(label_data, dtype=np.uint8, offset=8)
        if labels.shape[0] < count:
            raise DatasetIOError(f"{labels_path}: expected {count} labels, found {labels.shape[0]}")

        features = pixels[: count * dim].reshape(count, dim).astype(np.float64)
        if scale:
            features /= 255.0
        labels = labels[:count].astype(np.int64)
        num_classes = int(labels.max()) + 1 if count else 1

        logger.info("Loaded %d IDX samples of dimension %d from %s", count, dim, images_path)
        return Dataset(features=features, labels=labels, num_classes=num_classes)

    def load_csv(self, path: Path, num_classes: Optional[int] = None) -> Dataset:
        """Load comma-separated rows: d features then an integer label"""
        path = Path(path)
        if not path.is_file():
            raise NotFoundError(f"File not found: {path}")

        features: list[list[float]] = []
        labels: list[int] = []
        width: Optional[int] = None
        with open(path, newline="", encoding="utf-8") as f:
            for line_no, row in enumerate(csv.reader(f), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if width is None:
                    width = len(row)
                    if width < 2:
                        raise ValidationError(f"{path}:{line_no}: a row needs features and a label")
                elif len(row) != width:
                    raise ValidationError(f"{path}:{line_no}: expected {width} cells, found {len(row)}")
                try:
                    features.append([float(cell) for cell in row[:-1]])
                    labels.append(int(row[-1]))
                except ValueError as e:
                    raise DatasetFormatError(f"{path}:{line_no}: {e}") from e

        if not features:
            raise EmptyDatasetError(f"{path}: no rows")

        feature_array = np.array(features, dtype=np.float64)
        if not np.all((feature_array >= 0.0) & (feature_array <= 1.0)):
            raise ValidationError(f"{path}: features must lie in [0, 1]")
        label_array = np.array(labels, dtype=np.int64)
        if label_array.min() < 0:
            raise ValidationError(f"{path}: labels must be non-negative")

        classes = int(label_array.max()) + 1
        if num_classes is not None:
            if num_classes < classes:
                raise ValidationError(f"{path}: label {classes - 1} exceeds num_classes={num_classes}")
            classes = num_classes
        return Dataset(features=feature_array, labels=label_array, num_classes=classes)

    def write_csv(self, ds: Dataset, path: Path) -> None:
        """Write rows with 17 significant digits per feature"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            for x, y in zip(ds.features, ds.labels):
                writer.writerow([format(v, ".17g") for v in x] + [int(y)])
