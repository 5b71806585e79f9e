"""
Report Repository Implementation
JSON-lines reports with a fixed field order and 17-significant-digit floats
"""

import csv
import enum
import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from app.domain.models.report import Aggregates, Method, Report, SampleRecord
from app.domain.repositories.report_repository import ReportRepository
from app.utils.exceptions import DatasetFormatError, NotFoundError

SAMPLE = "sample"
SUMMARY = "summary"


def render(value: Any) -> str:
    """
    JSON text for value

    Floats use 17 significant digits and dictionaries keep insertion order, so
    equal reports serialize to identical bytes. Non-finite floats become null.
    """
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return render(value.value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return format(value, ".17g") if math.isfinite(value) else "null"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {render(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(render(v) for v in value) + "]"
    raise TypeError(f"Cannot render {type(value).__name__}")


def render_line(kind: str, fields: dict[str, Any]) -> str:
    return render({"type": kind, **fields})


class ReportRepositoryImpl(ReportRepository):
    """File-based report repository"""

    def write(self, report: Report, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for record in report.records:
                f.write(render_line(SAMPLE, record.to_fields(report.include_timing)) + "\n")
            f.write(render_line(SUMMARY, report.summary_fields()) + "\n")

    def read(self, path: Path) -> Report:
        path = Path(path)
        if not path.is_file():
            raise NotFoundError(f"File not found: {path}")

        records: list[SampleRecord] = []
        summary = None
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as e:
                    raise DatasetFormatError(f"{path}:{line_no}: {e}") from e
                kind = data.pop("type", None)
                if kind == SAMPLE:
                    if summary is not None:
                        raise DatasetFormatError(f"{path}:{line_no}: sample after the summary line")
                    records.append(SampleRecord.from_fields(data))
                elif kind == SUMMARY:
                    summary = data
                else:
                    raise DatasetFormatError(f"{path}:{line_no}: unknown record type {kind!r}")

        if summary is None:
            raise DatasetFormatError(f"{path}: no summary line")

        aggregates = Aggregates(
            attacked=int(summary["attacked"]),
            successes=int(summary["successes"]),
            success_rate=summary.get("success_rate"),
            mean_norm=summary.get("mean_norm"),
            median_norm=summary.get("median_norm"),
            errors=int(summary.get("errors", 0)),
        )
        return Report(
            method=Method(summary["method"]),
            records=records,
            aggregates=aggregates,
            config=summary.get("config", {}),
            toolkit_version=summary.get("toolkit_version", ""),
            clean_accuracy=summary.get("clean_accuracy"),
            total_runtime=float(summary.get("total_runtime", 0.0)),
            include_timing="total_runtime" in summary,
        )

    def write_adversarial_csv(self, records: Sequence[SampleRecord], path: Path) -> None:
        """Rows of index, label, predicted, then the adversarial features"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            for record in records:
                if not record.success or record.adv is None:
                    continue
                writer.writerow(
                    [record.index, record.label, record.predicted] + [format(v, ".17g") for v in record.adv]
                )
