"""
Report Repository Interface
"""

from pathlib import Path
from typing import Protocol, Sequence

from app.domain.models.report import Report, SampleRecord


class ReportRepository(Protocol):
    """Report storage interface"""
    
    def write(self, report: Report, path: Path) -> None:
        """Write one JSON line per sample followed by the summary line"""
        ...
    
    def read(self, path: Path) -> Report:
        """Read a report written by write"""
        ...
    
    def write_adversarial_csv(self, records: Sequence[SampleRecord], path: Path) -> None:
        """Dump successful adversarial points as CSV rows"""
        ...
