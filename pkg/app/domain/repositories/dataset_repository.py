"""
Dataset Repository Interface
"""

from pathlib import Path
from typing import Optional, Protocol

from app.domain.models.dataset import Dataset


class DatasetRepository(Protocol):
    """Dataset storage interface"""
    
    def load_idx(self, images_path: Path, labels_path: Path, scale: bool = True) -> Dataset:
        """Load an IDX image/label file pair"""
        ...
    
    def load_csv(self, path: Path, num_classes: Optional[int] = None) -> Dataset:
        """Load rows of features followed by an integer label"""
        ...
    
    def write_csv(self, ds: Dataset, path: Path) -> None:
        """Write a dataset in the format read by load_csv"""
        ...
