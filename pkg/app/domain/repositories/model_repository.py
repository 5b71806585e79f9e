"""
Model Repository Interface
"""

from pathlib import Path
from typing import Optional, Protocol

from app.domain.models.affine_map import AffineMap
from app.domain.models.mlp import Mlp


class ModelRepository(Protocol):
    """Feature-map storage interface"""
    
    def save_mlp(self, mlp: Mlp, path: Path) -> None:
        """Write network parameters"""
        ...
    
    def load_mlp(self, path: Path) -> Mlp:
        """Read network parameters"""
        ...
    
    def save_affine(self, affine: AffineMap, path: Path) -> None:
        """Write projection, mean, pooling and source layers"""
        ...
    
    def load_affine(self, path: Path, mlp: Optional[Mlp] = None) -> AffineMap:
        """Read an affine map, attaching the network it was fitted on"""
        ...
