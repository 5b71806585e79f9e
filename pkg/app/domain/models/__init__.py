"""
Domain Models
"""

from app.domain.models.dataset import Dataset, LabeledPoint
from app.domain.models.vote import Neighbor, Vote
from app.domain.models.neighbor_index import Metric, NeighborIndex, SearchBackend
from app.domain.models.feature_map import FeatureMap, IdentityMap
from app.domain.models.mlp import Mlp
from app.domain.models.affine_map import AffineMap
from app.domain.models.knn_model import KnnModel, ModelKind
from app.domain.models.attack import AttackResult, AttackState, GuideSet
from app.domain.models.oracle import OracleResult, Qp, QpSolution
from app.domain.models.report import Aggregates, Method, Report, SampleRecord

__all__ = [
    "Dataset",
    "LabeledPoint",
    "Neighbor",
    "Vote",
    "Metric",
    "NeighborIndex",
    "SearchBackend",
    "FeatureMap",
    "IdentityMap",
    "Mlp",
    "AffineMap",
    "KnnModel",
    "ModelKind",
    "AttackResult",
    "AttackState",
    "GuideSet",
    "OracleResult",
    "Qp",
    "QpSolution",
    "Aggregates",
    "Method",
    "Report",
    "SampleRecord",
]
