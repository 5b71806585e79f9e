"""
Model Factory
Builds kNN models from model specs
"""

import logging

from app.domain.models.affine_map import AffineMap
from app.domain.models.dataset import Dataset
from app.domain.models.knn_model import KnnModel, ModelKind
from app.domain.models.neighbor_index import Metric
from app.domain.repositories.model_repository import ModelRepository
from app.schemas.experiment import ModelSpec
from app.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


class ModelFactory:
    """Factory for kNN models"""

    def __init__(self, model_repository: ModelRepository):
        self.model_repository = model_repository

    def build(self, spec: ModelSpec, train: Dataset) -> KnnModel:
        metric = spec.metric
        if spec.kind == ModelKind.PLAIN:
            if isinstance(metric, list):
                if len(metric) != 1:
                    raise ConfigError("a plain kNN takes a single metric")
                metric = metric[0]
            model = KnnModel.plain(train, spec.k, Metric(metric), spec.backend)

        elif spec.kind in (ModelKind.DEEP, ModelKind.SINGLE_LAYER):
            mlp = self.model_repository.load_mlp(spec.mlp_path)
            if spec.layers:
                layers = tuple(spec.layers)
            elif spec.kind == ModelKind.DEEP:
                layers = mlp.hidden_layers
            else:
                layers = (mlp.penultimate_layer,)
            if spec.kind == ModelKind.SINGLE_LAYER and len(layers) != 1:
                raise ConfigError("a single-layer model takes exactly one layer")
            model = KnnModel(train, mlp, layers, spec.k, metric, spec.backend)

        else:
            mlp = self.model_repository.load_mlp(spec.mlp_path) if spec.mlp_path is not None else None
            affine = self.model_repository.load_affine(spec.affine_path, mlp)
            model = KnnModel(train, affine, (AffineMap.LAYER,), spec.k, metric, spec.backend)

        logger.info(
            "Built %s kNN (k=%d, layers=%s) over %d training samples",
            spec.kind.value, spec.k, ",".join(model.layers), len(train),
        )
        return model
