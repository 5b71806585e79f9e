"""
Dependency Injection
Factory functions wiring services to their repositories
"""

from app.application.factories.model_factory import ModelFactory
from app.application.services.dataset_service import DatasetService
from app.application.services.experiment_service import ExperimentService
from app.application.services.feature_service import FeatureService
from app.application.services.oracle_service import OracleService
from app.infrastructure.repositories.dataset_repository_impl import DatasetRepositoryImpl
from app.infrastructure.repositories.model_repository_impl import ModelRepositoryImpl
from app.infrastructure.repositories.report_repository_impl import ReportRepositoryImpl


def get_dataset_service() -> DatasetService:
    """Get dataset service instance"""
    return DatasetService(DatasetRepositoryImpl())


def get_model_repository() -> ModelRepositoryImpl:
    return ModelRepositoryImpl()


def get_feature_service() -> FeatureService:
    return FeatureService()


def get_oracle_service() -> OracleService:
    return OracleService()


def get_experiment_service() -> ExperimentService:
    """Get experiment service instance"""
    return ExperimentService(
        dataset_service=get_dataset_service(),
        model_factory=ModelFactory(get_model_repository()),
        report_repository=ReportRepositoryImpl(),
    )
