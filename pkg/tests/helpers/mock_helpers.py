"""
Mock Helpers
Mock repositories for service tests
"""

from unittest.mock import Mock

from app.domain.repositories.dataset_repository import DatasetRepository
from app.domain.repositories.model_repository import ModelRepository
from app.domain.repositories.report_repository import ReportRepository


def create_mock_dataset_repository() -> Mock:
    """Create a mock dataset repository"""
    return Mock(spec=DatasetRepository)


def create_mock_model_repository() -> Mock:
    """Create a mock model repository"""
    return Mock(spec=ModelRepository)


def create_mock_report_repository() -> Mock:
    """Create a mock report repository"""
    return Mock(spec=ReportRepository)
