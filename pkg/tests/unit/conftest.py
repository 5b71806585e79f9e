"""
Pytest configuration for unit tests
"""

import pytest

from tests.helpers.mock_helpers import (
    create_mock_dataset_repository,
    create_mock_model_repository,
    create_mock_report_repository,
)


@pytest.fixture
def mock_dataset_repo():
    """Mock dataset repository"""
    return create_mock_dataset_repository()


@pytest.fixture
def mock_model_repo():
    """Mock model repository"""
    return create_mock_model_repository()


@pytest.fixture
def mock_report_repo():
    """Mock report repository"""
    return create_mock_report_repository()
