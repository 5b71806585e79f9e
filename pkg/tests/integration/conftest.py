"""
Pytest configuration for integration tests
"""

import os
from pathlib import Path

import pytest

MNIST_DIR_ENV = "KNNADV_MNIST_DIR"


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    """IDX directory; MNIST checks are skipped without it"""
    value = os.environ.get(MNIST_DIR_ENV)
    if not value:
        pytest.skip(f"set {MNIST_DIR_ENV} to run MNIST checks")
    path = Path(value)
    if not path.is_dir():
        pytest.skip(f"{MNIST_DIR_ENV}={value} is not a directory")
    return path
