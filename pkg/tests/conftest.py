"""
Global pytest configuration
Common fixtures available to all tests
"""

import numpy as np
import pytest

from tests.helpers.fixture_helpers import (  # noqa: F401
    blobs,
    small_mlp,
    ten_point_dataset,
    three_class_blobs,
    two_point_dataset,
    two_point_model,
)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator"""
    return np.random.default_rng(1234)
