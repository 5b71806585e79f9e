"""
Validators
Utility functions for array validation
"""

import numpy as np

from app.utils.exceptions import ArgumentError


def is_in_unit_box(values: np.ndarray) -> bool:
    """Check that every coordinate lies in [0, 1]"""
    if values.size == 0:
        return True
    return bool(np.all(values >= 0.0) and np.all(values <= 1.0))


def is_finite(values: np.ndarray) -> bool:
    """Check that no entry is NaN or infinite"""
    return bool(np.all(np.isfinite(values)))


def as_vector(x, dim: int, name: str = "x") -> np.ndarray:
    """Coerce input to a float64 vector of the given dimension"""
    vec = np.asarray(x, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise ArgumentError(f"{name} must be a vector of dimension {dim}, got shape {vec.shape}")
    return vec


def require_count(k: int, n: int, name: str = "k") -> None:
    """Validate a neighbor count against the number of reference points"""
    if k < 1:
        raise ArgumentError(f"{name} must be at least 1, got {k}")
    if k > n:
        raise ArgumentError(f"{name}={k} exceeds the number of training points ({n})")
