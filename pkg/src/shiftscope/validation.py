"""Input validation helpers used across estimators and free functions."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue, NotFitted


def as_matrix(x, name="X", dtype=np.float64):
    """Coerce to a finite 2D float array, raising on NaN/Inf."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or infinite entries")
    return arr


def as_vector(x, name="x", dtype=np.float64):
    """Coerce to a finite 1D float array."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or infinite entries")
    return arr


def check_dim(arr, expected_dim, name="X"):
    """Verify the trailing dimension of a matrix or vector."""
    actual = arr.shape[-1]
    if actual != expected_dim:
        raise DimensionMismatch(
            f"{name} has dimension {actual}, expected {expected_dim}"
        )


def check_fitted(estimator, attribute):
    """Raise ``NotFitted`` unless *estimator* carries *attribute*."""
    if not hasattr(estimator, attribute):
        raise NotFitted(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )
