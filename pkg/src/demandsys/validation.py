"""Input validation helpers shared across the package.

Small, array-in / array-out checkers in the spirit of scikit-learn's
``check_array``: coerce to float ndarray, verify shape and finiteness,
raise a package exception naming the offending argument.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DataError, DimensionError

__all__ = [
    "check_matrix",
    "check_vector",
    "check_positive",
    "check_share_rows",
    "check_same_shape",
]


def check_matrix(x, name: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 2-D float array with finite entries."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if rows is not None and arr.shape[0] != rows:
        raise DimensionError(f"{name} must have {rows} rows, got {arr.shape[0]}")
    if cols is not None and arr.shape[1] != cols:
        raise DimensionError(f"{name} must have {cols} columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return arr


def check_vector(x, name: str, size: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 1-D float array with finite entries."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-dimensional, got ndim={arr.ndim}")
    if size is not None and arr.shape[0] != size:
        raise DimensionError(f"{name} must have length {size}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return arr


def check_positive(arr: np.ndarray, name: str) -> np.ndarray:
    """Require strictly positive entries."""
    if np.any(arr <= 0):
        bad = np.argwhere(arr <= 0)[0]
        raise DataError(f"{name} must be strictly positive; first violation at index {tuple(bad)}")
    return arr


def check_share_rows(shares: np.ndarray, name: str = "shares", tol: float = 1e-6) -> np.ndarray:
    """Require each row of ``shares`` to sum to 1 within ``tol``."""
    sums = shares.sum(axis=1)
    err = np.abs(sums - 1.0)
    if np.any(err > tol):
        t = int(np.argmax(err))
        raise DataError(f"{name} rows must sum to 1; row {t} sums to {sums[t]:.12g}")
    return shares


def check_same_shape(a: np.ndarray, b: np.ndarray, name_a: str, name_b: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{name_a} and {name_b} must have the same shape: {a.shape} vs {b.shape}")
