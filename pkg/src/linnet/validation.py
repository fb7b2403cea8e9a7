"""Input validation helpers shared by the public entry points.

All solvers treat arrays as immutable values: inputs are copied into fresh
float64 arrays here and never written to afterwards.
"""

import numpy as np

from .exceptions import DimMismatch


def as_matrix(x, name: str = "a") -> np.ndarray:
    """Coerce to a 2-d float64 array with finite entries."""
    a = np.array(x, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={a.ndim}")
    if a.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must have finite entries")
    return a


def as_vector(x, name: str = "b") -> np.ndarray:
    """Coerce to a 1-d float64 array with finite entries.

    A single-column or single-row 2-d array is accepted and flattened.
    """
    v = np.array(x, dtype=float)
    if v.ndim == 2 and 1 in v.shape:
        v = v.reshape(-1)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={v.ndim}")
    if v.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must have finite entries")
    return v


def check_system(a: np.ndarray, b: np.ndarray) -> None:
    """Require len(b) == number of rows of a."""
    if b.shape[0] != a.shape[0]:
        raise DimMismatch(
            f"right-hand side has length {b.shape[0]}, expected {a.shape[0]}"
        )


def check_square(a: np.ndarray, name: str = "a") -> None:
    if a.shape[0] != a.shape[1]:
        raise DimMismatch(f"{name} must be square, got shape {a.shape}")


def as_start_vector(x0, n: int, name: str = "x0") -> np.ndarray:
    """Default start/prior vector: zeros(n) when x0 is None."""
    if x0 is None:
        return np.zeros(n)
    v = as_vector(x0, name)
    if v.shape[0] != n:
        raise DimMismatch(f"{name} has length {v.shape[0]}, expected {n}")
    return v
