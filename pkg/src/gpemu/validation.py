"""Input validation helpers used by the estimators and simulators."""

from __future__ import annotations

import numpy as np


def as_points(X, n_dims: int | None = None, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a float64 ``(n, D)`` array of input points.

    A single point may be given as a 1-D array. Raises ``ValueError`` on
    non-finite entries or a dimension mismatch with ``n_dims``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array of points, got ndim={X.ndim}")
    if X.shape[1] < 1:
        raise ValueError(f"{name} must have at least one input dimension")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite coordinates")
    if n_dims is not None and X.shape[1] != n_dims:
        raise ValueError(
            f"{name} has {X.shape[1]} input dimensions, expected {n_dims}"
        )
    return X


def check_unit_cube(X, name: str = "X") -> np.ndarray:
    """Validate that every coordinate of ``X`` lies in [0, 1]."""
    X = as_points(X, name=name)
    if np.any(X < 0.0) or np.any(X > 1.0):
        bad = np.argwhere((X < 0.0) | (X > 1.0))[0]
        raise ValueError(
            f"{name}[{bad[0]}] has coordinate {X[tuple(bad)]} outside [0, 1]"
        )
    return X


def as_targets(y, n_points: int, name: str = "y") -> np.ndarray:
    """Coerce targets to a finite float64 vector of length ``n_points``."""
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != n_points:
        raise ValueError(f"{name} has length {y.shape[0]}, expected {n_points}")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"{name} contains non-finite values")
    return y


def as_binary_labels(t, n_points: int, name: str = "t") -> np.ndarray:
    """Coerce labels to an int vector over {-1, +1}."""
    t = np.asarray(t).ravel().astype(int)
    if t.shape[0] != n_points:
        raise ValueError(f"{name} has length {t.shape[0]}, expected {n_points}")
    if not np.all(np.isin(t, (-1, 1))):
        raise ValueError(f"{name} must take values in {{-1, +1}}")
    return t


def as_class_labels(k, n_points: int, name: str = "labels") -> np.ndarray:
    """Coerce labels to an int vector over the class alphabet {1, 2, 3}."""
    k = np.asarray(k).ravel().astype(int)
    if k.shape[0] != n_points:
        raise ValueError(f"{name} has length {k.shape[0]}, expected {n_points}")
    if not np.all(np.isin(k, (1, 2, 3))):
        raise ValueError(f"{name} must take values in {{1, 2, 3}}")
    return k
