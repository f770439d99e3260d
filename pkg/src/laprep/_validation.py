"""Input checks shared by the estimator and metrics."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array


def check_states(X, n_features: int | None = None, integer: bool = False) -> np.ndarray:
    """2-D array of states; a 1-D input is read as a column of state indices."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    X = check_array(X, dtype=np.int64 if integer else np.float64)
    if integer and not np.array_equal(X, np.asarray(X, dtype=np.int64)):
        raise ValueError("table backend expects integer state indices")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features per state, got {X.shape[1]}")
    return X


def check_pairs(X, integer: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Split transition rows ``[s, s']`` into their two halves."""
    X = check_array(X, dtype=np.int64 if integer else np.float64)
    if X.shape[1] % 2:
        raise ValueError("transition rows must have an even number of columns [s, s']")
    k = X.shape[1] // 2
    return X[:, :k], X[:, k:]


def check_table_pair(F: np.ndarray, G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    F = check_array(F, dtype=np.float64)
    G = check_array(G, dtype=np.float64)
    if F.shape != G.shape:
        raise ValueError(f"representation tables differ in shape: {F.shape} vs {G.shape}")
    return F, G
