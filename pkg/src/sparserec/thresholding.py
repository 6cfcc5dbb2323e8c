"""Hard thresholding, top-k selection, restriction and index-set algebra.

Ties in magnitude are broken toward the smaller index, which makes ``H_k`` a
deterministic function of its input.
"""
from __future__ import annotations

import numpy as np

from .core import as_index_set, norm2

__all__ = [
    "top_k_indices",
    "hard_threshold",
    "restrict",
    "support",
    "union",
    "difference",
    "intersection",
    "symmetric_difference",
    "complement",
    "best_k_term_error",
]


def _check_k(k, n):
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")


def top_k_indices(z, k: int) -> np.ndarray:
    """Sorted indices of the ``k`` largest absolute entries of ``z``."""
    z = np.asarray(z, dtype=np.float64)
    _check_k(k, z.size)
    # stable sort on -|z| keeps the smaller index first among equal magnitudes
    order = np.argsort(-np.abs(z), kind="stable")
    return np.sort(order[:k])


def hard_threshold(z, k: int) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros_like(z)
    idx = top_k_indices(z, k)
    out[idx] = z[idx]
    return out


def restrict(v, S) -> np.ndarray:
    """Copy of ``v`` with every entry outside ``S`` set to zero."""
    v = np.asarray(v, dtype=np.float64)
    S = as_index_set(S, v.size)
    out = np.zeros_like(v)
    out[S] = v[S]
    return out


def support(v, tol: float = 0.0) -> np.ndarray:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return np.flatnonzero(np.abs(np.asarray(v, dtype=np.float64)) > tol).astype(np.int64)


def union(S, U) -> np.ndarray:
    return np.union1d(as_index_set(S), as_index_set(U)).astype(np.int64)


def difference(S, U) -> np.ndarray:
    return np.setdiff1d(as_index_set(S), as_index_set(U), assume_unique=True).astype(np.int64)


def intersection(S, U) -> np.ndarray:
    return np.intersect1d(as_index_set(S), as_index_set(U), assume_unique=True).astype(np.int64)


def symmetric_difference(S, U) -> np.ndarray:
    return np.setxor1d(as_index_set(S), as_index_set(U), assume_unique=True).astype(np.int64)


def complement(S, n: int) -> np.ndarray:
    return difference(np.arange(n), S)


def best_k_term_error(z, k: int) -> float:
    """Distance from ``z`` to its best k-term approximation."""
    z = np.asarray(z, dtype=np.float64)
    return norm2(z - hard_threshold(z, k))
