"""Deterministic random sensing matrices, sparse signals and noise."""
from __future__ import annotations

import numpy as np

from .rng import Rng

__all__ = [
    "gen_gaussian_matrix",
    "gen_orthogonal_subset_matrix",
    "gen_sparse_signal",
    "gen_noise",
    "orthonormalize",
]


def gen_gaussian_matrix(m: int, n: int, seed: int, key=()) -> np.ndarray:
    """Entries i.i.d. normal with variance ``1/m``, filled row by row."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    return Rng(seed, key).normal(m * n).reshape(m, n) / np.sqrt(m)


def orthonormalize(G) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalisation pass per column."""
    Q = np.array(G, dtype=np.float64)
    for j in range(Q.shape[1]):
        v = Q[:, j]
        for _ in range(2):
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise np.linalg.LinAlgError("columns are linearly dependent")
        Q[:, j] = v / nrm
    return Q


def gen_orthogonal_subset_matrix(m: int, n: int, seed: int, key=(), flat: bool = False) -> np.ndarray:
    """``m`` rows of a random ``n x n`` orthogonal matrix, kept in their original order.

    The orthogonal matrix comes from orthonormalising a seeded Gaussian square
    matrix. With ``flat=True`` its first column is replaced by a random sign
    vector before orthonormalising and that direction is always among the
    dropped rows (requires ``m < n``). For ``m = n - 1`` this gives
    ``A^T A = I - s s^T / n`` with ``s`` a sign vector, hence ``delta_q = q / n``
    for every order ``q``.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if flat and m == n:
        raise ValueError("flat=True needs m < n")
    rng = Rng(seed, key)
    G = rng.normal(n * n).reshape(n, n)
    if not flat:
        return orthonormalize(G).T[rng.subset(n, m)]
    G[:, 0] = np.where(rng.uniform(n) < 0.5, -1.0, 1.0)
    rows = orthonormalize(G).T
    return rows[1:][rng.subset(n - 1, m)]


def gen_sparse_signal(n: int, k: int, seed: int, key=()) -> np.ndarray:
    """Exactly ``k`` standard-normal nonzeros on a uniformly random support."""
    rng = Rng(seed, key)
    x = np.zeros(n)
    S = rng.subset(n, k)
    x[S] = rng.normal(k)
    return x


def gen_noise(m: int, sigma: float, seed: int, key=()) -> np.ndarray:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return np.zeros(m)
    return sigma * Rng(seed, key).normal(m)
