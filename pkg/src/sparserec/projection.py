"""Least squares restricted to a support, and extreme eigenvalues of small Grams."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import DimensionError, as_index_set, norm2

__all__ = [
    "ProjectionResult",
    "least_squares_on_support",
    "default_zero_tol",
    "jacobi_eigvalsh",
    "gram_eigen_extremes",
]


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    solution: np.ndarray
    residual: np.ndarray
    gradient: np.ndarray
    zero_set: np.ndarray
    zero_tol: float
    degenerate: bool
    rank: int


def default_zero_tol(A, y) -> float:
    return 1e-8 * (1.0 + norm2(A.T @ y))


def least_squares_on_support(A, y, support, zero_tol=None) -> ProjectionResult:
    """Minimise ``||y - A z||`` over vectors ``z`` supported in ``support``.

    The fit uses a Householder QR of the selected columns. If those columns are
    rank deficient (or there are more of them than rows) the minimum-norm
    least-squares solution is returned instead and ``degenerate`` is set.
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m, n = A.shape
    if y.shape != (m,):
        raise DimensionError(f"measurement vector has shape {y.shape}, expected ({m},)")
    L = as_index_set(support, n)
    if L.size == 0:
        raise ValueError("support must be nonempty")
    if zero_tol is None:
        zero_tol = default_zero_tol(A, y)

    AL = A[:, L]
    coef = None
    rank = L.size
    if L.size <= m:
        Q, R = np.linalg.qr(AL)
        d = np.abs(np.diag(R))
        if d.min() > max(m, L.size) * np.finfo(float).eps * d.max():
            coef = solve_triangular(R, Q.T @ y)
    degenerate = coef is None
    if degenerate:
        coef, _, rank, _ = np.linalg.lstsq(AL, y, rcond=None)

    solution = np.zeros(n)
    solution[L] = coef
    residual = y - A @ solution
    gradient = A.T @ residual
    zero_set = np.flatnonzero(np.abs(gradient) <= zero_tol).astype(np.int64)
    return ProjectionResult(solution, residual, gradient, zero_set, float(zero_tol), degenerate, int(rank))


def jacobi_eigvalsh(G, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of symmetric matrices by the cyclic Jacobi method.

    ``G`` may be a single ``(q, q)`` matrix or a stack ``(..., q, q)``; all
    matrices in the stack are rotated together. Sweeps stop once every
    off-diagonal Frobenius norm is below ``tol * max(1, ||G||_F)``.
    Eigenvalues are returned in ascending order along the last axis.
    """
    G = np.asarray(G, dtype=np.float64)
    if G.ndim < 2 or G.shape[-1] != G.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {G.shape}")
    lead = G.shape[:-2]
    q = G.shape[-1]
    a = G.reshape(-1, q, q).copy()
    a = 0.5 * (a + a.transpose(0, 2, 1))
    limit = tol * np.maximum(1.0, np.sqrt(np.sum(a * a, axis=(1, 2))))
    offdiag = ~np.eye(q, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a[:, offdiag] ** 2, axis=1))
        if np.all(off <= limit):
            break
        for p in range(q - 1):
            for r in range(p + 1, q):
                apr = a[:, p, r]
                active = apr != 0.0
                if not active.any():
                    continue
                safe = np.where(active, apr, 1.0)
                with np.errstate(over="ignore"):
                    # |theta| = inf gives t = 0, the correct limit
                    theta = (a[:, r, r] - a[:, p, p]) / (2.0 * safe)
                    t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc, ss = c[:, None], s[:, None]
                colp, colr = a[:, :, p].copy(), a[:, :, r]
                a[:, :, p] = cc * colp - ss * colr
                a[:, :, r] = ss * colp + cc * colr
                rowp, rowr = a[:, p, :].copy(), a[:, r, :]
                a[:, p, :] = cc * rowp - ss * rowr
                a[:, r, :] = ss * rowp + cc * rowr
                a[:, p, r] = 0.0
                a[:, r, p] = 0.0
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1)
    return w.reshape(lead + (q,))


def gram_eigen_extremes(A, S) -> tuple[float, float]:
    """Smallest and largest eigenvalue of ``A_S^T A_S``."""
    A = np.asarray(A, dtype=np.float64)
    S = as_index_set(S, A.shape[1])
    if S.size == 0:
        raise ValueError("support must be nonempty")
    AS = A[:, S]
    w = jacobi_eigvalsh(AS.T @ AS)
    return max(float(w[0]), 0.0), float(w[-1])
