"""Exact restricted isometry constants by support enumeration.

The RIC of order q is the largest deviation from 1 of any eigenvalue of a
q-column Gram submatrix. Computing it is combinatorial, so ``ric_exact``
refuses to run past an explicit enumeration budget rather than silently
approximating.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import BoundCheck, as_index_set, as_matrix, norm2
from .projection import jacobi_eigvalsh
from .thresholding import intersection, restrict, support, union

__all__ = [
    "RicEstimate",
    "BudgetExceededError",
    "ric_exact",
    "check_rip_inequality_i",
    "check_rip_inequality_ii",
    "check_rip_inequality_iii",
    "measurement_bound",
    "gaussian_measurement_count",
    "rip_order",
]

DEFAULT_BUDGET = 10**6
_CHUNK = 4096


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class RicEstimate:
    order: int
    delta: float
    supports_enumerated: int
    argmax_support: np.ndarray
    lambda_min: float
    lambda_max: float

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "delta": self.delta,
            "supports_enumerated": self.supports_enumerated,
            "argmax_support": [int(i) for i in self.argmax_support],
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
        }


def _chunks(n, q):
    it = itertools.combinations(range(n), q)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def ric_exact(A, q: int, budget: int = DEFAULT_BUDGET) -> RicEstimate:
    """Exact ``delta_q(A)`` over all ``C(n, q)`` supports, in lexicographic order.

    Among supports attaining the maximum, the lexicographically first one is
    reported.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if not 1 <= q <= n:
        raise ValueError(f"order q must lie in [1, {n}], got {q}")
    total = math.comb(n, q)
    if total > budget:
        raise BudgetExceededError(
            f"C({n},{q}) = {total} supports exceeds the enumeration budget {budget}; reduce n or q"
        )
    gram = A.T @ A
    best = -np.inf
    best_support = None
    best_pair = (0.0, 0.0)
    for idx in _chunks(n, q):
        sub = gram[idx[:, :, None], idx[:, None, :]]
        w = jacobi_eigvalsh(sub)
        lmin = np.maximum(w[:, 0], 0.0)
        lmax = w[:, -1]
        dev = np.maximum(lmax - 1.0, 1.0 - lmin)
        j = int(np.argmax(dev))
        # strict '>' keeps the first attaining support across chunks
        if dev[j] > best:
            best = float(dev[j])
            best_support = idx[j].copy()
            best_pair = (float(lmin[j]), float(lmax[j]))
    return RicEstimate(q, max(best, 0.0), total, best_support, *best_pair)


def check_rip_inequality_i(A, u, v, delta: float, atol: float = 1e-10) -> BoundCheck:
    """``|u^T A^T A v| <= delta * ||u|| ||v||`` for disjointly supported ``u``, ``v``."""
    A = np.asarray(A, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if intersection(support(u), support(v)).size:
        raise ValueError("u and v must have disjoint supports")
    lhs = abs(float((A @ u) @ (A @ v)))
    return BoundCheck.absolute(lhs, delta * norm2(u) * norm2(v), "rip-i", atol)


def check_rip_inequality_ii(A, v, S, delta: float, atol: float = 1e-10) -> BoundCheck:
    """``||[(I - A^T A) v]_S|| <= delta_t ||v||`` with ``|S u supp(v)| <= t``."""
    A = np.asarray(A, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    S = as_index_set(S, v.size)
    r = v - A.T @ (A @ v)
    return BoundCheck.absolute(norm2(restrict(r, S)), delta * norm2(v), "rip-ii", atol)


def check_rip_inequality_iii(A, u, Lam, delta: float, atol: float = 1e-10) -> BoundCheck:
    """``||(A^T A u)_Lam|| <= delta_t ||u||`` for ``Lam`` disjoint from ``supp(u)``."""
    A = np.asarray(A, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    Lam = as_index_set(Lam, u.size)
    if intersection(Lam, support(u)).size:
        raise ValueError("Lam must be disjoint from supp(u)")
    lhs = norm2(restrict(A.T @ (A @ u), Lam))
    return BoundCheck.absolute(lhs, delta * norm2(u), "rip-iii", atol)


def rip_order(*sets) -> int:
    """Size of the union of the given index sets."""
    out = np.empty(0, dtype=np.int64)
    for s in sets:
        out = union(out, s)
    return int(out.size)


def measurement_bound(k, n, delta_star, xi, c_star) -> float:
    """Unrounded ``c_star * delta_star**-2 * (k (1 + ln(n/k)) + ln(2/xi))``; no range checks."""
    return c_star * delta_star**-2 * (k * (1.0 + math.log(n / k)) + math.log(2.0 / xi))


def gaussian_measurement_count(k: int, n: int, delta_star: float, xi: float, c_star: float) -> int:
    """Measurements sufficient for ``delta_2k(A / sqrt(m)) <= delta_star`` w.p. ``1 - xi``.

    ``c_star`` is the (unspecified) universal constant of the Gaussian
    concentration bound and must be supplied by the caller.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 < delta_star < 1:
        raise ValueError("delta_star must lie in (0, 1)")
    if not 0 < xi < 1:
        raise ValueError("xi must lie in (0, 1)")
    if not c_star > 0:
        raise ValueError("c_star must be positive")
    return math.ceil(measurement_bound(k, n, delta_star, xi, c_star))
