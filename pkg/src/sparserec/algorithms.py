"""IHT and CoSaMP steppers and a driver that records full diagnostic traces."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import DimensionError, as_matrix, as_vector, norm2
from .projection import least_squares_on_support
from .thresholding import hard_threshold, support, top_k_indices, union

__all__ = [
    "Algorithm",
    "StopReason",
    "StoppingRule",
    "RecoveryTrace",
    "CosampStep",
    "iht_step",
    "cosamp_step",
    "run",
]


class Algorithm(str, enum.Enum):
    IHT = "iht"
    COSAMP = "cosamp"


class StopReason(str, enum.Enum):
    MAX_ITER = "max_iter"
    RESIDUAL = "residual"
    CHANGE = "change"


@dataclass(frozen=True)
class StoppingRule:
    """When to stop iterating.

    ``residual_tol=None`` means ``1e-12 * ||y||``; ``change_tol=0`` disables the
    iterate-change criterion.
    """

    max_iterations: int = 1000
    residual_tol: float | None = None
    change_tol: float = 0.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.residual_tol is not None and self.residual_tol < 0:
            raise ValueError("residual_tol must be nonnegative")
        if self.change_tol < 0:
            raise ValueError("change_tol must be nonnegative")


@dataclass
class RecoveryTrace:
    algorithm: Algorithm
    k: int
    iterates: list = field(default_factory=list)
    supports: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    merged_supports: list = field(default_factory=list)
    interim_solutions: list = field(default_factory=list)
    degenerate: list = field(default_factory=list)
    stop_reason: StopReason | None = None

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def to_dict(self) -> dict:
        def vec(v):
            return [float(a) for a in v]

        def idx(s):
            return [int(i) for i in s]

        return {
            "algorithm": self.algorithm.value,
            "k": self.k,
            "iterations": self.iterations,
            "stop_reason": self.stop_reason.value if self.stop_reason else None,
            "iterates": [vec(x) for x in self.iterates],
            "supports": [idx(s) for s in self.supports],
            "residual_norms": [float(r) for r in self.residual_norms],
            "merged_supports": [idx(s) for s in self.merged_supports],
            "interim_solutions": [None if z is None else vec(z) for z in self.interim_solutions],
            "degenerate": list(self.degenerate),
        }


class CosampStep(NamedTuple):
    merged: np.ndarray
    interim: np.ndarray
    x_next: np.ndarray
    degenerate: bool


def _check(A, y, x):
    m, n = A.shape
    if y.shape != (m,) or x.shape != (n,):
        raise DimensionError(f"A is {A.shape}, y is {y.shape}, x is {x.shape}")


def iht_step(A, y, x_p, k: int) -> np.ndarray:
    """``H_k(x_p + A^T (y - A x_p))``."""
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x_p = np.asarray(x_p, dtype=np.float64)
    _check(A, y, x_p)
    return hard_threshold(x_p + A.T @ (y - A @ x_p), k)


def cosamp_step(A, y, x_p, k: int) -> CosampStep:
    """One CoSaMP iteration: merge supports, project, prune."""
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x_p = np.asarray(x_p, dtype=np.float64)
    _check(A, y, x_p)
    n = A.shape[1]
    if 3 * k > n:
        raise ValueError(f"CoSaMP needs 3k <= n, got k={k}, n={n}")
    gradient = A.T @ (y - A @ x_p)
    U = union(support(x_p), top_k_indices(gradient, min(2 * k, n)))
    proj = least_squares_on_support(A, y, U)
    return CosampStep(U, proj.solution, hard_threshold(proj.solution, k), proj.degenerate)


def run(algorithm, A, y, k: int, x0=None, rule: StoppingRule | None = None) -> RecoveryTrace:
    """Iterate IHT or CoSaMP from ``x0`` (default zero) until ``rule`` fires.

    The residual criterion is also tested at ``x0``, so a trace can contain
    zero iterations when the initial point already fits the measurements.
    """
    algorithm = Algorithm(algorithm)
    A = as_matrix(A)
    m, n = A.shape
    y = as_vector(y, m)
    x = np.zeros(n) if x0 is None else as_vector(x0, n)
    if np.count_nonzero(x) > k:
        raise ValueError("initial point must be k-sparse")
    rule = rule or StoppingRule()
    rtol = 1e-12 * norm2(y) if rule.residual_tol is None else rule.residual_tol

    trace = RecoveryTrace(algorithm, k)
    empty = np.empty(0, dtype=np.int64)

    def record(x_new, merged=empty, interim=None, degenerate=False):
        trace.iterates.append(x_new)
        trace.supports.append(support(x_new))
        trace.residual_norms.append(norm2(y - A @ x_new))
        trace.merged_supports.append(merged)
        trace.interim_solutions.append(interim)
        trace.degenerate.append(degenerate)

    record(x)
    if trace.residual_norms[-1] <= rtol:
        trace.stop_reason = StopReason.RESIDUAL
        return trace

    for _ in range(rule.max_iterations):
        if algorithm is Algorithm.IHT:
            x_new = iht_step(A, y, x, k)
            record(x_new)
        else:
            step = cosamp_step(A, y, x, k)
            x_new = step.x_next
            record(x_new, step.merged, step.interim, step.degenerate)
        change = norm2(x_new - x)
        x = x_new
        if trace.residual_norms[-1] <= rtol:
            trace.stop_reason = StopReason.RESIDUAL
            return trace
        if rule.change_tol > 0 and change <= rule.change_tol:
            trace.stop_reason = StopReason.CHANGE
            return trace
    trace.stop_reason = StopReason.MAX_ITER
    return trace
