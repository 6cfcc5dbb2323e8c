"""Shared numeric plumbing: vector/matrix validation, norms, products and text IO.

Vectors are 1-D float64 numpy arrays, index sets are sorted int64 arrays of
0-based indices and sensing matrices are 2-D float64 arrays. The helpers
below validate those conventions at module boundaries; everything else
operates on plain numpy arrays.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "DimensionError",
    "FormatError",
    "BoundCheck",
    "MeasurementModel",
    "as_vector",
    "as_matrix",
    "as_index_set",
    "norm2",
    "matvec",
    "matvec_t",
    "save_matrix",
    "load_matrix",
    "save_vector",
    "load_vector",
]


class DimensionError(ValueError):
    """Operands do not have conforming shapes."""


class FormatError(ValueError):
    """A matrix or vector file could not be parsed."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def as_vector(v, dim=None) -> np.ndarray:
    """Validate ``v`` as a finite, non-empty real vector and return a float64 copy."""
    arr = np.array(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size < 1:
        raise DimensionError("vector dimension must be at least 1")
    if dim is not None and arr.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


def as_matrix(A) -> np.ndarray:
    arr = np.array(A, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def as_index_set(S, dim=None) -> np.ndarray:
    """Normalise an iterable of indices to a sorted, duplicate-free int64 array.

    Raises ``IndexError`` for indices outside ``[0, dim)`` when ``dim`` is given.
    """
    if isinstance(S, np.ndarray):
        arr = np.unique(S.astype(np.int64, copy=False).ravel())
    else:
        arr = np.unique(np.fromiter(S, dtype=np.int64))
    if arr.size and arr[0] < 0:
        raise IndexError(f"negative index {arr[0]}")
    if dim is not None and arr.size and arr[-1] >= dim:
        raise IndexError(f"index {arr[-1]} out of range for dimension {dim}")
    return arr


def norm2(v) -> float:
    v = np.asarray(v, dtype=np.float64)
    return float(np.sqrt(np.dot(v, v)))


def matvec(A, v) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if A.ndim != 2 or v.ndim != 1 or A.shape[1] != v.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} matrix by {v.shape} vector")
    return A @ v


def matvec_t(A, w) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if A.ndim != 2 or w.ndim != 1 or A.shape[0] != w.shape[0]:
        raise DimensionError(f"cannot multiply transpose of {A.shape} matrix by {w.shape} vector")
    return A.T @ w


@dataclass(frozen=True)
class BoundCheck:
    """One verified inequality ``lhs <= rhs``.

    ``holds`` is ``slack >= -tol``; ``vacuous`` marks checks whose hypothesis
    was not met, so the inequality carries no information either way.
    """

    lhs: float
    rhs: float
    slack: float
    holds: bool
    tol: float
    context: str
    vacuous: bool = False
    ratio: float | None = None

    @classmethod
    def from_sides(cls, lhs, rhs, context, rtol=1e-10, vacuous=False):
        # tolerance scales with the size of the bound: rtol * (1 + |rhs|)
        lhs, rhs = float(lhs), float(rhs)
        tol = rtol * (1.0 + abs(rhs))
        slack = rhs - lhs
        return cls(lhs, rhs, slack, bool(slack >= -tol), tol, context, vacuous)

    @classmethod
    def absolute(cls, lhs, rhs, context, atol=1e-10, vacuous=False):
        lhs, rhs = float(lhs), float(rhs)
        slack = rhs - lhs
        return cls(lhs, rhs, slack, bool(slack >= -atol), atol, context, vacuous)

    @property
    def status(self) -> str:
        if self.vacuous:
            return "vacuous"
        return "pass" if self.holds else "fail"

    def to_dict(self) -> dict:
        def num(v):
            # JSON has no infinities; vacuous bounds are reported as null
            return v if np.isfinite(v) else None

        out = {
            "context": self.context,
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "slack": num(self.slack),
            "tol": num(self.tol),
            "status": self.status,
        }
        if self.ratio is not None:
            out["ratio"] = self.ratio
        return out


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    """Measurements ``y = A x + noise`` of a (not necessarily sparse) signal."""

    matrix: np.ndarray
    signal: np.ndarray
    noise: np.ndarray
    k: int

    def __post_init__(self):
        A = as_matrix(self.matrix)
        m, n = A.shape
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "signal", as_vector(self.signal, n))
        object.__setattr__(self, "noise", as_vector(self.noise, m))
        if not 1 <= self.k <= n:
            raise ValueError(f"sparsity k must lie in [1, {n}], got {self.k}")

    @cached_property
    def measurements(self) -> np.ndarray:
        return self.matrix @ self.signal + self.noise

    @cached_property
    def best_support(self) -> np.ndarray:
        from .thresholding import top_k_indices

        return top_k_indices(self.signal, self.k)

    @cached_property
    def sparse_part(self) -> np.ndarray:
        """Best k-term approximation of the signal."""
        from .thresholding import restrict

        return restrict(self.signal, self.best_support)

    @cached_property
    def effective_noise(self) -> np.ndarray:
        """``A x_tail + noise``, so that ``y = A x_S + effective_noise``."""
        tail = self.signal - self.sparse_part
        return self.matrix @ tail + self.noise


# -- text IO -----------------------------------------------------------------

def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_floats(path, lineno, line, count):
    tokens = line.split()
    if len(tokens) != count:
        raise FormatError(path, lineno, f"expected {count} values, found {len(tokens)}")
    out = np.empty(count)
    for j, tok in enumerate(tokens):
        try:
            val = float(tok)
        except ValueError:
            raise FormatError(path, lineno, f"cannot parse {tok!r} as a number") from None
        if not np.isfinite(val):
            raise FormatError(path, lineno, f"non-finite value {tok!r}")
        out[j] = val
    return out


def _parse_header(path, line, count):
    tokens = line.split()
    if len(tokens) != count:
        raise FormatError(path, 1, f"header must hold {count} integer(s)")
    try:
        dims = [int(t) for t in tokens]
    except ValueError:
        raise FormatError(path, 1, f"malformed header {line.strip()!r}") from None
    if any(d < 1 for d in dims):
        raise FormatError(path, 1, "dimensions must be positive")
    return dims


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError(path, 1, "empty file")
    return lines


def save_matrix(A, path: str | os.PathLike) -> None:
    A = as_matrix(A)
    m, n = A.shape
    _write_lines(path, [f"{m} {n}"] + [_fmt(row) for row in A])


def load_matrix(path: str | os.PathLike) -> np.ndarray:
    lines = _read_lines(path)
    m, n = _parse_header(path, lines[0], 2)
    if len(lines) - 1 != m:
        raise FormatError(path, len(lines), f"expected {m} rows, found {len(lines) - 1}")
    A = np.empty((m, n))
    for i in range(m):
        A[i] = _parse_floats(path, i + 2, lines[i + 1], n)
    return A


def save_vector(v, path: str | os.PathLike) -> None:
    v = as_vector(v)
    _write_lines(path, [str(v.size), _fmt(v)])


def load_vector(path: str | os.PathLike) -> np.ndarray:
    lines = _read_lines(path)
    (n,) = _parse_header(path, lines[0], 1)
    if len(lines) != 2:
        raise FormatError(path, min(len(lines), 3), f"expected exactly one data line, found {len(lines) - 1}")
    return _parse_floats(path, 2, lines[1], n)
