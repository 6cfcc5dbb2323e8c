"""Empirical phase transitions of recovery success over (m, k)."""
from __future__ import annotations

import dataclasses
import enum
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..algorithms import Algorithm, StoppingRule, run
from ..core import norm2
from ..thresholding import restrict, top_k_indices
from .instances import gen_gaussian_matrix, gen_noise, gen_orthogonal_subset_matrix, gen_sparse_signal

__all__ = [
    "Ensemble",
    "ExperimentConfig",
    "PhaseGrid",
    "PhaseConfig",
    "run_trial",
    "phase_transition",
    "load_phase_config",
    "worker_count",
    "CSV_HEADER",
]

CSV_HEADER = "m,k,success_rate,mean_iterations"
THREADS_ENV = "SPARSEREC_THREADS"


class Ensemble(str, enum.Enum):
    GAUSSIAN = "gaussian"
    ORTHOGONAL_SUBSET = "orthogonal_subset"
    ORTHOGONAL_FLAT = "orthogonal_flat"


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    m: int
    k: int
    ensemble: Ensemble = Ensemble.GAUSSIAN
    noise_sigma: float = 0.0
    trials: int = 100
    seed: int = 0
    algorithm: Algorithm = Algorithm.IHT
    stopping: StoppingRule = field(default_factory=StoppingRule)
    success_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m: need 1 <= m <= n, got m={self.m}, n={self.n}")
        if not 0 <= self.k <= self.m:
            raise ValueError(f"k: need 0 <= k <= m, got k={self.k}, m={self.m}")
        if self.algorithm is Algorithm.COSAMP and 3 * self.k > self.n:
            raise ValueError(f"k: CoSaMP needs 3k <= n, got k={self.k}, n={self.n}")
        if self.ensemble is Ensemble.ORTHOGONAL_FLAT and self.m == self.n:
            raise ValueError("m: the orthogonal_flat ensemble needs m < n")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma: must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials: must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed: must be a 64-bit unsigned integer")
        if self.success_tol < 0:
            raise ValueError("success_tol: must be nonnegative")


def _matrix(cfg: ExperimentConfig, key):
    if cfg.ensemble is Ensemble.GAUSSIAN:
        return gen_gaussian_matrix(cfg.m, cfg.n, cfg.seed, key)
    return gen_orthogonal_subset_matrix(cfg.m, cfg.n, cfg.seed, key, flat=cfg.ensemble is Ensemble.ORTHOGONAL_FLAT)


def run_trial(cfg: ExperimentConfig, trial: int) -> tuple[bool, int]:
    """One recovery attempt; the instance depends only on (seed, m, k, trial)."""
    base = (cfg.m, cfg.k, trial)
    A = _matrix(cfg, base + (0,))
    x = gen_sparse_signal(cfg.n, cfg.k, cfg.seed, base + (1,))
    nu = gen_noise(cfg.m, cfg.noise_sigma, cfg.seed, base + (2,))
    trace = run(cfg.algorithm, A, A @ x + nu, cfg.k, rule=cfg.stopping)
    x_S = restrict(x, top_k_indices(x, cfg.k))
    err = norm2(trace.final - x_S) / max(norm2(x_S), 1.0)
    return err <= cfg.success_tol, trace.iterations


def _run_cell(cfg: ExperimentConfig) -> tuple[float, float]:
    outcomes = [run_trial(cfg, t) for t in range(cfg.trials)]
    success = sum(ok for ok, _ in outcomes) / cfg.trials
    iters = sum(it for _, it in outcomes) / cfg.trials
    return success, iters


@dataclass(frozen=True)
class PhaseConfig:
    """A grid of experiments sharing everything except ``m`` and ``k``."""

    n: int
    m_values: tuple
    k_values: tuple
    ensemble: Ensemble = Ensemble.GAUSSIAN
    noise_sigma: float = 0.0
    trials: int = 100
    seed: int = 0
    algorithm: Algorithm = Algorithm.IHT
    stopping: StoppingRule = field(default_factory=StoppingRule)
    success_tol: float = 1e-6

    def __post_init__(self):
        if not self.m_values or not self.k_values:
            raise ValueError("m_values and k_values must be nonempty")
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        self.cells()  # building each cell validates it

    def cell(self, m: int, k: int) -> ExperimentConfig:
        return ExperimentConfig(
            n=self.n, m=m, k=k, ensemble=self.ensemble, noise_sigma=self.noise_sigma,
            trials=self.trials, seed=self.seed, algorithm=self.algorithm,
            stopping=self.stopping, success_tol=self.success_tol,
        )

    def cells(self) -> list[ExperimentConfig]:
        return [self.cell(m, k) for m in self.m_values for k in self.k_values]


@dataclass
class PhaseGrid:
    m_values: tuple
    k_values: tuple
    success_rate: np.ndarray  # shape (len(m_values), len(k_values))
    mean_iterations: np.ndarray
    trials: int

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for i, m in enumerate(self.m_values):
            for j, k in enumerate(self.k_values):
                out.write(f"{m},{k},{float(self.success_rate[i, j])!r},{float(self.mean_iterations[i, j])!r}\n")
        return out.getvalue()


def worker_count() -> int:
    """Process count from ``SPARSEREC_THREADS``; unset or 0 means one per CPU."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a nonnegative integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{THREADS_ENV} must be a nonnegative integer, got {raw!r}")
    return value or (os.cpu_count() or 1)


def phase_transition(config: PhaseConfig, workers: int | None = None) -> PhaseGrid:
    """Success rate and mean iteration count for every ``(m, k)`` cell.

    Results do not depend on ``workers``: every trial seeds itself from
    ``(seed, m, k, trial)``.
    """
    cells = config.cells()
    workers = worker_count() if workers is None else workers
    workers = max(1, min(workers, len(cells)))
    if workers == 1:
        results = [_run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells))
    shape = (len(config.m_values), len(config.k_values))
    rates = np.array([r for r, _ in results]).reshape(shape)
    iters = np.array([i for _, i in results]).reshape(shape)
    return PhaseGrid(config.m_values, config.k_values, rates, iters, config.trials)


def _axis(value, name):
    if isinstance(value, dict):
        try:
            return tuple(range(int(value["start"]), int(value["stop"]) + 1, int(value.get("step", 1))))
        except KeyError as exc:
            raise ValueError(f"{name}: range needs 'start' and 'stop' (missing {exc})") from None
    if isinstance(value, list):
        return tuple(int(v) for v in value)
    raise ValueError(f"{name}: expected a list or a {{start, stop, step}} object")


_FIELDS = {f.name for f in dataclasses.fields(PhaseConfig)}


def load_phase_config(path) -> PhaseConfig:
    """Read a JSON grid description.

    ``m`` and ``k`` are lists or inclusive ``{"start", "stop", "step"}`` ranges;
    ``stopping`` holds the ``StoppingRule`` fields. All other keys map onto
    ``PhaseConfig`` fields.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: top level must be an object")
    raw = dict(raw)
    for axis in ("m", "k"):
        if axis not in raw:
            raise ValueError(f"{axis}: missing from {path}")
        raw[f"{axis}_values"] = _axis(raw.pop(axis), axis)
    if "stopping" in raw:
        try:
            raw["stopping"] = StoppingRule(**raw["stopping"])
        except TypeError as exc:
            raise ValueError(f"stopping: {exc}") from None
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    if "n" not in raw:
        raise ValueError(f"n: missing from {path}")
    return PhaseConfig(**raw)
