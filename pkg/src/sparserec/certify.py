"""Executable checks for the hard-thresholding inequalities and recovery guarantees.

Each ``verify_*`` function evaluates both sides of one inequality on concrete
data and returns a :class:`~sparserec.core.BoundCheck`. The constants and error
envelopes of the IHT and CoSaMP convergence results live here as well, so the
trace checker can compare a measured run against its theoretical bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .algorithms import Algorithm, RecoveryTrace
from .core import BoundCheck, as_index_set, as_matrix, as_vector, norm2
from .projection import least_squares_on_support
from .rip import ric_exact
from .thresholding import (
    complement,
    difference,
    hard_threshold,
    restrict,
    support,
    symmetric_difference,
    top_k_indices,
    union,
)

__all__ = [
    "GOLDEN",
    "IHT_THRESHOLD",
    "IHT_RATE_HALF_THRESHOLD",
    "COSAMP_THRESHOLD",
    "COSAMP_RATE_HALF_THRESHOLD",
    "ratio_bound_g",
    "tightness_ratio",
    "tightness_optimal_alpha",
    "iht_contraction_factor",
    "cosamp_constants",
    "iht_error_envelope",
    "cosamp_error_envelope",
    "verify_lemma_2_1",
    "verify_lemma_2_2",
    "TightnessInstance",
    "tightness_instance",
    "verify_lemma_3_1",
    "verify_lemma_3_2",
    "Lemma33Witness",
    "verify_lemma_3_3",
    "check_trace_against_theorem",
]

RTOL = 1e-10

#: (sqrt(5) + 1) / 2; satisfies GOLDEN**2 - 1 == GOLDEN.
GOLDEN = (math.sqrt(5.0) + 1.0) / 2.0

IHT_THRESHOLD = (math.sqrt(5.0) - 1.0) / 2.0
IHT_RATE_HALF_THRESHOLD = (math.sqrt(5.0) - 1.0) / 4.0
COSAMP_THRESHOLD = math.sqrt(2.0 / (math.sqrt(13.0 + 4.0 * math.sqrt(5.0)) + 3.0))
COSAMP_RATE_HALF_THRESHOLD = math.sqrt(2.0 / (math.sqrt(81.0 + 16.0 * (math.sqrt(5.0) + 1.0)) + 9.0))


# -- scalar functions --------------------------------------------------------

def ratio_bound_g(r):
    """``(2(1 + r) + r^2) / (1 + r^2)``; its maximum on ``[0, inf)`` is ``GOLDEN**2``."""
    r = np.asarray(r, dtype=np.float64)
    return (2.0 * (1.0 + r) + r * r) / (1.0 + r * r)


def tightness_ratio(alpha, eps):
    """Squared error ratio ``(1 + (alpha + eps)^2) / (1 + alpha^2)`` of the tightness family."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return (1.0 + (alpha + eps) ** 2) / (1.0 + alpha * alpha)


def tightness_optimal_alpha(eps: float) -> float:
    """Maximiser over ``alpha >= 0`` of :func:`tightness_ratio`; root of ``a^2 + a eps - 1``."""
    return (math.sqrt(4.0 + eps * eps) - eps) / 2.0


class IhtConstants(NamedTuple):
    rho: float
    contract_ok: bool


class CosampConstants(NamedTuple):
    rho: float
    C: float
    contract_ok: bool


def _check_delta(delta):
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"restricted isometry constant must lie in [0, 1), got {delta}")


def iht_contraction_factor(delta_3k: float) -> IhtConstants:
    _check_delta(delta_3k)
    return IhtConstants(GOLDEN * delta_3k, delta_3k < IHT_THRESHOLD)


def cosamp_constants(delta_4k: float) -> CosampConstants:
    _check_delta(delta_4k)
    d2 = delta_4k * delta_4k
    root = math.sqrt((2.0 + (math.sqrt(5.0) + 1.0) * d2) / (1.0 - d2))
    rho = delta_4k * root
    C = root + (math.sqrt(5.0) + 1.0) / (2.0 * (1.0 - delta_4k))
    return CosampConstants(rho, C, delta_4k < COSAMP_THRESHOLD)


def iht_error_envelope(p: int, delta_3k: float, e0: float, noise_term: float) -> float:
    """``rho^p e0 + GOLDEN / (1 - rho) * noise_term``."""
    rho, _ = iht_contraction_factor(delta_3k)
    if rho >= 1.0:
        raise ValueError(f"contraction factor {rho} >= 1: no error envelope")
    return rho**p * e0 + GOLDEN / (1.0 - rho) * noise_term


def cosamp_error_envelope(p: int, delta_4k: float, e0: float, noise_term: float) -> float:
    """``rho^p e0 + C / (1 - rho) * noise_term``."""
    rho, C, _ = cosamp_constants(delta_4k)
    if rho >= 1.0:
        raise ValueError(f"contraction factor {rho} >= 1: no error envelope")
    return rho**p * e0 + C / (1.0 - rho) * noise_term


# -- hard thresholding lemmas ------------------------------------------------

def _sparse_pair(x, z, k):
    x = as_vector(x)
    z = as_vector(z, x.size)
    if np.count_nonzero(x) > k:
        raise ValueError(f"x has {np.count_nonzero(x)} nonzeros, more than k={k}")
    Hz = hard_threshold(z, k)
    return x, z, Hz, support(x), support(Hz)


def verify_lemma_2_1(x, z, k: int) -> BoundCheck:
    """Error of ``H_k(z)`` on the missed part of ``supp(x)``.

    ``||(x - H_k z)_{S\\S*}|| <= ||(x - z)_{S\\S*}|| + ||(x - z)_{S*\\S}||`` with
    ``S = supp(x)`` and ``S* = supp(H_k z)``.
    """
    x, z, Hz, S, S_star = _sparse_pair(x, z, k)
    missed, extra = difference(S, S_star), difference(S_star, S)
    lhs = norm2(restrict(x - Hz, missed))
    rhs = norm2(restrict(x - z, missed)) + norm2(restrict(x - z, extra))
    return BoundCheck.from_sides(lhs, rhs, "lemma-2.1", RTOL)


def verify_lemma_2_2(x, z, k: int) -> BoundCheck:
    """``||x - H_k z|| <= GOLDEN * ||(x - z)_{S u S*}||``; the check carries ``lhs / rhs``."""
    x, z, Hz, S, S_star = _sparse_pair(x, z, k)
    lhs = norm2(x - Hz)
    rhs = GOLDEN * norm2(restrict(x - z, union(S, S_star)))
    check = BoundCheck.from_sides(lhs, rhs, "lemma-2.2", RTOL)
    if rhs > 0:
        check = replace(check, ratio=lhs / rhs)
    return check


@dataclass(frozen=True, eq=False)
class TightnessInstance:
    x: np.ndarray
    z: np.ndarray
    k: int
    predicted_ratio: float

    @property
    def measured_ratio(self) -> float:
        """``||x - H_k z||^2 / ||(x - z)_{S u S*}||^2`` evaluated on the vectors."""
        Hz = hard_threshold(self.z, self.k)
        S = union(support(self.x), support(Hz))
        return norm2(self.x - Hz) ** 2 / norm2(restrict(self.x - self.z, S)) ** 2


def tightness_instance(n: int, k: int, tau: int, alpha: float, eps: float) -> TightnessInstance:
    """Vectors for which the hard-thresholding error ratio equals ``tightness_ratio(alpha, eps)``.

    ``z = (1 x k, eps x tau, 1/2 ...)`` and
    ``x = (0 x tau, 1 x (k - tau), (alpha + eps) x tau, 0 ...)``.
    """
    if not 0 < tau < k:
        raise ValueError(f"need 0 < tau < k, got tau={tau}, k={k}")
    if not n > k + tau:
        raise ValueError(f"need n > k + tau, got n={n}")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    z = np.full(n, 0.5)
    z[:k] = 1.0
    z[k:k + tau] = eps
    x = np.zeros(n)
    x[tau:k] = 1.0
    x[k:k + tau] = alpha + eps
    return TightnessInstance(x, z, k, float(tightness_ratio(alpha, eps)))


# -- projection lemmas -------------------------------------------------------

def verify_lemma_3_1(alpha1: float, alpha2: float, alpha3: float, t: float) -> BoundCheck:
    """``t <= alpha1 / sqrt(1 - alpha1^2) * alpha2 + alpha3 / (1 - alpha1)``.

    The check is vacuous unless ``0 <= t - alpha3 <= alpha1 * sqrt(t^2 + alpha2^2)``.
    """
    if not 0.0 <= alpha1 < 1.0:
        raise ValueError(f"alpha1 must lie in [0, 1), got {alpha1}")
    if alpha2 < 0 or alpha3 < 0:
        raise ValueError("alpha2 and alpha3 must be nonnegative")
    admissible = 0.0 <= t - alpha3 <= alpha1 * math.hypot(t, alpha2)
    bound = alpha1 / math.sqrt(1.0 - alpha1 * alpha1) * alpha2 + alpha3 / (1.0 - alpha1)
    return BoundCheck.from_sides(t, bound, "lemma-3.1", RTOL, vacuous=not admissible)


def _delta(A, order, delta):
    if delta is None:
        delta = ric_exact(A, min(order, A.shape[1])).delta
    if delta >= 1.0:
        raise ValueError(f"restricted isometry constant of order {order} is {delta} >= 1")
    return delta


def verify_lemma_3_2(A, x, nu, k: int, Lam, Gamma=None, delta=None) -> tuple[BoundCheck, BoundCheck]:
    """Error of the least-squares fit on ``Lam`` against the best k-term part of ``x``.

    ``Gamma`` (default ``Lam``) must satisfy ``Lam <= Gamma <= zero set`` of the
    projection gradient. ``delta`` defaults to the exact RIC of order
    ``|Gamma| + k``. Returns the checks on ``||(x_S - x*)_Gamma||`` and on
    ``||x_S - x*||``.
    """
    A = as_matrix(A)
    m, n = A.shape
    x = as_vector(x, n)
    nu = as_vector(nu, m)
    Lam = as_index_set(Lam, n)
    Gamma = Lam if Gamma is None else as_index_set(Gamma, n)
    y = A @ x + nu
    proj = least_squares_on_support(A, y, Lam)
    if difference(Lam, Gamma).size:
        raise ValueError("Gamma must contain Lam")
    if difference(Gamma, proj.zero_set).size:
        raise ValueError("Gamma must lie inside the zero set of the projection gradient")
    delta = _delta(A, Gamma.size + k, delta)

    S = top_k_indices(x, k)
    x_S = restrict(x, S)
    noise_term = norm2(A.T @ (A @ (x - x_S) + nu))
    err = x_S - proj.solution
    inside = norm2(restrict(err, Gamma))
    outside = norm2(restrict(err, complement(Gamma, n)))
    root = math.sqrt(1.0 - delta * delta)
    tail = noise_term / (1.0 - delta)
    on_gamma = BoundCheck.from_sides(inside, delta * outside / root + tail, "lemma-3.2/on-gamma", RTOL)
    total = BoundCheck.from_sides(norm2(err), outside / root + tail, "lemma-3.2/total", RTOL)
    return on_gamma, total


@dataclass(frozen=True, eq=False)
class Lemma33Witness:
    """Intermediate quantities of the capture-set argument.

    ``omega`` and ``omega_hat`` are gradient norms on the uncaptured part of
    ``S u S^p`` and on the part of ``T`` outside ``S u S^p``; ``omega_star``
    is the norm of ``(x_S - x^p) - gradient`` on the symmetric difference and
    ``w_norm`` its part on the uncaptured indices. ``w_ratio = w_norm / omega_hat``.
    """

    omega: float
    omega_star: float
    omega_hat: float
    w_norm: float
    capture_set: np.ndarray
    w_ratio: float | None
    ordering: BoundCheck
    pythagoras: BoundCheck
    omega_star_bound: BoundCheck


def verify_lemma_3_3(A, x, nu, k: int, x_p, beta: int, delta=None):
    """Mass of ``x^p - x_S`` missed by the ``beta`` largest gradient entries.

    Checks ``||(x^p - x_S)_{~T}|| <= sqrt(2) (delta ||x^p - x_S|| + ||A^T nu'||)``
    with ``T = L_beta(A^T (y - A x^p))``. ``delta`` defaults to the exact RIC of
    order ``2k + beta``. Returns ``(check, witness)``; the witness is ``None``
    when ``T`` already covers ``S u supp(x^p)``.
    """
    A = as_matrix(A)
    m, n = A.shape
    x = as_vector(x, n)
    nu = as_vector(nu, m)
    x_p = as_vector(x_p, n)
    if np.count_nonzero(x_p) > k:
        raise ValueError("x_p must be k-sparse")
    if not 2 * k <= beta <= n:
        raise ValueError(f"beta must lie in [2k, n] = [{2 * k}, {n}], got {beta}")
    delta = _delta(A, 2 * k + beta, delta)

    S = top_k_indices(x, k)
    x_S = restrict(x, S)
    y = A @ x + nu
    noise_term = norm2(A.T @ (A @ (x - x_S) + nu))
    grad = A.T @ (y - A @ x_p)
    T = top_k_indices(grad, beta)
    err = x_p - x_S
    lhs = norm2(restrict(err, complement(T, n)))
    rhs = math.sqrt(2.0) * (delta * norm2(err) + noise_term)
    check = BoundCheck.from_sides(lhs, rhs, "lemma-3.3", RTOL)

    joint = union(S, support(x_p))
    missed = difference(joint, T)
    if missed.size == 0:
        return check, None
    spare = difference(T, joint)
    omega = norm2(grad[missed])
    omega_hat = norm2(grad[spare])
    resid = -err - grad
    omega_star = norm2(resid[symmetric_difference(joint, T)])
    w_norm = norm2(resid[missed])
    lhs_sq, rhs_sq = omega_star**2, w_norm**2 + omega_hat**2
    witness = Lemma33Witness(
        omega=omega,
        omega_star=omega_star,
        omega_hat=omega_hat,
        w_norm=w_norm,
        capture_set=T,
        w_ratio=w_norm / omega_hat if omega_hat > 0 else None,
        ordering=BoundCheck.from_sides(omega, omega_hat, "lemma-3.3/omega<=omega_hat", RTOL),
        pythagoras=BoundCheck.absolute(
            abs(lhs_sq - rhs_sq), 0.0, "lemma-3.3/|omega_star^2-(w^2+omega_hat^2)|",
            atol=RTOL * max(lhs_sq, rhs_sq),
        ),
        omega_star_bound=BoundCheck.from_sides(
            omega_star, delta * norm2(err) + noise_term, "lemma-3.3/omega_star", RTOL
        ),
    )
    return check, witness


# -- convergence theorems ----------------------------------------------------

def check_trace_against_theorem(trace: RecoveryTrace, A, x, nu, k: int, which=None, delta=None) -> list[BoundCheck]:
    """Compare a recovery trace with the one-step and cumulative error bounds.

    Uses the exact RIC of order ``3k`` (IHT) or ``4k`` (CoSaMP), capped at ``n``,
    unless ``delta`` is given. Returns a cumulative check for ``p = 0`` and
    then, per iteration, the one-step check followed by the cumulative one.
    When ``delta`` is at or above the algorithm's threshold the checks are
    flagged vacuous.
    """
    which = Algorithm(which if which is not None else trace.algorithm)
    A = as_matrix(A)
    m, n = A.shape
    x = as_vector(x, n)
    nu = as_vector(nu, m)
    S = top_k_indices(x, k)
    x_S = restrict(x, S)
    noise_term = norm2(A.T @ (A @ (x - x_S) + nu))
    order = min((3 if which is Algorithm.IHT else 4) * k, n)
    if delta is None:
        delta = ric_exact(A, order).delta

    errors = [norm2(x_S - xp) for xp in trace.iterates]
    e0 = errors[0]
    label = which.value
    if which is Algorithm.IHT:
        ok = delta < IHT_THRESHOLD
        rho, step_coef = (GOLDEN * delta, GOLDEN) if ok else (math.inf, math.inf)
        envelope = (lambda p: iht_error_envelope(p, delta, e0, noise_term)) if ok else None
    else:
        ok = delta < COSAMP_THRESHOLD
        if ok:
            rho, step_coef, _ = cosamp_constants(delta)
            envelope = lambda p: cosamp_error_envelope(p, delta, e0, noise_term)  # noqa: E731
        else:
            rho = step_coef = math.inf
            envelope = None

    def cumulative(p):
        if ok:
            return BoundCheck.from_sides(errors[p], envelope(p), f"{label}/envelope p={p}", RTOL)
        return BoundCheck.from_sides(errors[p], math.inf, f"{label}/envelope p={p}", RTOL, vacuous=True)

    checks = [cumulative(0)]
    for p in range(1, len(errors)):
        if ok:
            bound = rho * errors[p - 1] + step_coef * noise_term
            checks.append(BoundCheck.from_sides(errors[p], bound, f"{label}/step p={p}", RTOL))
        else:
            checks.append(BoundCheck.from_sides(errors[p], math.inf, f"{label}/step p={p}", RTOL, vacuous=True))
        checks.append(cumulative(p))
    return checks
