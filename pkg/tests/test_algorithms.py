import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparserec.algorithms import (
    Algorithm,
    StoppingRule,
    StopReason,
    cosamp_step,
    iht_step,
    run,
)
from sparserec.certify import GOLDEN, cosamp_constants
from sparserec.core import DimensionError, norm2
from sparserec.harness.instances import gen_orthogonal_subset_matrix, gen_sparse_signal
from sparserec.projection import least_squares_on_support
from sparserec.rip import ric_exact
from sparserec.thresholding import support


def orthogonal(n, seed):
    return gen_orthogonal_subset_matrix(n, n, seed)


def test_iht_orthogonal_one_step():
    A = orthogonal(10, 1)
    x = gen_sparse_signal(10, 3, 1)
    out = iht_step(A, A @ x, np.zeros(10), 3)
    assert np.allclose(out, x, atol=1e-14)
    assert support(out).tolist() == support(x).tolist()


def test_iht_fixed_point(rng):
    A = rng.standard_normal((6, 10))
    x = gen_sparse_signal(10, 2, 3)
    assert np.allclose(iht_step(A, A @ x, x, 2), x, rtol=0, atol=1e-14)


def test_cosamp_orthogonal_one_step():
    A = orthogonal(12, 2)
    x = gen_sparse_signal(12, 3, 2)
    step = cosamp_step(A, A @ x, np.zeros(12), 3)
    assert set(support(x)) <= set(step.merged)
    assert step.merged.size == 6
    assert np.allclose(step.x_next, x, atol=1e-13)


def test_cosamp_fixed_point_zero_residual():
    A = gen_orthogonal_subset_matrix(10, 12, 4)
    x = np.zeros(12)
    x[[5, 9]] = [1.5, -0.7]
    # exact zero residual: the gradient is identically zero and ties pick the smallest indices
    y = A @ x
    step = cosamp_step(A, y, x, 2)
    grad = A.T @ (y - A @ x)
    if np.all(grad == 0):
        assert step.merged.tolist() == [0, 1, 2, 3, 5, 9]
    assert np.allclose(step.x_next, x, atol=1e-12)
    assert not step.degenerate


def test_step_errors():
    A = np.ones((3, 6))
    with pytest.raises(DimensionError):
        iht_step(A, np.ones(2), np.zeros(6), 1)
    with pytest.raises(ValueError):
        cosamp_step(A, np.ones(3), np.zeros(6), 3)
    with pytest.raises(ValueError):
        StoppingRule(max_iterations=0)
    with pytest.raises(ValueError):
        run("iht", A, np.ones(3), 1, x0=np.ones(6))


def test_cosamp_degenerate_projection_flagged():
    A = np.array([[1.0, 0.0, 0.0, 1.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0, 1.0, 1.0]])
    step = cosamp_step(A, np.array([1.0, 2.0]), np.zeros(6), 2)
    assert step.degenerate


def test_run_loop_contract():
    A = gen_orthogonal_subset_matrix(8, 12, 9)
    x = gen_sparse_signal(12, 2, 9)
    tr = run("iht", A, A @ x + 0.1, 2, rule=StoppingRule(max_iterations=1))
    assert tr.iterations == 1 and len(tr.iterates) == 2
    assert tr.stop_reason is StopReason.MAX_ITER
    assert tr.merged_supports[1].size == 0 and tr.interim_solutions[1] is None
    B = orthogonal(12, 9)
    tr = run(Algorithm.IHT, B, B @ x, 2)
    assert tr.iterations == 1 and tr.stop_reason is StopReason.RESIDUAL
    tr = run("cosamp", B, B @ x, 2)
    assert tr.iterations == 1 and tr.stop_reason is StopReason.RESIDUAL
    tr = run("iht", B, np.zeros(12), 2)
    assert tr.iterations == 0 and tr.stop_reason is StopReason.RESIDUAL
    tr = run("iht", A, A @ x + 0.1, 2, rule=StoppingRule(max_iterations=500, change_tol=1e-9))
    assert tr.stop_reason is StopReason.CHANGE
    d = tr.to_dict()
    assert d["stop_reason"] == "change" and len(d["iterates"]) == tr.iterations + 1


@given(st.integers(0, 2**32), st.sampled_from(["iht", "cosamp"]))
def test_trace_invariants(seed, alg):
    n, m, k = 12, 8, 2
    A = gen_orthogonal_subset_matrix(m, n, seed)
    x = gen_sparse_signal(n, k, seed, (1,))
    y = A @ x + 0.01 * np.sin(np.arange(m))
    tr = run(alg, A, y, k, rule=StoppingRule(max_iterations=15))
    for p, xp in enumerate(tr.iterates):
        assert np.count_nonzero(xp) <= k
        assert tr.residual_norms[p] == norm2(y - A @ xp)
    if alg == "cosamp":
        for p in range(1, len(tr.iterates)):
            U = tr.merged_supports[p]
            assert U.size <= 3 * k
            assert set(tr.supports[p - 1]) <= set(U)
            assert set(tr.supports[p]) <= set(U)
            z = tr.interim_solutions[p]
            assert set(support(z)) <= set(U)
            proj = least_squares_on_support(A, y, U)
            assert np.abs(proj.gradient[U]).max() <= proj.zero_tol


def test_iht_certified_recursion_and_convergence():
    # flat-complement 15 x 16 matrices have delta_6 = 6/16
    for seed in range(10):
        A = gen_orthogonal_subset_matrix(15, 16, seed, flat=True)
        delta = ric_exact(A, 6).delta
        assert delta < (math.sqrt(5) - 1) / 2
        x = gen_sparse_signal(16, 2, seed, (1,))
        tr = run("iht", A, A @ x, 2, rule=StoppingRule(max_iterations=50, residual_tol=0.0))
        errs = [norm2(x - xp) for xp in tr.iterates]
        for a, b in zip(errs, errs[1:]):
            assert b <= GOLDEN * delta * a + 1e-8
        assert min(errs) <= 1e-8


def test_cosamp_certified_recursion_and_convergence():
    for seed in range(5):
        A = gen_orthogonal_subset_matrix(19, 20, seed, flat=True)
        delta = ric_exact(A, 8).delta
        assert delta < 0.5102
        rho, C, ok = cosamp_constants(delta)
        assert ok
        x = gen_sparse_signal(20, 2, seed, (1,))
        tr = run("cosamp", A, A @ x, 2, rule=StoppingRule(max_iterations=50))
        errs = [norm2(x - xp) for xp in tr.iterates]
        for a, b in zip(errs, errs[1:]):
            assert b <= rho * a + 1e-8
        assert errs[-1] <= 1e-8
