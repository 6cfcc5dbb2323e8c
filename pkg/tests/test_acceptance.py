"""Acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line (visible even
without ``-s``) and then asserts. Run alone with

    pytest tests/test_acceptance.py -v
"""
import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from sparserec import certify as cf
from sparserec.harness import campaigns as cp
from sparserec.harness.instances import gen_gaussian_matrix, gen_orthogonal_subset_matrix
from sparserec.harness.rng import Rng
from sparserec.rip import ric_exact
from sparserec.thresholding import best_k_term_error
from test_rng_instances import GOLDEN_NORMAL_KEY5, GOLDEN_RAW, GOLDEN_UNIFORM

SQ5 = math.sqrt(5.0)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def _campaign_detail(results, elapsed):
    parts = [f"{r.name}: {r.passed} pass / {r.failed} fail / {r.vacuous} vacuous" for r in results]
    return "; ".join(parts) + f" ({elapsed:.1f}s)"


def test_criterion_01_constants(report):
    rho_iht = cf.iht_contraction_factor((SQ5 - 1) / 2).rho
    t = math.sqrt(2 / (math.sqrt(13 + 4 * SQ5) + 3))
    rho_cos = cf.cosamp_constants(t).rho
    half_iht = (SQ5 - 1) / 4
    half_cos = math.sqrt(2 / (math.sqrt(81 + 16 * (SQ5 + 1)) + 9))
    ok = (
        abs(rho_iht - 1) <= 1e-12
        and abs(rho_cos - 1) <= 1e-12
        and f"{t:.4f}" == "0.5102"
        and f"{half_iht:.4f}" == "0.3090"
        and f"{half_cos:.4f}" == "0.3122"
        and abs(cf.iht_contraction_factor(half_iht).rho - 0.5) <= 1e-12
        and abs(cf.cosamp_constants(half_cos).rho - 0.5) <= 1e-12
        and cf.COSAMP_THRESHOLD == t
        and cf.IHT_RATE_HALF_THRESHOLD == half_iht
        and cf.COSAMP_RATE_HALF_THRESHOLD == half_cos
    )
    report(1, ok, f"|rho_iht-1|={abs(rho_iht - 1):.1e} |rho_cosamp-1|={abs(rho_cos - 1):.1e} "
                  f"thresholds {t:.6f} {half_iht:.6f} {half_cos:.6f}")


def test_criterion_02_thresholding_campaigns(report):
    start = time.perf_counter()
    results = [cp.lemma_2_1_campaign(100_000, 21), cp.lemma_2_2_campaign(100_000, 22)]
    elapsed = time.perf_counter() - start
    ok = all(r.ok and r.passed == 100_000 for r in results) and elapsed < 60
    report(2, ok, _campaign_detail(results, elapsed) + f" max ratio {results[1].max_ratio:.6f}")


def test_criterion_03_tightness(report):
    inst = cf.tightness_instance(12, 4, 2, (SQ5 - 1) / 2, 1.0)
    golden_err = abs(inst.measured_ratio - (3 + SQ5) / 2)
    alpha0_err = max(
        abs(cf.tightness_instance(12, 4, 2, 0.0, e).measured_ratio - (1 + e * e))
        for e in np.round(np.arange(0.1, 1.01, 0.1), 10)
    )
    grid = np.arange(0, 10 + 5e-5, 1e-4)
    grid_err = max(
        abs(grid[np.argmax(cf.tightness_ratio(grid, e))] - cf.tightness_optimal_alpha(e))
        for e in (0.2, 0.5, 1.0)
    )
    ok = golden_err <= 1e-12 and alpha0_err <= 1e-12 and grid_err <= 1e-4
    report(3, ok, f"golden err {golden_err:.1e}, alpha=0 err {alpha0_err:.1e}, argmax err {grid_err:.1e}")


def test_criterion_04_ric_engine(report):
    start = time.perf_counter()
    Q = gen_orthogonal_subset_matrix(10, 10, 1)[:, :7]
    iso = max(ric_exact(Q, q).delta for q in range(1, 8))
    dup = ric_exact(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]), 2).delta
    monotone_violations = 0
    rayleigh_ok = True
    rng = np.random.default_rng(4)
    for j in range(50):
        n = 8 + j % 7
        m = 4 + j % (n - 3)
        A = gen_gaussian_matrix(m, n, 400, (j,)) if j % 2 else gen_orthogonal_subset_matrix(m, n, 400, (j,))
        ests = [ric_exact(A, q) for q in range(1, 7)]
        monotone_violations += sum(a.delta > b.delta + 1e-12 for a, b in zip(ests, ests[1:]))
        est = ests[-1]
        AS = A[:, est.argmax_support]
        U = rng.standard_normal((200, 6))
        energy = np.sum((U @ AS.T) ** 2, axis=1)
        sq = np.sum(U * U, axis=1)
        rayleigh_ok &= bool(np.all((1 - est.delta) * sq <= energy + 1e-10 * sq))
        rayleigh_ok &= bool(np.all(energy <= (1 + est.delta) * sq + 1e-10 * sq))
    elapsed = time.perf_counter() - start
    ok = iso <= 1e-12 and abs(dup - 1) <= 1e-12 and monotone_violations == 0 and rayleigh_ok and elapsed < 60
    report(4, ok, f"isometry delta {iso:.1e}, duplicate delta_2 {dup:.15f}, "
                  f"monotonicity violations {monotone_violations}, Rayleigh {rayleigh_ok} ({elapsed:.1f}s)")


def _theorem(number, report, algorithm, seed):
    start = time.perf_counter()
    res = cp.theorem_campaign(algorithm, 100, seed, n=16, k_values=(1, 2))
    elapsed = time.perf_counter() - start
    notes = res.notes
    ok = res.ok and notes["certified"] >= 100 and notes["noiseless_runs_slow"] == 0 and res.vacuous == 0
    report(number, ok, f"{notes['certified']} certified ({notes['certified_haar']} Haar, "
                       f"{notes['certified_flat']} flat, {notes['gated_out']} gated out); "
                       f"{res.passed} checks pass / {res.failed} fail; worst noiseless error within 50 "
                       f"iterations {notes['worst_noiseless_error_within_50']:.1e} ({elapsed:.1f}s)")


def test_criterion_05_iht_theorem(report):
    _theorem(5, report, "iht", 55)


def test_criterion_06_cosamp_theorem(report):
    _theorem(6, report, "cosamp", 66)


def test_criterion_07_projection_lemmas(report):
    start = time.perf_counter()
    r1 = cp.lemma_3_1_campaign(100_000, 71)
    r2 = cp.lemma_3_2_campaign(1000, 72)
    r3 = cp.lemma_3_3_campaign(1000, 73)
    elapsed = time.perf_counter() - start
    ok = (
        r1.ok and r1.passed == 100_000
        and r2.ok and r2.notes["instances"] == 1000 and r2.passed == 2000
        and r3.ok and r3.notes["instances"] == 1000 and r3.notes["witnesses"] > 0
    )
    report(7, ok, _campaign_detail([r1, r2, r3], elapsed) + f"; witnesses checked {r3.notes['witnesses']}")


def test_criterion_08_rip_lemma(report):
    start = time.perf_counter()
    results = [cp.rip_lemma_campaign(part, 10_000, 80 + j) for j, part in enumerate(("i", "ii", "iii"))]
    elapsed = time.perf_counter() - start
    ok = all(r.ok and r.passed == 10_000 for r in results) and elapsed < 60
    report(8, ok, _campaign_detail(results, elapsed))


def test_criterion_09_hard_threshold_optimality(report):
    rng = np.random.default_rng(9)
    worst = 0.0
    cases = 0
    for n in range(1, 11):
        masks = np.array(list(itertools.product([0, 1], repeat=n)), dtype=bool)
        sizes = masks.sum(axis=1)
        for _ in range(100):
            z = rng.standard_normal(n)
            dropped = np.sqrt((~masks).astype(float) @ (z * z))
            for k in range(n + 1):
                oracle = dropped[sizes == k].min()
                worst = max(worst, abs(best_k_term_error(z, k) - oracle))
                cases += 1
    report(9, worst <= 1e-13, f"{cases} (z, k) cases, max deviation from enumeration {worst:.1e}")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "sparserec", *args], capture_output=True)


def test_criterion_10_determinism(report, tmp_path):
    runs = [
        ("certify-run", "--alg", "iht", "--n", "16", "--m", "15", "--k", "2", "--seed", "10", "--sigma", "0.001",
         "--flat"),
        ("certify-run", "--alg", "cosamp", "--n", "16", "--m", "15", "--k", "1", "--seed", "10"),
    ]
    same = True
    for args in runs:
        a, b = _cli(*args), _cli(*args)
        same &= a.returncode == b.returncode and a.stdout == b.stdout and len(a.stdout) > 0
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps({"n": 32, "m": [8, 16, 24, 32], "k": [1, 2, 4], "trials": 10, "seed": 10,
                               "algorithm": "cosamp", "stopping": {"max_iterations": 50}}))
    outs = [tmp_path / "1.csv", tmp_path / "2.csv"]
    codes = [_cli("phase", "--config", str(cfg), "--out", str(o)).returncode for o in outs]
    same &= codes == [0, 0] and outs[0].read_bytes() == outs[1].read_bytes()
    golden = (
        [int(v) for v in Rng(20240101).raw(3)] == GOLDEN_RAW
        and Rng(20240101).uniform(3).tolist() == GOLDEN_UNIFORM
        and Rng(20240101, (5,)).normal(5).tolist() == GOLDEN_NORMAL_KEY5
    )
    report(10, same and golden, f"byte-identical reruns {same}, golden PRNG vectors {golden}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
