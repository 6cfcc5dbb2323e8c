"""Empirical success-rate grid over (m, k); writes CSV for plotting.

    python3 scripts/run_phase_transition.py [--config scripts/phase_gaussian_cosamp.json] [--out phase.csv]
"""
import argparse
import time
from pathlib import Path

from sparserec.harness.phase import load_phase_config, phase_transition, worker_count

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", default=str(HERE / "phase_gaussian_cosamp.json"))
    ap.add_argument("--out", default="phase.csv")
    args = ap.parse_args()

    cfg = load_phase_config(args.config)
    cells = len(cfg.m_values) * len(cfg.k_values)
    print(f"{cells} cells x {cfg.trials} trials, {cfg.algorithm} on {cfg.ensemble}, workers={worker_count()}")
    t0 = time.perf_counter()
    grid = phase_transition(cfg)
    Path(args.out).write_text(grid.to_csv())
    print(f"wrote {args.out} in {time.perf_counter() - t0:.1f}s")

    # crude text view: one row per k, one column per m
    print("k\\m " + " ".join(f"{m:>4d}" for m in grid.m_values))
    for j, k in enumerate(grid.k_values):
        print(f"{k:>3d} " + " ".join(f"{grid.success_rate[i, j]:4.2f}" for i in range(len(grid.m_values))))


if __name__ == "__main__":
    main()
