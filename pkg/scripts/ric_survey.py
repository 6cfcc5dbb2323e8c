"""How often does each ensemble clear the IHT and CoSaMP gates at desk scale?

    python3 scripts/ric_survey.py [--n 16] [--draws 30]
"""
import argparse

import numpy as np

from sparserec import certify
from sparserec.harness.instances import gen_gaussian_matrix, gen_orthogonal_subset_matrix
from sparserec.rip import ric_exact


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--draws", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n = args.n
    ensembles = {
        "gaussian m=n/2": lambda d: gen_gaussian_matrix(n // 2, n, args.seed, (d,)),
        "orthogonal m=n-1": lambda d: gen_orthogonal_subset_matrix(n - 1, n, args.seed, (d,)),
        "orthogonal m=n-2": lambda d: gen_orthogonal_subset_matrix(n - 2, n, args.seed, (d,)),
        "flat m=n-1": lambda d: gen_orthogonal_subset_matrix(n - 1, n, args.seed, (d,), flat=True),
    }
    print(f"{'ensemble':18s} {'k':>2s} {'median d3k':>10s} {'IHT ok':>7s} {'median d4k':>10s} {'CoSaMP ok':>9s}")
    for name, make in ensembles.items():
        for k in (1, 2):
            d3, d4 = [], []
            for d in range(args.draws):
                A = make(d)
                d3.append(ric_exact(A, min(3 * k, n)).delta)
                d4.append(ric_exact(A, min(4 * k, n)).delta)
            iht_ok = np.mean(np.array(d3) < certify.IHT_THRESHOLD)
            cos_ok = np.mean(np.array(d4) < certify.COSAMP_THRESHOLD)
            print(f"{name:18s} {k:2d} {np.median(d3):10.3f} {iht_ok:7.0%} {np.median(d4):10.3f} {cos_ok:9.0%}")


if __name__ == "__main__":
    main()
