"""Full certification campaign: every bound, at the acceptance sizes, into one JSON report.

    python3 scripts/certify_campaign.py [--seed 1] [--scale 1.0] [--out certification.json]

``--scale`` multiplies every trial count (0.01 gives a quick smoke run).
"""
import argparse
import json
import time

from sparserec.harness import campaigns as cp


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--out", default="certification.json")
    args = ap.parse_args()

    def size(n):
        return max(1, int(n * args.scale))

    jobs = [
        ("lemma-2.1", lambda s: cp.lemma_2_1_campaign(size(100_000), s)),
        ("lemma-2.2", lambda s: cp.lemma_2_2_campaign(size(100_000), s)),
        ("lemma-3.1", lambda s: cp.lemma_3_1_campaign(size(100_000), s)),
        ("lemma-3.2", lambda s: cp.lemma_3_2_campaign(size(1000), s)),
        ("lemma-3.3", lambda s: cp.lemma_3_3_campaign(size(1000), s)),
        ("rip-i", lambda s: cp.rip_lemma_campaign("i", size(10_000), s)),
        ("rip-ii", lambda s: cp.rip_lemma_campaign("ii", size(10_000), s)),
        ("rip-iii", lambda s: cp.rip_lemma_campaign("iii", size(10_000), s)),
        ("theorem-iht", lambda s: cp.theorem_campaign("iht", size(100), s)),
        ("theorem-cosamp", lambda s: cp.theorem_campaign("cosamp", size(100), s)),
    ]
    results = []
    for j, (name, job) in enumerate(jobs):
        t0 = time.perf_counter()
        res = job(args.seed + j)
        print(f"{name:16s} {res.passed:7d} pass {res.failed:4d} fail {res.vacuous:5d} vacuous "
              f"{time.perf_counter() - t0:6.1f}s")
        results.append(res.to_dict())
    ok = all(r["ok"] for r in results)
    with open(args.out, "w") as fh:
        json.dump({"schema_version": 1, "seed": args.seed, "scale": args.scale, "ok": ok, "campaigns": results},
                  fh, indent=2)
    print(("all checks hold" if ok else "VIOLATIONS FOUND") + f"; report in {args.out}")


if __name__ == "__main__":
    main()
