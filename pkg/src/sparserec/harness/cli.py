"""Command-line entry point: ``sparserec <subcommand> ...``.

Exit codes: 0 success, 1 a check failed, 2 malformed input, 3 the instance
generated by ``certify-run`` did not pass the RIC gate.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .. import certify
from ..algorithms import Algorithm, StoppingRule, run
from ..core import DimensionError, FormatError, load_matrix, load_vector, norm2
from ..rip import DEFAULT_BUDGET, BudgetExceededError, ric_exact
from ..thresholding import restrict, top_k_indices
from .campaigns import SUITES, run_suite
from .instances import gen_noise, gen_orthogonal_subset_matrix, gen_sparse_signal
from .phase import load_phase_config, phase_transition

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_GATE = 0, 1, 2, 3


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path=None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load(loader, path, flag):
    try:
        return loader(path)
    except FileNotFoundError:
        raise UsageError(flag, f"file not found: {path}") from None
    except FormatError as exc:
        raise UsageError(flag, str(exc)) from None


def _require(cond, flag, message):
    if not cond:
        raise UsageError(flag, message)


# -- subcommands -------------------------------------------------------------

def cmd_ric(args) -> int:
    A = _load(load_matrix, args.matrix, "--matrix")
    n = A.shape[1]
    _require(1 <= args.order <= n, "--order", f"must lie in [1, {n}], got {args.order}")
    try:
        est = ric_exact(A, args.order, budget=args.budget)
    except BudgetExceededError as exc:
        raise UsageError("--order", str(exc)) from None
    if args.json:
        _emit(_dump(est.to_dict()))
    else:
        _emit(
            f"delta_{est.order} = {est.delta!r}\n"
            f"supports enumerated: {est.supports_enumerated}\n"
            f"attained on: {list(map(int, est.argmax_support))}\n"
        )
    return EXIT_OK


def cmd_recover(args) -> int:
    A = _load(load_matrix, args.matrix, "--matrix")
    m, n = A.shape
    x = _load(load_vector, args.signal, "--signal")
    _require(x.size == n, "--signal", f"length {x.size} does not match the {n} matrix columns")
    nu = np.zeros(m)
    if args.noise is not None:
        nu = _load(load_vector, args.noise, "--noise")
        _require(nu.size == m, "--noise", f"length {nu.size} does not match the {m} matrix rows")
    _require(1 <= args.k <= n, "--k", f"must lie in [1, {n}], got {args.k}")
    if args.alg == "cosamp":
        _require(3 * args.k <= n, "--k", f"CoSaMP needs 3k <= n = {n}, got k={args.k}")
    _require(args.max_iter >= 1, "--max-iter", "must be at least 1")
    _require(args.rtol is None or args.rtol >= 0, "--rtol", "must be nonnegative")
    y = A @ x + nu
    tol = None if args.rtol is None else args.rtol * norm2(y)
    trace = run(args.alg, A, y, args.k, rule=StoppingRule(max_iterations=args.max_iter, residual_tol=tol))
    x_S = restrict(x, top_k_indices(x, args.k))
    err = norm2(trace.final - x_S)
    summary = {
        "algorithm": args.alg,
        "k": args.k,
        "iterations": trace.iterations,
        "stop_reason": trace.stop_reason.value,
        "final_error": err,
        "relative_error": err / max(norm2(x_S), 1.0),
        "final_residual": trace.residual_norms[-1],
        "estimate": [float(v) for v in trace.final],
    }
    if args.trace is not None:
        _emit(_dump(trace.to_dict()), args.trace)
    _emit(_dump(summary))
    return EXIT_OK


def cmd_verify_lemmas(args) -> int:
    _require(args.trials >= 1, "--trials", "must be at least 1")
    _require(0 <= args.seed < 2**64, "--seed", "must be a 64-bit unsigned integer")
    if args.n is not None:
        _require(args.n >= 8 if args.suite in ("3.2", "3.3") else args.n >= 4, "--n",
                 "must be at least 4 (at least 8 for the 3.2 and 3.3 suites)")
    _require(args.kmax is None or args.kmax >= 1, "--kmax", "must be at least 1")
    results = run_suite(args.suite, args.trials, args.seed, n=args.n, kmax=args.kmax)
    ok = all(r.ok for r in results)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify-lemmas",
        "suite": args.suite,
        "trials": args.trials,
        "seed": args.seed,
        "ok": ok,
        "campaigns": [r.to_dict() for r in results],
    }
    _emit(_dump(report), args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_certify_run(args) -> int:
    alg = Algorithm(args.alg)
    _require(args.n >= 2, "--n", "must be at least 2")
    _require(1 <= args.m <= args.n, "--m", f"need 1 <= m <= n = {args.n}, got {args.m}")
    _require(args.k >= 1, "--k", "must be at least 1")
    mult = 3 if alg is Algorithm.IHT else 4
    _require(mult * args.k <= args.n, "--k", f"{args.alg} certification needs {mult}k <= n = {args.n}")
    _require(0 <= args.seed < 2**64, "--seed", "must be a 64-bit unsigned integer")
    _require(args.sigma >= 0, "--sigma", "must be nonnegative")
    _require(args.max_iter >= 1, "--max-iter", "must be at least 1")
    if args.flat:
        _require(args.m < args.n, "--flat", "needs m < n")
    order = mult * args.k
    if math.comb(args.n, order) > DEFAULT_BUDGET:
        raise UsageError("--n", f"C({args.n}, {order}) supports exceed the enumeration budget {DEFAULT_BUDGET}")

    A = gen_orthogonal_subset_matrix(args.m, args.n, args.seed, (0,), flat=args.flat)
    x = gen_sparse_signal(args.n, args.k, args.seed, (1,))
    nu = gen_noise(args.m, args.sigma, args.seed, (2,))
    est = ric_exact(A, order)
    threshold = certify.IHT_THRESHOLD if alg is Algorithm.IHT else certify.COSAMP_THRESHOLD
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "certify-run",
        "algorithm": alg.value,
        "n": args.n,
        "m": args.m,
        "k": args.k,
        "seed": args.seed,
        "sigma": args.sigma,
        "ensemble": "orthogonal_flat" if args.flat else "orthogonal_subset",
        "ric_order": order,
        "delta": est.delta,
        "threshold": threshold,
        "gate": "passed" if est.delta < threshold else "failed",
    }
    if est.delta >= threshold:
        _emit(_dump(report), args.out)
        sys.stderr.write(f"gate: delta_{order} = {est.delta!r} is not below {threshold!r}; no checks run\n")
        return EXIT_GATE

    if alg is Algorithm.IHT:
        report["rho"] = certify.iht_contraction_factor(est.delta).rho
    else:
        consts = certify.cosamp_constants(est.delta)
        report["rho"], report["C"] = consts.rho, consts.C
    rule = StoppingRule(max_iterations=args.max_iter, residual_tol=0.0 if args.sigma > 0 else None)
    trace = run(alg, A, A @ x + nu, args.k, rule=rule)
    checks = certify.check_trace_against_theorem(trace, A, x, nu, args.k, alg, delta=est.delta)
    failed = sum(not c.holds for c in checks)
    report.update(
        iterations=trace.iterations,
        stop_reason=trace.stop_reason.value,
        final_error=norm2(trace.final - x),
        passed=len(checks) - failed,
        failed=failed,
        ok=failed == 0,
        checks=[c.to_dict() for c in checks],
    )
    _emit(_dump(report), args.out)
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def cmd_tightness(args) -> int:
    try:
        inst = certify.tightness_instance(args.n, args.k, args.tau, args.alpha, args.eps)
    except ValueError as exc:
        flag = "--tau" if "tau" in str(exc) else "--alpha" if "alpha" in str(exc) else "--eps" if "eps" in str(exc) else "--n"
        raise UsageError(flag, str(exc)) from None
    measured = inst.measured_ratio
    report = {
        "n": args.n,
        "k": args.k,
        "tau": args.tau,
        "alpha": args.alpha,
        "eps": args.eps,
        "x": [float(v) for v in inst.x],
        "z": [float(v) for v in inst.z],
        "measured_ratio_sq": measured,
        "predicted_ratio_sq": inst.predicted_ratio,
        "golden_ratio_sq": certify.GOLDEN**2,
        "abs_difference": abs(measured - inst.predicted_ratio),
    }
    _emit(_dump(report))
    return EXIT_OK


def cmd_phase(args) -> int:
    try:
        config = load_phase_config(args.config)
    except FileNotFoundError:
        raise UsageError("--config", f"file not found: {args.config}") from None
    except ValueError as exc:
        raise UsageError("--config", str(exc)) from None
    try:
        grid = phase_transition(config)
    except ValueError as exc:  # bad SPARSEREC_THREADS
        raise UsageError("SPARSEREC_THREADS", str(exc)) from None
    _emit(grid.to_csv(), args.out)
    return EXIT_OK


def _verdict(delta, rate_half, threshold):
    if delta <= rate_half:
        return "rate-0.5 regime"
    if delta < threshold:
        return "guaranteed"
    return "no guarantee"


def cmd_constants(args) -> int:
    if args.delta3k is not None:
        d = args.delta3k
        _require(0 <= d < 1, "--delta3k", f"must lie in [0, 1), got {d}")
        c = certify.iht_contraction_factor(d)
        lines = [
            "algorithm: iht",
            f"delta_3k = {d!r}",
            f"rho = {c.rho!r}",
            f"threshold = {certify.IHT_THRESHOLD!r}",
            f"verdict: {_verdict(d, certify.IHT_RATE_HALF_THRESHOLD, certify.IHT_THRESHOLD)}",
        ]
    else:
        d = args.delta4k
        _require(0 <= d < 1, "--delta4k", f"must lie in [0, 1), got {d}")
        c = certify.cosamp_constants(d)
        lines = [
            "algorithm: cosamp",
            f"delta_4k = {d!r}",
            f"rho = {c.rho!r}",
            f"C = {c.C!r}",
            f"threshold = {certify.COSAMP_THRESHOLD!r}",
            f"verdict: {_verdict(d, certify.COSAMP_RATE_HALF_THRESHOLD, certify.COSAMP_THRESHOLD)}",
        ]
    _emit("\n".join(lines) + "\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparserec", description="Sparse recovery with certified error bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ric", help="exact restricted isometry constant by enumeration")
    p.add_argument("--matrix", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ric)

    p = sub.add_parser("recover", help="run IHT or CoSaMP on y = A x + noise")
    p.add_argument("--alg", choices=["iht", "cosamp"], required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--noise")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--rtol", type=float, help="stop once ||y - A x|| <= rtol * ||y||")
    p.add_argument("--trace", help="write the full iteration trace as JSON here")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify-lemmas", help="randomised campaigns for the thresholding and projection bounds")
    p.add_argument("--suite", choices=["all", *SUITES], required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, help="largest ambient dimension drawn")
    p.add_argument("--kmax", type=int, help="largest sparsity drawn (thresholding suites)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("certify-run", help="gate an instance on its exact RIC, run, check every iteration")
    p.add_argument("--alg", choices=["iht", "cosamp"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--flat", action="store_true", help="use the flat-complement orthogonal ensemble")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify_run)

    p = sub.add_parser("tightness", help="instance attaining the hard-thresholding error ratio")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_tightness)

    p = sub.add_parser("phase", help="success-rate grid over (m, k)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("constants", help="contraction factors and verdicts for a given RIC")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--delta3k", type=float)
    g.add_argument("--delta4k", type=float)
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DimensionError) as exc:
        sys.stderr.write(f"sparserec {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
