"""Randomised certification campaigns.

Every trial draws its data from ``Rng(seed, (trial,))`` so a campaign can be
replayed, split or parallelised without changing any individual trial. A
campaign never stops at the first violation: it runs all trials and keeps the
failing inputs as counterexamples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import certify
from ..algorithms import Algorithm, StoppingRule, run
from ..core import norm2
from ..projection import least_squares_on_support
from ..rip import check_rip_inequality_i, check_rip_inequality_ii, check_rip_inequality_iii, ric_exact
from ..thresholding import difference, union
from .instances import gen_gaussian_matrix, gen_noise, gen_orthogonal_subset_matrix, gen_sparse_signal
from .rng import Rng

__all__ = [
    "CampaignResult",
    "lemma_2_1_campaign",
    "lemma_2_2_campaign",
    "lemma_3_1_campaign",
    "lemma_3_2_campaign",
    "lemma_3_3_campaign",
    "rip_lemma_campaign",
    "theorem_campaign",
    "SUITES",
    "run_suite",
]

MAX_COUNTEREXAMPLES = 20


@dataclass
class CampaignResult:
    name: str
    seed: int
    params: dict
    trials: int = 0
    passed: int = 0
    failed: int = 0
    vacuous: int = 0
    min_slack: float = math.inf
    max_ratio: float = 0.0
    counterexamples: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0

    def add(self, check, inputs=None):
        """Tally one check; ``inputs`` is a callable producing the serialisable witness."""
        self.trials += 1
        if check.vacuous:
            self.vacuous += 1
            return
        if check.holds:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                entry = check.to_dict()
                if inputs is not None:
                    entry["inputs"] = inputs()
                self.counterexamples.append(entry)
        self.min_slack = min(self.min_slack, check.slack)
        if check.ratio is not None:
            self.max_ratio = max(self.max_ratio, check.ratio)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "params": self.params,
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.failed,
            "vacuous": self.vacuous,
            "min_slack": self.min_slack if math.isfinite(self.min_slack) else None,
            "max_ratio": self.max_ratio,
            "ok": self.ok,
            "notes": self.notes,
            "counterexamples": self.counterexamples,
        }


def _vec(v):
    return [float(a) for a in v]


def _matrix_inputs(A, **vectors):
    out = {"A": [_vec(row) for row in A]}
    for name, v in vectors.items():
        out[name] = _vec(v) if isinstance(v, np.ndarray) else v
    return out


class _RicCache:
    """Exact RICs per (matrix id, order); campaigns reuse a matrix across trials."""

    def __init__(self):
        self._store = {}

    def __call__(self, key, A, q):
        q = min(q, A.shape[1])
        if (key, q) not in self._store:
            self._store[(key, q)] = ric_exact(A, q).delta
        return self._store[(key, q)]


# -- hard thresholding -------------------------------------------------------

def _draw_xz(rng, n_min, n_max, kmax):
    n = rng.integer(n_min, n_max)
    k = rng.integer(1, n if kmax is None else min(kmax, n))
    x = np.zeros(n)
    x[rng.subset(n, k)] = rng.normal(k)
    z = rng.normal(n)
    return x, z, k


def _thresholding_campaign(name, verify, trials, seed, n_min, n_max, kmax):
    res = CampaignResult(name, seed, {"n_min": n_min, "n_max": n_max, "kmax": kmax})
    for trial in range(trials):
        x, z, k = _draw_xz(Rng(seed, (trial,)), n_min, n_max, kmax)
        res.add(verify(x, z, k), lambda: {"x": _vec(x), "z": _vec(z), "k": k})
    return res


def lemma_2_1_campaign(trials, seed, n_min=4, n_max=64, kmax=None) -> CampaignResult:
    return _thresholding_campaign("lemma-2.1", certify.verify_lemma_2_1, trials, seed, n_min, n_max, kmax)


def lemma_2_2_campaign(trials, seed, n_min=4, n_max=64, kmax=None) -> CampaignResult:
    return _thresholding_campaign("lemma-2.2", certify.verify_lemma_2_2, trials, seed, n_min, n_max, kmax)


# -- projection lemmas -------------------------------------------------------

def lemma_3_1_campaign(trials, seed) -> CampaignResult:
    """Rejection-sample ``t`` from ``[alpha3, (alpha3 + alpha1 alpha2) / (1 - alpha1)]``.

    That interval contains the whole admissible region because
    ``sqrt(t^2 + alpha2^2) <= t + alpha2``. Every fourth trial instead takes
    the largest admissible ``t`` (the root of the quadratic), where the bound
    is tightest.
    """
    res = CampaignResult("lemma-3.1", seed, {})
    rejected = 0
    for trial in range(trials):
        rng = Rng(seed, (trial,))
        while True:
            a1, a2, a3 = rng.uniform(1)[0], 3.0 * rng.uniform(1)[0], 3.0 * rng.uniform(1)[0]
            if trial % 4 == 3:
                disc = a1 * a1 * a3 * a3 + (1 - a1 * a1) * a1 * a1 * a2 * a2
                t = (a3 + math.sqrt(disc)) / (1 - a1 * a1)
            else:
                hi = (a3 + a1 * a2) / (1.0 - a1)
                t = a3 + (hi - a3) * rng.uniform(1)[0]
            check = certify.verify_lemma_3_1(a1, a2, a3, t)
            if not check.vacuous:
                break
            rejected += 1
        res.add(check, lambda: {"alpha1": a1, "alpha2": a2, "alpha3": a3, "t": t})
    res.notes["rejected_draws"] = rejected
    return res


def _projection_instance(rng, n_max, order_max, k):
    """Random orthogonal-subset or Gaussian matrix with a certified RIC below 1."""
    n = rng.integer(max(8, order_max), n_max)
    m = rng.integer(order_max, n)
    sub_seed = int(rng.raw(1)[0])
    if rng.uniform(1)[0] < 0.5:
        A = gen_orthogonal_subset_matrix(m, n, sub_seed)
    else:
        A = gen_gaussian_matrix(m, n, sub_seed)
    x = np.zeros(n)
    if rng.uniform(1)[0] < 0.5:
        x[rng.subset(n, k)] = rng.normal(k)
    else:
        # compressible signal: the tail feeds the effective noise
        x = rng.normal(n) * 0.5 ** rng.permutation(n)
    sigma = [0.0, 1e-3, 0.1][rng.integer(0, 2)]
    nu = sigma * rng.normal(m)
    return A, x, nu


def lemma_3_2_campaign(trials, seed, n_max=14, order_max=6) -> CampaignResult:
    """Least-squares error bounds on certified instances with ``|Gamma| + k <= order_max``.

    In noiseless trials whose support set covers ``supp(x)`` the residual
    vanishes, so ``Gamma`` is grown past ``Lam`` inside the zero set.
    """
    res = CampaignResult("lemma-3.2", seed, {"n_max": n_max, "order_max": order_max})
    rejected = 0
    enlarged = 0
    for trial in range(trials):
        rng = Rng(seed, (trial,))
        while True:
            k = rng.integer(1, order_max - 1)
            A, x, nu = _projection_instance(rng, n_max, order_max, k)
            n = A.shape[1]
            lam_size = rng.integer(1, order_max - k)
            Lam = rng.subset(n, lam_size)
            if rng.uniform(1)[0] < 0.3:
                # noiseless, supp(x) inside Lam: zero residual, Gamma can grow
                x = np.zeros(n)
                kk = min(k, lam_size)
                x[Lam[rng.subset(lam_size, kk)]] = rng.normal(kk)
                nu = np.zeros(A.shape[0])
            Gamma = Lam
            proj = least_squares_on_support(A, A @ x + nu, Lam)
            room = order_max - k - lam_size
            spare = difference(proj.zero_set, Lam)
            if room > 0 and spare.size:
                extra = spare[rng.subset(spare.size, min(room, spare.size))]
                Gamma = union(Lam, extra)
                enlarged += 1
            delta = ric_exact(A, min(Gamma.size + k, n)).delta
            if delta < 1.0:
                break
            rejected += 1
        on_gamma, total = certify.verify_lemma_3_2(A, x, nu, k, Lam, Gamma, delta=delta)
        inputs = lambda: _matrix_inputs(A, x=x, nu=nu, k=k, Lam=Lam.tolist(), Gamma=Gamma.tolist())  # noqa: E731
        res.add(on_gamma, inputs)
        res.add(total, inputs)
    res.notes.update(instances=trials, rejected_draws=rejected, gamma_enlarged=enlarged)
    return res


def lemma_3_3_campaign(trials, seed, n_max=14, order_max=6) -> CampaignResult:
    """Capture-set bound and its two proof identities with ``2k + beta <= order_max``."""
    res = CampaignResult("lemma-3.3", seed, {"n_max": n_max, "order_max": order_max})
    witnesses = 0
    rejected = 0
    for trial in range(trials):
        rng = Rng(seed, (trial,))
        while True:
            k = rng.integer(1, order_max // 4)
            beta = rng.integer(2 * k, order_max - 2 * k)
            A, x, nu = _projection_instance(rng, n_max, order_max, k)
            n = A.shape[1]
            delta = ric_exact(A, 2 * k + beta).delta
            if delta < 1.0:
                break
            rejected += 1
        x_p = np.zeros(n)
        kp = rng.integer(0, k)
        x_p[rng.subset(n, kp)] = rng.normal(kp)
        check, witness = certify.verify_lemma_3_3(A, x, nu, k, x_p, beta, delta=delta)
        inputs = lambda: _matrix_inputs(A, x=x, nu=nu, x_p=x_p, k=k, beta=beta)  # noqa: E731
        res.add(check, inputs)
        if witness is not None:
            witnesses += 1
            res.add(witness.ordering, inputs)
            res.add(witness.pythagoras, inputs)
            res.add(witness.omega_star_bound, inputs)
    res.notes.update(instances=trials, witnesses=witnesses, rejected_draws=rejected)
    return res


# -- restricted isometry -----------------------------------------------------

def rip_lemma_campaign(part, trials, seed, m=8, n=12, t_max=6, matrices=10) -> CampaignResult:
    """Random checks of one of the three restricted isometry inequalities against exact RICs."""
    if part not in ("i", "ii", "iii"):
        raise ValueError("part must be 'i', 'ii' or 'iii'")
    res = CampaignResult(f"rip-{part}", seed, {"m": m, "n": n, "t_max": t_max, "matrices": matrices})
    pool = []
    for j in range(matrices):
        if j % 2:
            pool.append(gen_orthogonal_subset_matrix(m, n, seed, (1 << 32, j)))
        else:
            pool.append(gen_gaussian_matrix(m, n, seed, (1 << 32, j)))
    ric = _RicCache()
    for trial in range(trials):
        rng = Rng(seed, (trial,))
        j = rng.integer(0, matrices - 1)
        A = pool[j]
        t = rng.integer(2 if part == "i" else 1, t_max)
        if part == "i":
            s = rng.integer(1, t - 1)
            idx = rng.subset(n, t)
            order = idx[rng.permutation(t)]
            u = np.zeros(n)
            v = np.zeros(n)
            u[order[:s]] = rng.normal(s)
            v[order[s:]] = rng.normal(t - s)
            check = check_rip_inequality_i(A, u, v, ric(j, A, t))
            inputs = lambda: _matrix_inputs(A, u=u, v=v)  # noqa: E731
        else:
            idx = rng.subset(n, t)
            split = rng.integer(1, t) if part == "iii" and t > 1 else t
            supp_u = idx[:split] if part == "iii" else idx[rng.subset(t, rng.integer(1, t))]
            S = idx[split:] if part == "iii" else idx[rng.subset(t, rng.integer(0, t))]
            u = np.zeros(n)
            u[supp_u] = rng.normal(supp_u.size)
            if part == "ii":
                check = check_rip_inequality_ii(A, u, S, ric(j, A, t))
            else:
                check = check_rip_inequality_iii(A, u, S, ric(j, A, t))
            inputs = lambda: _matrix_inputs(A, v=u, S=S.tolist())  # noqa: E731
        res.add(check, inputs)
    return res


# -- convergence theorems ----------------------------------------------------

def theorem_campaign(algorithm, instances, seed, n=16, k_values=(1, 2), sigma=1e-3,
                     max_attempts=None, iterations=60) -> CampaignResult:
    """End-to-end runs on orthogonal-subset instances whose exact RIC passes the gate.

    Attempts cycle through the Haar-type ensemble with ``m = n - 1`` and the
    flat-complement variant, and through ``k_values``; an attempt counts toward
    ``instances`` only if its exact ``delta_3k`` (IHT) or ``delta_4k`` (CoSaMP)
    is below the algorithm's threshold. Each certified instance is run once
    noiselessly and once with noise of level ``sigma``.
    """
    algorithm = Algorithm(algorithm)
    threshold = certify.IHT_THRESHOLD if algorithm is Algorithm.IHT else certify.COSAMP_THRESHOLD
    mult = 3 if algorithm is Algorithm.IHT else 4
    res = CampaignResult(f"theorem-{algorithm.value}", seed,
                         {"n": n, "k_values": list(k_values), "sigma": sigma, "iterations": iterations})
    max_attempts = max_attempts or 20 * instances
    certified = {"haar": 0, "flat": 0}
    gated = 0
    worst_noiseless_error = 0.0
    slow = 0
    attempt = 0
    while sum(certified.values()) < instances and attempt < max_attempts:
        flat = attempt % 2 == 1
        k = k_values[(attempt // 2) % len(k_values)]
        A = gen_orthogonal_subset_matrix(n - 1, n, seed, (attempt, 0), flat=flat)
        attempt += 1
        delta = ric_exact(A, min(mult * k, n)).delta
        if delta >= threshold:
            gated += 1
            continue
        certified["flat" if flat else "haar"] += 1
        x = gen_sparse_signal(n, k, seed, (attempt - 1, 1))
        for noisy in (False, True):
            nu = gen_noise(n - 1, sigma if noisy else 0.0, seed, (attempt - 1, 2))
            y = A @ x + nu
            rule = StoppingRule(max_iterations=iterations, residual_tol=0.0 if noisy else None)
            trace = run(algorithm, A, y, k, rule=rule)
            checks = certify.check_trace_against_theorem(trace, A, x, nu, k, algorithm, delta=delta)
            inputs = lambda: _matrix_inputs(A, x=x, nu=nu, k=k, delta=delta)  # noqa: E731
            for c in checks:
                res.add(c, inputs)
            if not noisy:
                errs = [norm2(it - x) for it in trace.iterates[:51]]
                hit = next((p for p, e in enumerate(errs) if e <= 1e-8), None)
                if hit is None:
                    slow += 1
                worst_noiseless_error = max(worst_noiseless_error, min(errs))
    res.notes.update(
        certified=sum(certified.values()),
        certified_haar=certified["haar"],
        certified_flat=certified["flat"],
        gated_out=gated,
        attempts=attempt,
        noiseless_runs_slow=slow,
        worst_noiseless_error_within_50=worst_noiseless_error,
    )
    return res


SUITES = {
    "2.1": lambda trials, seed, n, kmax: lemma_2_1_campaign(trials, seed, n_max=n or 64, kmax=kmax),
    "2.2": lambda trials, seed, n, kmax: lemma_2_2_campaign(trials, seed, n_max=n or 64, kmax=kmax),
    "3.1": lambda trials, seed, n, kmax: lemma_3_1_campaign(trials, seed),
    "3.2": lambda trials, seed, n, kmax: lemma_3_2_campaign(trials, seed, n_max=n or 14),
    "3.3": lambda trials, seed, n, kmax: lemma_3_3_campaign(trials, seed, n_max=n or 14),
}


def run_suite(suite, trials, seed, n=None, kmax=None) -> list[CampaignResult]:
    names = list(SUITES) if suite == "all" else [suite]
    return [SUITES[name](trials, seed, n, kmax) for name in names]
