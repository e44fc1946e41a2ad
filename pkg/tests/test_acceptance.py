"""Acceptance gate: one test per criterion, each at its stated tolerance."""
import io
import math
import time

import numpy as np

from omssc.adversaries import CountBad, LastR, block_contents, mae_dynamic_lb, planted_trace, random_trace
from omssc.algorithms import LazyRounding, mae, mtf_count, mtf_first
from omssc.cli import verify_identities
from omssc.core import Permutation, RequestSet, Trace, access_cost
from omssc.harness import TraceSource, audit_lazy_rounding, play
from omssc.mwu import Distribution, expected_access_by_subset, greedy_rounding, greedy_rounding_blocks
from omssc.oracles import (
    cover_schedule,
    mtf_opt_replay,
    opt_dynamic_dp,
    opt_static_bruteforce,
    theorem1_bound,
)

LRA_RUNS = [(seed, 4 + seed % 3, 1 + seed % 3) for seed in range(20)]
_lra_cache: dict = {}


def lra_run(seed, n, r):
    key = (seed, n, r)
    if key not in _lra_cache:
        alg = LazyRounding(n, r=r)
        ep = play(alg, TraceSource(planted_trace(n, r, 1000, seed)), 1000)
        static = opt_static_bruteforce(ep.trace).cost
        _lra_cache[key] = (alg, ep, {a.name: a for a in audit_lazy_rounding(alg, ep, static)})
    return _lra_cache[key]


def test_criterion_01_counting_identities(criterion):
    start = time.perf_counter()
    ok = verify_identities(8, io.StringIO())
    elapsed = time.perf_counter() - start
    criterion(1, "counting identities n<=8", ok and elapsed < 10, f"exact, {elapsed:.2f}s")


def test_criterion_02_averaging_adversary(criterion):
    start = time.perf_counter()
    n, m = 7, 5000
    worst = math.inf
    for r in (1, 2, 3):
        bound = float(theorem1_bound(n, r))
        for factory in (mtf_first, mae, mtf_count):
            ep = play(factory(n), LastR(n, r), m)
            ratio = ep.ledger.total / opt_static_bruteforce(ep.trace).cost
            worst = min(worst, ratio - (bound - 0.05))
    elapsed = time.perf_counter() - start
    criterion(2, "last_r ratio >= theorem1_bound - 0.05", worst >= 0 and elapsed < 60,
              f"worst margin {worst:.4f}, {elapsed:.1f}s")


def _random_distribution(n, rng):
    size = math.factorial(n)
    kind = rng.integers(3)
    if kind == 0:
        probs = np.zeros(size)
        support = rng.choice(size, size=int(rng.integers(1, 6)), replace=False)
        probs[support] = rng.random(len(support))
    elif kind == 1:
        probs = rng.dirichlet(np.full(size, 0.05))
    else:
        probs = np.exp(-3 * rng.exponential(3.0, size))
    return Distribution.from_weights(n, probs)


def test_criterion_03_rounding_bound(criterion):
    rng = np.random.default_rng(2024)
    worst_bound = worst_block = math.inf
    for i in range(200):
        n, r = (4, 5, 6)[i % 3], 1 + (i // 3) % 3
        d = _random_distribution(n, rng)
        rho = greedy_rounding(d, r)
        for subset, e in expected_access_by_subset(d, range(1, n + 1), r).items():
            worst_bound = min(worst_bound, 2 * r * e - access_cost(rho, RequestSet(subset)))
        for j, (block, e) in enumerate(greedy_rounding_blocks(d, r), start=1):
            if len(block) == r:
                worst_block = min(worst_block, e - (j + 1) / 2)
    ok = worst_bound >= -1e-9 and worst_block >= -1e-9
    criterion(3, "rounding <= 2r E and block E_j >= (j+1)/2", ok,
              f"margins {worst_bound:.4g}, {worst_block:.4g}")


def test_criterion_04_tv_audits(criterion):
    worst_step = worst_phase = math.inf
    phases = 0
    for seed, n, r in LRA_RUNS:
        alg, _, audits = lra_run(seed, n, r)
        worst_step = min(worst_step, audits["switch_cost"].worst_margin)
        worst_phase = min(worst_phase, audits["mwu_cost_dtv"].worst_margin)
        phases += audits["mwu_cost_dtv"].checks
    ok = worst_step >= 0 and worst_phase >= 0 and phases > 0
    criterion(4, "per-step TV and per-phase MWU cost", ok,
              f"{phases} completed phases, margins {worst_step:.3g}, {worst_phase:.3g}")


def test_criterion_05_lazy_rounding_audits(criterion):
    names = ("alg_acc_cost", "moving_cost", "theorem2")
    worst = {k: math.inf for k in names}
    for seed, n, r in LRA_RUNS:
        _, _, audits = lra_run(seed, n, r)
        for k in names:
            worst[k] = min(worst[k], audits[k].worst_margin)
    ok = all(v >= 0 for v in worst.values())
    criterion(5, "LRA access/moving/end-to-end", ok, ", ".join(f"{k} {v:.4g}" for k, v in worst.items()))


def test_criterion_06_mae_static_lower_bound(criterion):
    details, ok = [], True
    for r, k in ((3, 5), (4, 6)):
        n, m = r * k, 100 * k
        adv = LastR(n, r)
        ep = play(mae(n), adv, m)
        solution = adv.offline_solution(ep.trace, ep.initial)
        exact = all(s.access == n - r + 1 for s in ep.ledger.steps)
        ratio = ep.ledger.total / solution.total
        target = 0.9 * (r + 1) * (r * k - r + 1) / k
        per_k = solution.total * k / m
        ok &= exact and ratio >= target and per_k == k * (k + 1) / 2
        details.append(f"(r={r},k={k}) ratio {ratio:.2f} >= {target:.2f}")
    criterion(6, "MAE vs last_r with n=rk", ok, "; ".join(details))


def test_criterion_07_mae_dynamic_lower_bound(criterion):
    start = time.perf_counter()
    r, phases = 3, 50
    ratios, ok = [], True
    for k in (3, 4, 5):
        adv, schedule = mae_dynamic_lb(k, r)
        alg = mae(adv.n)
        per_phase = schedule.requests_per_phase
        ledger_steps = []
        blocks = (block_contents(alg.current, k, r, 2), block_contents(alg.current, k, r, k + 2))
        sets = []
        for _ in range(phases):
            for _ in range(per_phase):
                s = adv.next_request(alg.current)
                ledger_steps.append(alg.serve(s))
                sets.append(s)
            now = (block_contents(alg.current, k, r, 2), block_contents(alg.current, k, r, k + 2))
            ok &= now == (blocks[1], blocks[0])
            blocks = now
        trace = Trace(adv.n, r, tuple(sets))
        offline = adv.offline_solution(trace, Permutation.identity(adv.n))
        for ph in range(phases):
            window = slice(ph * per_phase, (ph + 1) * per_phase)
            ok &= sum(s.access + s.moving for s in ledger_steps[window]) > r * k**3
            if ph > 0:
                ok &= sum(s.access + s.moving for s in offline.steps[window]) <= 4 * k * k
        ratio = sum(s.access + s.moving for s in ledger_steps) / offline.total
        ok &= ratio > 0.8 * k
        ratios.append(ratio)
    ok &= ratios == sorted(ratios) and len(set(ratios)) == 3
    elapsed = time.perf_counter() - start
    criterion(7, "MAE dynamic lower bound r=3, k=3..5", ok and elapsed < 60,
              "ratios " + ", ".join(f"{x:.2f}" for x in ratios) + f", {elapsed:.1f}s")


def test_criterion_08_count_sqrt_growth(criterion):
    ratios = {}
    for n in (16, 25, 36):
        adv = CountBad(n)
        ep = play(mtf_count(n), adv, 40 * adv.phase_length)
        ratios[n] = ep.ledger.total / adv.offline_solution(ep.trace, ep.initial).total
    growth = ratios[36] / ratios[16]
    criterion(8, "MTF_count ratio(36)/ratio(16) >= 1.3", growth >= 1.3,
              ", ".join(f"n={n}: {v:.2f}" for n, v in ratios.items()) + f", growth {growth:.3f}")


def test_criterion_09_dynamic_sandwich(criterion):
    ok, worst = True, 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        r = int(rng.integers(1, n + 1))
        m = int(rng.integers(1, 41))
        trace = random_trace(n, r, m, seed)
        res = opt_dynamic_dp(trace)
        replay = mtf_opt_replay(trace, cover_schedule(trace, res.trajectory)).total
        ok &= res.cost <= replay <= 2 * res.cost
        worst = max(worst, replay / res.cost)
    criterion(9, "dynamic DP <= MTF_OPT <= 2 DP", ok, f"worst replay/DP {worst:.3f}")


def test_criterion_10_separation_example(criterion):
    b, n = 50, 4
    trace = Trace(n, 1, tuple(RequestSet((x,)) for x in range(1, n + 1) for _ in range(b)))
    static = opt_static_bruteforce(trace).cost
    dynamic = opt_dynamic_dp(trace).cost
    criterion(10, "static >= 5 x dynamic on {1}^b..{4}^b", static >= 5 * dynamic,
              f"static {static}, dynamic {dynamic}, ratio {static / dynamic:.3f}")
