"""End-to-end acceptance checks, one test per criterion.

Each test measures its own wall time against the allowed budget. A line
per criterion is printed in the terminal summary (see conftest.py).

The simulation criteria start every trial from a uniform random iterate,
as the experiment harness does by default.
"""

import itertools
import math
import time

import numpy as np
import pytest

from kaczrank import metrics, theory
from kaczrank.baselines import accumulate, rank_centrality
from kaczrank.core import Comparison, Ranking, feasible_point, residual, verify_feasible
from kaczrank.experiments import ExperimentSpec, run_experiment
from kaczrank.io import parse_comparisons
from kaczrank.sampling import SamplerSpec, full_comparison_set, full_system, random_stream
from kaczrank.solvers import CAUTIOUS, KACZ, SolverConfig, kacz_step, run, simulate

from .conftest import WORKED_EXAMPLE

EXPECTED_EXAMPLE = (1, 2, 3, 0)


class Budget:
    def __init__(self, seconds: float) -> None:
        self.seconds = seconds
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def check(self) -> None:
        assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def _median(table, **where):
    (value,) = table.values(trial="median", **where)
    return value


def test_criterion_01_worked_example(record_property):
    """1. worked example: KaczRank and Rank Centrality both return 1 2 3 0 (< 1 s)"""
    budget = Budget(1.0)
    n, comps = parse_comparisons(WORKED_EXAMPLE)
    state, _ = run(n, comps, SamplerSpec(), random_stream(0), SolverConfig())
    _, rc = rank_centrality(accumulate(comps, n))
    record_property("detail", f"kacz={state.ranking.order} rc={rc.order} t={budget.elapsed:.2f}s")
    assert state.ranking.order == EXPECTED_EXAMPLE
    assert rc.order == EXPECTED_EXAMPLE
    budget.check()


def test_criterion_02_full_noiseless_hamming(record_property):
    """2. n=50 full noiseless: median Hamming reaches 0 by 15000 iterations, k-distances no later (< 1 min)"""
    budget = Budget(60.0)
    spec = ExperimentSpec("trace", n=50, trials=20, max_iterations=15_000, epsilon=1e-5, k_list=(1, 5, 10))
    table = run_experiment(spec)
    medians = {r.iteration: r.value for r in table.select(trial="median", metric="hamming")}
    zero_at = min((t for t, v in medians.items() if v == 0), default=None)
    record_property("detail", f"median Hamming first 0 at t={zero_at} t={budget.elapsed:.1f}s")
    assert zero_at is not None and zero_at <= 15_000
    first_zero: dict[tuple, int] = {}
    for r in table.rows:
        if isinstance(r.trial, int) and r.iteration is not None and r.value == 0:
            key = (r.trial, r.metric)
            first_zero[key] = min(first_zero.get(key, r.iteration), r.iteration)
    for trial in range(spec.trials):
        ham = first_zero.get((trial, "hamming"), math.inf)
        for k in spec.k_list:
            assert first_zero.get((trial, f"k{k}"), math.inf) <= ham
    budget.check()


def test_criterion_03_normalized_curves(record_property):
    """3. all five normalized distances vanish at the hitting iteration and stay in [0, 1] (< 1 min)"""
    budget = Budget(60.0)
    n = 50
    config = SolverConfig(max_iterations=200_000, init="uniform", k_list=(5, 10),
                          trace_extras=("kendall", "cayley"), record_every=10)
    names = ("hamming", "k5", "k10", "kendall", "cayley")
    hits = []
    for seed in range(20):
        trial = simulate(n, seed, SamplerSpec(), config)
        hit = trial.state.hit_iteration
        assert hit is not None and trial.trace.iterations[-1] == hit
        hits.append(hit)
        for name in names:
            curve = trial.trace.normalized(name, n)
            assert curve[-1] == 0.0
            assert np.all((curve >= 0.0) & (curve <= 1.0))
    record_property("detail", f"median hit {np.median(hits):.0f} t={budget.elapsed:.1f}s")
    budget.check()


def test_criterion_04_partial_data(record_property):
    """4. n=50, q=0.5: median 5-distance <= 4 while median Hamming > 0 (< 2 min)"""
    budget = Budget(120.0)
    spec = ExperimentSpec("partial-sweep", n=50, trials=20, max_iterations=10_000, q_grid=(0.5,), k_list=(5,))
    table = run_experiment(spec)
    k5 = _median(table, metric="k5")
    ham = _median(table, metric="hamming")
    record_property("detail", f"median k5={k5:g} hamming={ham:g} t={budget.elapsed:.1f}s")
    assert k5 <= 4
    assert ham > 0
    budget.check()


def test_criterion_05_scaling(record_property):
    """5. log-log slope of median hitting time over n in {5,...,100} lies in [1, 4] (< 10 min)"""
    budget = Budget(600.0)
    spec = ExperimentSpec("scaling", trials=50, n_grid=(5, 10, 20, 50, 100), max_iterations=2_000_000)
    table = run_experiment(spec)
    ns = np.array(spec.n_grid, dtype=float)
    med = np.array([_median(table, n=int(n), metric="hit") for n in ns])
    censored = sum(r.value for r in table.rows if r.metric == "censored" and isinstance(r.trial, int))
    slope = np.polyfit(np.log(ns), np.log(med), 1)[0]
    record_property("detail", f"slope={slope:.2f} medians={med.astype(int).tolist()} censored={censored:g} t={budget.elapsed:.1f}s")
    assert censored == 0
    assert 1.0 <= slope <= 4.0
    budget.check()


def test_criterion_06_noisy_data(record_property):
    """6. n=20 noisy: KaczRank median Hamming > 0 at p=0.1; CautiousRank (alpha=4) median 5-distance 0 for p <= 0.2 (< 5 min)"""
    budget = Budget(300.0)
    spec = ExperimentSpec("noise-sweep", n=20, trials=20, max_iterations=10_000, alpha=4,
                          p_grid=(0.05, 0.1, 0.15, 0.2), k_list=(5,))
    table = run_experiment(spec)
    kacz = _median(table, variant=KACZ, p=0.1, metric="hamming")
    cautious = {p: _median(table, variant=CAUTIOUS, p=p, metric="k5") for p in spec.p_grid}
    record_property("detail", f"kacz hamming@0.1={kacz:g} cautious k5={cautious} t={budget.elapsed:.1f}s")
    assert kacz > 0
    assert all(v == 0 for v in cautious.values())
    budget.check()


def test_criterion_07_alpha_sweep(record_property):
    """7. n=20 alpha sweep: best alpha beats both alpha=1 and unlimited at p in {0.05, 0.1} (< 5 min)"""
    budget = Budget(300.0)
    spec = ExperimentSpec("alpha-sweep", n=20, trials=20, max_iterations=10_000,
                          alpha_grid=(1, 2, 4, 8, 16, 20, None), p_grid=(0.05, 0.1))
    table = run_experiment(spec)
    details = []
    for p in spec.p_grid:
        med = {a: _median(table, p=p, alpha=a, metric="hamming") for a in spec.alpha_grid}
        best = min((a for a in spec.alpha_grid if a is not None), key=lambda a: med[a])
        details.append(f"p={p}: best alpha={best} ({med[best]:g}) vs 1 ({med[1]:g}) vs inf ({med[None]:g})")
        assert med[best] < med[1]
        assert med[best] < med[None]
    record_property("detail", "; ".join(details) + f" t={budget.elapsed:.1f}s")
    budget.check()


def test_criterion_08_theory_vs_simulation(record_property):
    """8. coupon counts within 2% of 10^5-trial Monte Carlo; mean hitting times for n in {2, 3} under both bounds (< 2 min)"""
    budget = Budget(120.0)
    rng = random_stream(2024)
    details = []
    for n in (3, 4, 5):
        for replace, exact in ((True, theory.coupon_with_replacement(n)), (False, theory.coupon_without_replacement(n))):
            sim = theory.coupon_monte_carlo(n, 100_000, rng, replace).mean()
            details.append(f"n={n} {'with' if replace else 'without'}: {sim:.3f}/{exact:.3f}")
            assert abs(sim - exact) <= 0.02 * exact
    for n in (2, 3):
        bound = theory.expected_hit_bound(n).value
        noisy_bound = theory.expected_hit_bound_noisy(n, 0.25).value
        for p, limit in ((0.0, bound), (0.25, noisy_bound)):
            config = SolverConfig(max_iterations=100_000, init="uniform", early_stop=True)
            hits = [simulate(n, 10_000 * n + s, SamplerSpec(p=p), config).state.hit_iteration for s in range(2000)]
            assert None not in hits
            mean = float(np.mean(hits))
            details.append(f"n={n} p={p}: mean hit {mean:.2f} <= {limit:.4g}")
            assert mean <= limit
    record_property("detail", "; ".join(details) + f" t={budget.elapsed:.1f}s")
    budget.check()


def test_criterion_09_contraction(record_property):
    """9. n=10: trial-averaged squared distance to the feasible set contracts at rate <= 1 - 1/9 + 0.02 over 200 iterations (< 5 min)"""
    budget = Budget(300.0)
    n, horizon, trials = 10, 200, 200
    config = SolverConfig(max_iterations=horizon, init="uniform", early_stop=False,
                          record_every=horizon, trace_extras=("distance",))
    d0, dT = [], []
    for seed in range(trials):
        trace = simulate(n, seed, SamplerSpec(), config).trace
        assert trace.iterations == [0, horizon]
        d0.append(trace.columns["distance"][0] ** 2)
        dT.append(trace.columns["distance"][1] ** 2)
    ratio = (np.mean(dT) / np.mean(d0)) ** (1.0 / horizon)
    limit = theory.contraction_rate(n) + 0.02
    record_property("detail", f"observed ratio {ratio:.4f} vs limit {limit:.4f} t={budget.elapsed:.1f}s")
    assert ratio <= limit
    budget.check()


def _distance_matrix(perms, fn):
    size = len(perms)
    D = np.zeros((size, size), dtype=np.int64)
    for i, j in itertools.combinations(range(size), 2):
        D[i, j] = D[j, i] = fn(perms[i], perms[j])
    return D


def test_criterion_10_invariants(record_property):
    """10. step invariants, CautiousRank(inf) == KaczRank, exhaustive metric axioms for n <= 5, connectivity = n (< 2 min)"""
    budget = Budget(120.0)
    rng = random_stream(77)
    worst = {"drift": 0.0, "expansion": -math.inf, "landing": 0.0}
    for _ in range(2000):
        n = int(rng.integers(2, 12))
        eps = float(rng.choice([1e-5, 1e-2, 1.0]))
        truth = Ranking.random(n, rng)
        x = rng.normal(size=n) * float(rng.choice([1e-3, 1.0, 1e3]))
        lo, hi = rng.choice(n, size=2, replace=False)
        c = Comparison(int(lo), int(hi))
        y = kacz_step(x, c, eps)
        scale = 1.0 + np.abs(x).max()
        worst["drift"] = max(worst["drift"], abs(y.sum() - x.sum()) / n / scale)
        # a feasible point of any ranking consistent with c is in c's halfspace
        if truth.positions[c.low] < truth.positions[c.high]:
            truth = Ranking(tuple(np.asarray(truth.order)[::-1].tolist()))
        z = feasible_point(truth, eps)
        worst["expansion"] = max(worst["expansion"], np.linalg.norm(y - z) - np.linalg.norm(x - z))
        if residual(c, x, eps) > 0:
            worst["landing"] = max(worst["landing"], abs(residual(c, y, eps)) / scale)
        # absorption: once in the feasible set every step is the identity
        system = full_system(truth, eps)
        inside = feasible_point(truth, 2 * eps) + 0.25 * eps * rng.random(n)
        assert verify_feasible(inside, system)
        for cc in system.comparisons:
            np.testing.assert_array_equal(kacz_step(inside, cc, eps), inside)
    assert worst["drift"] <= 1e-12
    assert worst["expansion"] <= 1e-9
    assert worst["landing"] <= 1e-12

    config = SolverConfig(max_iterations=2000, init="uniform", early_stop=False, trace_extras=("kendall", "cayley"))
    for seed in range(5):
        a = simulate(12, seed, SamplerSpec(p=0.1), config, KACZ)
        b = simulate(12, seed, SamplerSpec(p=0.1), config, CAUTIOUS)
        assert a.trace == b.trace
        np.testing.assert_array_equal(a.state.iterate, b.state.iterate)

    for n in range(1, 6):
        perms = list(itertools.permutations(range(n)))
        ham = _distance_matrix(perms, metrics.hamming)
        ken = _distance_matrix(perms, metrics.kendall_tau)
        cay = _distance_matrix(perms, metrics.cayley)
        for D in (ham, ken, cay):
            off = ~np.eye(len(perms), dtype=bool)
            assert np.all(D[off] > 0) and np.all(np.diag(D) == 0)
            assert np.array_equal(D, D.T)
            # d(i, k) <= d(i, j) + d(j, k) for every triple, indexed [i, j, k]
            assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :])
        assert np.all(cay <= ken)
        for k in range(1, n + 1):
            K = _distance_matrix(perms, lambda a, b: metrics.k_distance(a, b, k))
            assert np.array_equal(K, K.T) and np.all(K <= ham)
        assert np.array_equal(_distance_matrix(perms, lambda a, b: metrics.k_distance(a, b, 1)), ham)

    for n in range(2, 51):
        assert abs(theory.complete_graph_connectivity(n) - n) <= 1e-8
    record_property("detail", f"drift={worst['drift']:.1e} expansion={worst['expansion']:.1e} landing={worst['landing']:.1e} t={budget.elapsed:.1f}s")
    budget.check()
