import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kaczrank.core import Comparison, Ranking, feasible_point, ranking_from_scores, residual, verify_feasible
from kaczrank.sampling import (
    ADVERSARIAL,
    FRIENDLY,
    WITHOUT_REPLACEMENT,
    SamplerSpec,
    backbone,
    full_comparison_set,
    full_system,
    random_stream,
)
from kaczrank.solvers import (
    CAUTIOUS,
    KACZ,
    SolverConfig,
    Trace,
    cautious_step,
    hitting_time,
    kacz_step,
    run,
    simulate,
    summarize_hits,
)

scores = st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=8)


def test_kacz_step_known_value():
    y = kacz_step([1.0, 0.0], Comparison(0, 1), epsilon=0.5)
    np.testing.assert_allclose(y, [0.25, 0.75])
    assert residual(Comparison(0, 1), y, 0.5) == 0.0


def test_kacz_step_leaves_satisfied_rows_alone():
    x = np.array([0.0, 1.0])
    np.testing.assert_array_equal(kacz_step(x, Comparison(0, 1)), x)


@pytest.mark.parametrize("omega", [0.0, 2.0, -1.0])
def test_omega_range(omega):
    with pytest.raises(ValueError):
        kacz_step([0.0, 0.0], Comparison(0, 1), omega=omega)


@given(scores, st.data())
@settings(max_examples=200, deadline=None)
def test_step_invariants(x, data):
    n = len(x)
    lo = data.draw(st.integers(0, n - 1))
    hi = data.draw(st.integers(0, n - 1).filter(lambda j: j != lo))
    eps = data.draw(st.sampled_from([1e-5, 0.1, 1.0]))
    c = Comparison(lo, hi)
    x = np.asarray(x)
    y = kacz_step(x, c, eps)
    scale = 1.0 + np.abs(x).max()
    assert abs(y.mean() - x.mean()) <= 1e-12 * scale
    if residual(c, x, eps) > 0:
        assert abs(residual(c, y, eps)) <= 1e-12 * scale
    # Non-expansive toward any point satisfying the row: take a feasible
    # point of a ranking that agrees with the comparison.
    order = [hi, lo] + [i for i in range(n) if i not in (lo, hi)]
    z = feasible_point(Ranking(tuple(order)), eps)
    assert np.linalg.norm(y - z) <= np.linalg.norm(x - z) + 1e-9


def test_absorption_in_feasible_set(rng):
    truth = Ranking.random(7, rng)
    system = full_system(truth, 1e-3)
    x = feasible_point(truth, 2e-3) + rng.normal(scale=1e-5, size=7)
    assert verify_feasible(x, system)
    for c in system.comparisons:
        np.testing.assert_array_equal(kacz_step(x, c, 1e-3), x)


@pytest.mark.parametrize("seed", range(200))
def test_n_step_construction_orders_items(seed):
    # Projecting every lower item onto the top one, then onto the next, ...
    # uses exactly N comparisons and always leaves the items in true order.
    rng = random_stream(seed)
    n = int(rng.integers(2, 9))
    eps = float(rng.choice([1e-5, 0.1, 1.0]))
    x = rng.normal(size=n) * float(rng.choice([0.01, 1.0, 100.0]))
    steps = 0
    for top in range(n - 1, 0, -1):
        for i in range(top):
            x = kacz_step(x, Comparison(i, top), eps)
            steps += 1
    assert steps == n * (n - 1) // 2
    assert ranking_from_scores(x).order == tuple(range(n - 1, -1, -1))


def test_cautious_step_rejects_large_reorder():
    x = np.array([0.0, 0.0, 0.0, 0.0])
    # moving item 0 below everything changes all four positions
    np.testing.assert_array_equal(cautious_step(x, Comparison(0, 3), 1e-5, alpha=2), x)
    y = cautious_step(x, Comparison(0, 3), 1e-5, alpha=5)
    assert y[0] < 0 < y[3]


def test_run_is_deterministic(worked_example):
    n, comps = worked_example
    a, _ = run(n, comps, SamplerSpec(), random_stream(9))
    b, _ = run(n, comps, SamplerSpec(), random_stream(9))
    np.testing.assert_array_equal(a.iterate, b.iterate)


def test_run_worked_example(worked_example):
    n, comps = worked_example
    state, trace = run(n, comps, SamplerSpec(), random_stream(0))
    assert state.ranking.order == (1, 2, 3, 0)
    assert state.iteration == 10_000
    assert len(trace) == 0
    assert abs(state.iterate.sum()) < 1e-12


def test_run_matches_step_by_step(worked_example):
    n, comps = worked_example
    config = SolverConfig(max_iterations=50, init="uniform")
    seen = []
    state, _ = run(n, comps, SamplerSpec(), random_stream(4), config,
                   on_block=lambda lo, hi: seen.extend(zip(lo.tolist(), hi.tolist())))
    assert len(seen) == 50
    x = random_stream(4).random(n)
    for c in seen:
        x = kacz_step(x, Comparison(*c), config.epsilon)
    np.testing.assert_array_equal(x, state.iterate)


def test_cautious_unlimited_equals_kacz():
    config = SolverConfig(max_iterations=3000, init="uniform", trace_extras=("kendall", "cayley"), early_stop=False)
    spec = SamplerSpec(p=0.1)
    a = simulate(15, 21, spec, config, KACZ)
    b = simulate(15, 21, spec, config, CAUTIOUS)
    assert a.trace == b.trace
    np.testing.assert_array_equal(a.state.iterate, b.state.iterate)


def test_alpha_requires_cautious():
    with pytest.raises(ValueError):
        run(2, [Comparison(0, 1)], SamplerSpec(), random_stream(0), SolverConfig(alpha=3), variant=KACZ)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(omega=2.0)
    with pytest.raises(ValueError):
        SolverConfig(init="gaussian")
    with pytest.raises(ValueError):
        SolverConfig(alpha=0)


def test_trace_records_stride_and_final():
    config = SolverConfig(max_iterations=95, record_every=10, early_stop=False)
    trial = simulate(6, 1, SamplerSpec(), config)
    assert trial.trace.iterations == [0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95]
    assert set(trial.trace.columns) == {"hamming", "k1", "k5", "k10"}


def test_trace_rejects_non_increasing():
    t = Trace()
    t.append(3, {"hamming": 1})
    with pytest.raises(ValueError):
        t.append(3, {"hamming": 0})


def test_early_stop_lands_on_truth():
    config = SolverConfig(max_iterations=100_000, init="uniform", record_every=1)
    trial = simulate(10, 3, SamplerSpec(), config)
    hit = trial.state.hit_iteration
    assert hit is not None and trial.state.iteration == hit
    assert trial.state.ranking == trial.truth
    # the hit is the first time the ranking is right
    assert all(h > 0 for h in trial.trace.columns["hamming"][:-1])


def test_feasible_hit_rule_reaches_feasible_set():
    config = SolverConfig(max_iterations=200_000, init="uniform", hit_rule="feasible", epsilon=1e-3)
    trial = simulate(6, 2, SamplerSpec(), config)
    assert verify_feasible(trial.state.iterate, full_system(trial.truth, 1e-3))


def test_without_replacement_stops_when_pool_is_spent():
    config = SolverConfig(max_iterations=1000, early_stop=False)
    trial = simulate(5, 0, SamplerSpec(WITHOUT_REPLACEMENT), config)
    assert trial.state.iteration == 10


def test_friendly_stream_ranks_after_backbone():
    # with the backbone first, one pass over it from a zero start orders every item
    truth = Ranking((4, 2, 0, 3, 1))
    pool = full_comparison_set(5, truth)
    state, trace = run(5, pool, SamplerSpec(FRIENDLY), random_stream(0),
                       SolverConfig(max_iterations=10, early_stop=False, record_every=1), truth=truth)
    assert trace.columns["hamming"][len(backbone(truth))] == 0
    assert state.hit_iteration == len(backbone(truth))


def test_adversarial_stream_finishes_with_backbone_row():
    truth = Ranking((4, 2, 0, 3, 1))
    pool = full_comparison_set(5, truth)
    seen = []
    run(5, pool, SamplerSpec(ADVERSARIAL), random_stream(0),
        SolverConfig(max_iterations=100, early_stop=False), truth=truth,
        on_block=lambda lo, hi: seen.extend(zip(lo.tolist(), hi.tolist())))
    assert len(seen) == 10
    assert Comparison(*seen[-1]) in set(backbone(truth))


def test_summarize_hits_censoring_and_midpoint_median():
    s = summarize_hits([4, None, 2, 8], max_iterations=10)
    assert s.values == (4, 10, 2, 8)
    assert s.n_censored == 1
    assert s.median == 6.0


def test_hitting_time_small():
    s = hitting_time(3, 20, SolverConfig(max_iterations=10_000, init="uniform"))
    assert s.n_censored == 0 and s.median < 100
