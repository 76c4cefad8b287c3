"""Kaczmarz projection solvers for ranking from comparisons.

``kacz_step`` projects the iterate onto one violated comparison halfspace
(optionally relaxed by ``omega``); ``cautious_step`` additionally refuses
any projection that would move the induced ranking by ``alpha`` or more
positions in Hamming distance. ``run`` drives either step over a sampled
comparison stream.

The run loop works on a Python list and inlines the step arithmetic; it
performs exactly the same floating-point operations as ``kacz_step`` so
iterates agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import metrics
from .core import (
    DEFAULT_EPSILON,
    Comparison,
    Ranking,
    RankingLike,
    _as_scores,
    as_order,
    ranking_from_scores,
)
from .sampling import (
    ComparisonSampler,
    SamplerSpec,
    full_comparison_set,
    full_system,
    random_stream,
    subset_sample,
)

KACZ = "kacz"
CAUTIOUS = "cautious"
VARIANTS = (KACZ, CAUTIOUS)
TRACE_EXTRAS = ("kendall", "cayley", "distance")


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``alpha=None`` means unlimited cautiousness, i.e. plain KaczRank.
    ``init`` picks the starting iterate when none is passed to ``run``:
    ``"zero"`` or ``"uniform"`` (seeded entries in [0, 1)).
    ``hit_rule`` decides what counts as reaching the target: ``"ranking"``
    (the extracted ranking equals the truth) or ``"feasible"`` (the
    iterate satisfies every true comparison with slack ``epsilon``).
    """

    epsilon: float = DEFAULT_EPSILON
    max_iterations: int = 10_000
    alpha: int | None = None
    omega: float = 1.0
    record_every: int = 10
    k_list: tuple[int, ...] = (1, 5, 10)
    trace_extras: tuple[str, ...] = ()
    init: str = "zero"
    early_stop: bool = True
    hit_rule: str = "ranking"

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.alpha is not None and self.alpha < 1:
            raise ValueError("alpha must be at least 1 (or None for unlimited)")
        if not 0.0 < self.omega < 2.0:
            raise ValueError("omega must lie in (0, 2)")
        if self.record_every < 1:
            raise ValueError("record_every must be positive")
        if any(k < 1 for k in self.k_list):
            raise ValueError("k-distances need k >= 1")
        unknown = set(self.trace_extras) - set(TRACE_EXTRAS)
        if unknown:
            raise ValueError(f"unknown trace extras {sorted(unknown)}")
        if self.init not in ("zero", "uniform"):
            raise ValueError("init must be 'zero' or 'uniform'")
        if self.hit_rule not in ("ranking", "feasible"):
            raise ValueError("hit_rule must be 'ranking' or 'feasible'")


@dataclass
class SolverState:
    iterate: np.ndarray
    iteration: int = 0
    hit_iteration: int | None = None
    accepted: int = 0

    @property
    def ranking(self) -> Ranking:
        return ranking_from_scores(self.iterate)


@dataclass
class Trace:
    """Distances to the truth sampled along a run.

    ``columns`` maps a metric name (``hamming``, ``k5``, ``kendall``,
    ``cayley``, ``distance``) to one value per entry of ``iterations``.
    """

    iterations: list[int] = field(default_factory=list)
    columns: dict[str, list[float]] = field(default_factory=dict)

    def append(self, t: int, values: dict[str, float]) -> None:
        if self.iterations and t <= self.iterations[-1]:
            raise ValueError("trace iterations must increase")
        self.iterations.append(t)
        for name, v in values.items():
            self.columns.setdefault(name, []).append(v)

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name], dtype=float)

    def normalized(self, name: str, n: int) -> np.ndarray:
        metric = "kdist" if name.startswith("k") and name[1:].isdigit() else name
        return self.column(name) / metrics.max_distance(metric, n)

    def __len__(self) -> int:
        return len(self.iterations)


def kacz_step(x, c: Comparison, epsilon: float = DEFAULT_EPSILON, omega: float = 1.0) -> np.ndarray:
    """One (relaxed) projection onto ``x[low] - x[high] <= -epsilon``.

    Returns a new array; ``x`` is returned unchanged (as a copy) when the
    comparison already holds.
    """
    if not 0.0 < omega < 2.0:
        raise ValueError("omega must lie in (0, 2)")
    y = np.array(x, dtype=float)
    lo, hi = c
    r = y[lo] - y[hi] + epsilon
    if r > 0:
        step = omega * r / 2.0
        y[lo] = y[lo] - step
        y[hi] = y[hi] + step
    return y


def _hamming_orders(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(1 for u, v in zip(a, b) if u != v)


def _order_of(x: Sequence[float]) -> list[int]:
    # stable sort on the negated scores: ties keep ascending index
    return sorted(range(len(x)), key=lambda i: -x[i])


def cautious_step(x, c: Comparison, epsilon: float = DEFAULT_EPSILON, alpha: int | None = None) -> np.ndarray:
    """Unit projection, kept only if it moves the ranking by fewer than ``alpha`` positions."""
    x = np.asarray(x, dtype=float)
    y = kacz_step(x, c, epsilon)
    if alpha is None:
        return y
    lo, hi = c
    if not x[lo] - x[hi] + epsilon > 0:
        return x.copy()
    if _hamming_orders(_order_of(x.tolist()), _order_of(y.tolist())) < alpha:
        return y
    return x.copy()


class _HitTracker:
    """Counts adjacent truth pairs that are out of place, updated in O(1) per step.

    For the ranking rule a pair (a above b) is in place when ``a`` sorts
    ahead of ``b``: higher score, or equal score and smaller index. For the
    feasibility rule it is in place when ``x[b] - x[a] + eps <= 0``. With
    every adjacent pair in place the whole ranking matches, and for the
    complete comparison set the iterate lies in the feasible region.
    """

    def __init__(self, truth: np.ndarray, x: list[float], rule: str, eps: float) -> None:
        self.order = truth.tolist()
        self.pos = [0] * len(self.order)
        for k, item in enumerate(self.order):
            self.pos[item] = k
        self.feasible = rule == "feasible"
        self.eps = eps
        self.ok = [self._check(x, k) for k in range(len(self.order) - 1)]
        self.bad = self.ok.count(False)

    def _check(self, x: list[float], k: int) -> bool:
        a, b = self.order[k], self.order[k + 1]
        if self.feasible:
            return x[b] - x[a] + self.eps <= 0.0
        return x[a] > x[b] or (x[a] == x[b] and a < b)

    def update(self, x: list[float], i: int, j: int) -> None:
        last = len(self.ok) - 1
        for k in {self.pos[i] - 1, self.pos[i], self.pos[j] - 1, self.pos[j]}:
            if 0 <= k <= last:
                now = self._check(x, k)
                if now != self.ok[k]:
                    self.ok[k] = now
                    self.bad += -1 if now else 1


def _record(trace: Trace, t: int, x: list[float], truth: np.ndarray, config: SolverConfig, system) -> None:
    order = np.asarray(_order_of(x), dtype=np.intp)
    values: dict[str, float] = {"hamming": metrics.hamming(order, truth)}
    for k in config.k_list:
        values[f"k{k}"] = metrics.k_distance(order, truth, k)
    if "kendall" in config.trace_extras:
        values["kendall"] = metrics.kendall_tau(order, truth)
    if "cayley" in config.trace_extras:
        values["cayley"] = metrics.cayley(order, truth)
    if "distance" in config.trace_extras:
        values["distance"] = metrics.distance_to_feasible(np.asarray(x), system)
    trace.append(t, values)


def initial_iterate(n: int, config: SolverConfig, rng: np.random.Generator) -> np.ndarray:
    if config.init == "uniform":
        return rng.random(n)
    return np.zeros(n)


def run(
    n: int,
    pool: Sequence[Comparison],
    spec: SamplerSpec,
    rng: np.random.Generator,
    config: SolverConfig = SolverConfig(),
    truth: RankingLike | None = None,
    variant: str = KACZ,
    x0=None,
    on_block: Callable[[np.ndarray, np.ndarray], None] | None = None,
) -> tuple[SolverState, Trace]:
    """Run KaczRank or CautiousRank over comparisons drawn from ``pool``.

    Parameters
    ----------
    n : int
        Number of items.
    pool : sequence of Comparison
        Comparisons to draw from; ``spec.q`` is not applied here.
    spec : SamplerSpec
        Sampling mode and flip probability.
    rng : numpy.random.Generator
        Source of all randomness (initial iterate, ordering, draws, flips).
    config : SolverConfig
    truth : ranking, optional
        Enables the trace, hit detection and, with ``config.early_stop``,
        stopping at the first hit.
    variant : {"kacz", "cautious"}
    x0 : array_like, optional
        Starting iterate; overrides ``config.init``.
    on_block : callable, optional
        Called with the ``(lows, highs)`` comparisons actually consumed,
        block by block, e.g. to feed a baseline the same stream.

    Returns
    -------
    state : SolverState
    trace : Trace
        Empty when ``truth`` is not given.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if variant == KACZ and config.alpha is not None:
        raise ValueError("alpha only applies to the cautious variant")
    if not pool:
        raise ValueError("empty comparison pool")
    for c in pool:
        if c[0] >= n or c[1] >= n:
            raise IndexError(f"comparison {tuple(c)} out of range for n={n}")
    truth_order = None
    if truth is not None:
        truth_order = as_order(Ranking(tuple(as_order(truth).tolist())))
        if truth_order.shape[0] != n:
            raise ValueError("truth ranking has the wrong length")
    x_init = initial_iterate(n, config, rng) if x0 is None else _as_scores(x0, n)
    sampler = ComparisonSampler(pool, spec, rng, truth=truth_order)

    eps = config.epsilon
    omega = config.omega
    alpha = config.alpha if variant == CAUTIOUS else None
    every = config.record_every
    limit = config.max_iterations
    x = x_init.tolist()
    cur = _order_of(x) if alpha is not None else None
    state = SolverState(iterate=x_init.copy())
    trace = Trace()
    tracker = None
    system = None
    if truth_order is not None:
        tracker = _HitTracker(truth_order, x, config.hit_rule, eps)
        if "distance" in config.trace_extras:
            system = full_system(truth_order, eps)
        _record(trace, 0, x, truth_order, config, system)
        if tracker.bad == 0:
            state.hit_iteration = 0
    stop_on_hit = tracker is not None and config.early_stop

    t = 0
    accepted = 0
    done = stop_on_hit and state.hit_iteration is not None
    while not done and t < limit:
        lows, highs = sampler.next_block()
        if lows.shape[0] == 0:
            break
        lows = lows.tolist()
        highs = highs.tolist()
        used = 0
        for lo, hi in zip(lows, highs):
            if t >= limit:
                break
            t += 1
            used += 1
            r = x[lo] - x[hi] + eps
            if r > 0:
                step = omega * r / 2.0
                if alpha is None:
                    x[lo] = x[lo] - step
                    x[hi] = x[hi] + step
                    accepted += 1
                    changed = True
                else:
                    y = list(x)
                    y[lo] = y[lo] - step
                    y[hi] = y[hi] + step
                    cand = _order_of(y)
                    changed = _hamming_orders(cur, cand) < alpha
                    if changed:
                        x = y
                        cur = cand
                        accepted += 1
                if changed and tracker is not None:
                    tracker.update(x, lo, hi)
                    if tracker.bad == 0 and state.hit_iteration is None:
                        state.hit_iteration = t
            if truth_order is not None and t % every == 0:
                _record(trace, t, x, truth_order, config, system)
            if stop_on_hit and state.hit_iteration is not None:
                done = True
                break
        if on_block is not None and used:
            on_block(np.asarray(lows[:used], dtype=np.intp), np.asarray(highs[:used], dtype=np.intp))
    if t == 0 and not done:
        raise ValueError("comparison pool exhausted before the first iteration")
    if truth_order is not None and trace.iterations[-1] != t:
        _record(trace, t, x, truth_order, config, system)
    state.iterate = np.asarray(x)
    state.iteration = t
    state.accepted = accepted
    return state, trace


@dataclass(frozen=True)
class Trial:
    """Everything produced by one seeded trial of ``simulate``."""

    seed: int
    truth: Ranking
    pool_size: int
    state: SolverState
    trace: Trace


def simulate(
    n: int,
    seed: int,
    spec: SamplerSpec = SamplerSpec(),
    config: SolverConfig = SolverConfig(),
    variant: str = KACZ,
    on_block: Callable[[np.ndarray, np.ndarray], None] | None = None,
) -> Trial:
    """One trial: random truth, subset by ``spec.q``, then ``run``.

    The truth, the subset and the run all draw from one PCG64 stream
    seeded with ``seed``, in that order.
    """
    rng = random_stream(seed)
    truth = Ranking.random(n, rng)
    pool = full_comparison_set(n, truth)
    if spec.q < 1.0:
        pool = subset_sample(pool, spec.q, rng)
    state, trace = run(n, pool, spec, rng, config, truth=truth, variant=variant, on_block=on_block)
    return Trial(seed, truth, len(pool), state, trace)


@dataclass(frozen=True)
class HittingSummary:
    """Per-trial hitting times with order statistics.

    Trials that never hit are censored: they enter ``values`` as
    ``max_iterations`` and are flagged in ``censored``.
    """

    values: tuple[int, ...]
    censored: tuple[bool, ...]
    median: float
    q25: float
    q75: float
    mean: float

    @property
    def n_censored(self) -> int:
        return sum(self.censored)


def summarize_hits(hits: Sequence[int | None], max_iterations: int) -> HittingSummary:
    if not hits:
        raise ValueError("need at least one trial")
    values = tuple(max_iterations if h is None else int(h) for h in hits)
    arr = np.asarray(values, dtype=float)
    q25, med, q75 = np.percentile(arr, [25, 50, 75])
    return HittingSummary(
        values=values,
        censored=tuple(h is None for h in hits),
        median=float(med),
        q25=float(q25),
        q75=float(q75),
        mean=float(arr.mean()),
    )


def hitting_time(
    n: int,
    trials: int,
    config: SolverConfig = SolverConfig(),
    spec: SamplerSpec = SamplerSpec(),
    variant: str = KACZ,
    base_seed: int = 0,
) -> HittingSummary:
    """Hitting times over ``trials`` runs seeded ``base_seed + i``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    hits = [
        simulate(n, base_seed + i, spec, config, variant).state.hit_iteration
        for i in range(trials)
    ]
    return summarize_hits(hits, config.max_iterations)

