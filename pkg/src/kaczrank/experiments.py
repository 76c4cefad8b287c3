"""Seeded experiment grids and their result tables.

An ``ExperimentSpec`` names a kind of experiment and its grid. Running it
simulates every (cell, trial) pair, trial ``i`` seeded ``base_seed + i``,
and collects one ``Row`` per recorded value, followed by median and
quartile rows per cell. Every output file carries the full spec in its
header, so ``spec_from_meta`` plus ``run_experiment`` rebuilds the table
exactly.

Kinds
-----
trace
    Distance-to-truth curves (raw and normalized) for every metric.
partial-sweep, partial-noisy-sweep, noise-sweep, alpha-sweep
    End-of-run distances over the ``q`` / ``p`` / ``alpha`` grids.
    ``noise-sweep`` runs KaczRank and CautiousRank side by side.
scaling
    Hitting times over ``n_grid``, stopping at the first hit.
baseline-compare
    KaczRank and Rank Centrality fed the very same comparison stream.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__, metrics
from .baselines import WinRecord, rank_centrality
from .core import DEFAULT_EPSILON
from .io import ResultTable, Row, write_table
from .sampling import MODES, WITH_REPLACEMENT, SamplerSpec
from .solvers import CAUTIOUS, KACZ, VARIANTS, SolverConfig, simulate

KINDS = (
    "trace",
    "partial-sweep",
    "scaling",
    "alpha-sweep",
    "noise-sweep",
    "partial-noisy-sweep",
    "baseline-compare",
)
BASELINE = "rank-centrality"
DEFAULT_CAUTIOUS_ALPHA = 4


class ExperimentError(RuntimeError):
    pass


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _alpha(text: str) -> int | None:
    text = text.strip()
    return None if text in ("inf", "none", "") else int(text)


def _alphas(text: str) -> tuple[int | None, ...]:
    return tuple(_alpha(t) for t in text.split(","))


def _show_alpha(a: int | None) -> str:
    return "inf" if a is None else str(a)


def _join(values) -> str:
    return ",".join(repr(v) if isinstance(v, float) else _show_alpha(v) for v in values)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment.

    ``n`` is the item count for every kind except ``scaling``, which
    sweeps ``n_grid``. ``alpha_grid`` is used only by ``alpha-sweep``;
    ``None`` stands for unlimited cautiousness.
    """

    kind: str
    n: int = 50
    trials: int = 20
    max_iterations: int = 10_000
    epsilon: float = DEFAULT_EPSILON
    k_list: tuple[int, ...] = (1, 5, 10)
    variant: str = KACZ
    alpha: int | None = None
    q_grid: tuple[float, ...] = (1.0,)
    p_grid: tuple[float, ...] = (0.0,)
    base_seed: int = 0
    n_grid: tuple[int, ...] = (5, 10, 20, 50, 100)
    alpha_grid: tuple[int | None, ...] = (1, 2, 4, 8, 16, 20, None)
    mode: str = WITH_REPLACEMENT
    omega: float = 1.0
    init: str = "uniform"
    record_every: int = 10
    regularization: float = 0.01

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("q_grid", "p_grid", "n_grid", "alpha_grid", "k_list"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if any(not 0.0 < q <= 1.0 for q in self.q_grid):
            raise ValueError("q values must lie in (0, 1]")
        if any(not 0.0 <= p < 0.5 for p in self.p_grid):
            raise ValueError("p values must lie in [0, 1/2)")
        if min(self.n_grid) < 2 or self.n < 2:
            raise ValueError("need at least two items")

    def to_items(self) -> dict[str, str]:
        """Settings as ``key=value`` strings, keys named after the CLI flags."""
        return {
            "kind": self.kind,
            "n": str(self.n),
            "trials": str(self.trials),
            "iters": str(self.max_iterations),
            "epsilon": repr(self.epsilon),
            "k-list": _join(self.k_list),
            "variant": self.variant,
            "alpha": _show_alpha(self.alpha),
            "q": _join(self.q_grid),
            "p": _join(self.p_grid),
            "seed": str(self.base_seed),
            "n-grid": _join(self.n_grid),
            "alpha-grid": _join(self.alpha_grid),
            "mode": self.mode,
            "omega": repr(self.omega),
            "init": self.init,
            "record-every": str(self.record_every),
            "regularization": repr(self.regularization),
        }

    @classmethod
    def from_items(cls, items: dict[str, str]) -> "ExperimentSpec":
        parsers = {
            "kind": ("kind", str),
            "n": ("n", int),
            "trials": ("trials", int),
            "iters": ("max_iterations", int),
            "epsilon": ("epsilon", float),
            "k-list": ("k_list", _ints),
            "variant": ("variant", str),
            "alpha": ("alpha", _alpha),
            "q": ("q_grid", _floats),
            "p": ("p_grid", _floats),
            "seed": ("base_seed", int),
            "n-grid": ("n_grid", _ints),
            "alpha-grid": ("alpha_grid", _alphas),
            "mode": ("mode", str),
            "omega": ("omega", float),
            "init": ("init", str),
            "record-every": ("record_every", int),
            "regularization": ("regularization", float),
        }
        kwargs = {}
        for key, value in items.items():
            if key not in parsers:
                raise ValueError(f"unknown spec key {key!r}")
            name, parse = parsers[key]
            try:
                kwargs[name] = parse(value.strip())
            except ValueError as exc:
                raise ValueError(f"bad value for {key!r}: {value!r} ({exc})") from None
        if "kind" not in kwargs:
            raise ValueError("spec needs a 'kind'")
        return cls(**kwargs)


def parse_spec_text(text: str) -> dict[str, str]:
    """``key=value`` lines with ``#`` comments, as used by ``--spec`` files."""
    items = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        items[key.strip().lstrip("-")] = value.strip()
    return items


def table_meta(spec: ExperimentSpec, metric_names) -> dict[str, str]:
    meta = {"version": __version__, "seed": str(spec.base_seed)}
    meta.update({f"spec.{k}": v for k, v in spec.to_items().items()})
    meta["metrics"] = ",".join(metric_names)
    return meta


def spec_from_meta(meta: dict[str, str]) -> ExperimentSpec:
    return ExperimentSpec.from_items({k[5:]: v for k, v in meta.items() if k.startswith("spec.")})


class Cell(NamedTuple):
    variant: str
    n: int
    q: float
    p: float
    alpha: int | None


def cells(spec: ExperimentSpec) -> list[Cell]:
    """Grid points of the experiment, in output order."""
    kind = spec.kind
    alpha = spec.alpha if spec.variant == CAUTIOUS else None
    if kind == "scaling":
        return [Cell(spec.variant, n, q, p, alpha) for n in spec.n_grid for q in spec.q_grid for p in spec.p_grid]
    if kind == "alpha-sweep":
        return [
            Cell(CAUTIOUS, spec.n, q, p, a)
            for q in spec.q_grid
            for p in spec.p_grid
            for a in spec.alpha_grid
        ]
    if kind == "noise-sweep":
        cautious = spec.alpha if spec.alpha is not None else DEFAULT_CAUTIOUS_ALPHA
        return [
            cell
            for q in spec.q_grid
            for p in spec.p_grid
            for cell in (Cell(KACZ, spec.n, q, p, None), Cell(CAUTIOUS, spec.n, q, p, cautious))
        ]
    return [Cell(spec.variant, spec.n, q, p, alpha) for q in spec.q_grid for p in spec.p_grid]


def _distance_names(spec: ExperimentSpec) -> list[str]:
    return ["hamming"] + [f"k{k}" for k in spec.k_list] + ["kendall", "cayley"]


def metric_names(spec: ExperimentSpec) -> list[str]:
    base = _distance_names(spec)
    if spec.kind == "trace":
        return base + [f"{m}_norm" for m in base] + ["hit", "censored"]
    if spec.kind == "scaling":
        return ["hit", "censored"]
    return base + ["hit", "censored"]


def _metric_kind(name: str) -> str:
    return "kdist" if name.startswith("k") and name[1:].isdigit() else name


def _final_distances(order, truth, k_list) -> dict[str, float]:
    out = {"hamming": float(metrics.hamming(order, truth))}
    for k in k_list:
        out[f"k{k}"] = float(metrics.k_distance(order, truth, k))
    out["kendall"] = float(metrics.kendall_tau(order, truth))
    out["cayley"] = float(metrics.cayley(order, truth))
    return out


def run_trial(spec: ExperimentSpec, cell: Cell, trial: int) -> list[Row]:
    """Simulate one trial of one cell and return its rows."""
    config = SolverConfig(
        epsilon=spec.epsilon,
        max_iterations=spec.max_iterations,
        alpha=cell.alpha if cell.variant == CAUTIOUS else None,
        omega=spec.omega,
        record_every=spec.record_every,
        k_list=spec.k_list,
        trace_extras=("kendall", "cayley") if spec.kind == "trace" else (),
        init=spec.init,
        early_stop=spec.kind == "scaling",
    )
    sampler = SamplerSpec(spec.mode, cell.q, cell.p)
    wins = WinRecord.empty(cell.n) if spec.kind == "baseline-compare" else None
    result = simulate(
        cell.n,
        spec.base_seed + trial,
        sampler,
        config,
        cell.variant,
        on_block=wins.update if wins is not None else None,
    )

    def row(variant, iteration, metric, value):
        return Row(variant, cell.n, cell.q, cell.p, cell.alpha, iteration, trial, metric, float(value))

    hit = result.state.hit_iteration
    hit_rows = [
        row(cell.variant, None, "hit", spec.max_iterations if hit is None else hit),
        row(cell.variant, None, "censored", hit is None),
    ]
    if spec.kind == "scaling":
        return hit_rows

    rows: list[Row] = []
    if spec.kind == "trace":
        trace = result.trace
        names = _distance_names(spec)
        for idx, t in enumerate(trace.iterations):
            for name in names:
                raw = trace.columns[name][idx]
                rows.append(row(cell.variant, t, name, raw))
                rows.append(row(cell.variant, t, f"{name}_norm", metrics.normalize(raw, _metric_kind(name), cell.n)))
        return rows + hit_rows

    final = _final_distances(result.state.ranking, result.truth, spec.k_list)
    rows.extend(row(cell.variant, None, k, v) for k, v in final.items())
    rows.extend(hit_rows)
    if wins is not None:
        _, baseline_rank = rank_centrality(wins, spec.regularization)
        final = _final_distances(baseline_rank, result.truth, spec.k_list)
        rows.extend(row(BASELINE, None, k, v) for k, v in final.items())
    return rows


def aggregate(rows: list[Row]) -> list[Row]:
    """Median and quartile rows for every (coordinates, iteration, metric) group.

    Percentiles use linear interpolation, so an even trial count takes the
    midpoint of the two middle values as the median.
    """
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        if isinstance(r.trial, int):
            groups.setdefault((r.variant, r.n, r.q, r.p, r.alpha, r.iteration, r.metric), []).append(r.value)
    out = []
    for (variant, n, q, p, alpha, iteration, metric), values in groups.items():
        q25, med, q75 = np.percentile(np.asarray(values), [25, 50, 75])
        for tag, v in (("median", med), ("q25", q25), ("q75", q75)):
            out.append(Row(variant, n, q, p, alpha, iteration, tag, metric, float(v)))
    return out


def _job(args: tuple[ExperimentSpec, Cell, int]) -> list[Row]:
    return run_trial(*args)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ResultTable:
    """Run every (cell, trial) pair and return the full table.

    Rows come out in cell order then trial order whatever ``workers`` is,
    followed by the aggregate rows.

    Raises
    ------
    ExperimentError
        Naming the cell and trial of the first failure.
    """
    jobs = [(spec, cell, t) for cell in cells(spec) for t in range(spec.trials)]
    rows: list[Row] = []
    if workers <= 1:
        for job in jobs:
            try:
                rows.extend(_job(job))
            except Exception as exc:
                raise ExperimentError(f"cell {job[1]._asdict()} trial {job[2]} failed: {exc}") from exc
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_job, job) for job in jobs]
            for job, fut in zip(jobs, futures):
                try:
                    rows.extend(fut.result())
                except Exception as exc:
                    for f in futures:
                        f.cancel()
                    raise ExperimentError(f"cell {job[1]._asdict()} trial {job[2]} failed: {exc}") from exc
    rows.extend(aggregate(rows))
    return ResultTable(table_meta(spec, metric_names(spec)), rows)


def _group_key(r: Row) -> tuple[int, float, float]:
    return (r.n, r.q, r.p)


def file_name(kind: str, n: int, q: float, p: float) -> str:
    return f"{kind}_n{n}_q{q:g}_p{p:g}.csv"


def split_table(spec: ExperimentSpec, table: ResultTable) -> dict[str, ResultTable]:
    """One table per (n, q, p) cell group, keyed by file name."""
    parts: dict[str, ResultTable] = {}
    for r in table.rows:
        name = file_name(spec.kind, *_group_key(r))
        parts.setdefault(name, ResultTable(dict(table.meta), [])).rows.append(r)
    return parts


def write_experiment(spec: ExperimentSpec, table: ResultTable, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    return [write_table(part, out_dir / name) for name, part in split_table(spec, table).items()]


def with_overrides(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    return replace(spec, **{k: v for k, v in changes.items() if v is not None})

