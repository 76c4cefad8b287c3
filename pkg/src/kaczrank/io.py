"""Comparison files and result tables.

Comparison file::

    # comments start with '#'
    n=4
    0,1        # item 0 ranks below item 1
    2,1

Result tables are CSV with a ``#``-prefixed ``key=value`` header that
echoes the experiment spec, package version and seed.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

from .core import Comparison, Ranking, RankingLike, as_order

TABLE_MAGIC = "kaczrank result table"
COLUMNS = ("variant", "n", "q", "p", "alpha", "iteration", "trial", "metric", "value")
AGGREGATES = ("median", "q25", "q75")


class FormatError(ValueError):
    pass


def parse_comparisons(text: str) -> tuple[int, list[Comparison]]:
    """Parse comparison-file text into ``(n, comparisons)``.

    Raises
    ------
    FormatError
        On a missing or malformed header, a line that is not two
        comma-separated integers, an index outside ``[0, n)``, or a
        self-comparison. The message names the offending line.
    """
    n = None
    comps: list[Comparison] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            key, sep, value = line.partition("=")
            if not sep or key.strip() != "n":
                raise FormatError(f"line {lineno}: expected header 'n=<count>', got {raw!r}")
            try:
                n = int(value.strip())
            except ValueError:
                raise FormatError(f"line {lineno}: bad item count {value.strip()!r}") from None
            if n < 2:
                raise FormatError(f"line {lineno}: need at least two items, got n={n}")
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'low,high', got {raw!r}")
        try:
            low, high = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: expected two integers, got {raw!r}") from None
        if not (0 <= low < n and 0 <= high < n):
            raise FormatError(f"line {lineno}: index out of range for n={n}: {raw!r}")
        if low == high:
            raise FormatError(f"line {lineno}: item {low} compared with itself")
        comps.append(Comparison(low, high))
    if n is None:
        raise FormatError("missing 'n=<count>' header")
    return n, comps


def read_comparisons(path: str | Path) -> tuple[int, list[Comparison]]:
    return parse_comparisons(Path(path).read_text())


def format_comparisons(n: int, comparisons: Sequence[Comparison]) -> str:
    lines = [f"n={n}"] + [f"{c[0]},{c[1]}" for c in comparisons]
    return "\n".join(lines) + "\n"


def format_ranking(r: RankingLike, one_per_line: bool = False) -> str:
    items = [str(i) for i in as_order(r).tolist()]
    return ("\n" if one_per_line else " ").join(items)


class Row(NamedTuple):
    """One result cell value.

    ``alpha`` is ``None`` for unlimited cautiousness (or not applicable);
    ``iteration`` is ``None`` for end-of-run values; ``trial`` is a trial
    index or one of ``AGGREGATES``.
    """

    variant: str
    n: int
    q: float
    p: float
    alpha: int | None
    iteration: int | None
    trial: int | str
    metric: str
    value: float


@dataclass
class ResultTable:
    meta: dict[str, str] = field(default_factory=dict)
    rows: list[Row] = field(default_factory=list)

    @property
    def metrics(self) -> tuple[str, ...]:
        declared = self.meta.get("metrics", "")
        return tuple(m for m in declared.split(",") if m)

    def select(self, **where) -> list[Row]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in where.items())]

    def values(self, **where) -> list[float]:
        return [r.value for r in self.select(**where)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_table(table: ResultTable) -> str:
    declared = set(table.metrics)
    buf = _io.StringIO()
    buf.write(f"# {TABLE_MAGIC}\n")
    for key, value in table.meta.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in table.rows:
        if row.metric not in declared:
            raise ValueError(f"metric {row.metric!r} not declared in table metadata")
        alpha = "inf" if row.alpha is None else row.alpha
        writer.writerow([_fmt(v) for v in (row.variant, row.n, row.q, row.p, alpha, row.iteration, row.trial, row.metric, row.value)])
    return buf.getvalue()


def parse_table(text: str) -> ResultTable:
    meta: dict[str, str] = {}
    body = []
    lines = text.splitlines()
    if not lines or lines[0] != f"# {TABLE_MAGIC}":
        raise FormatError("not a result table")
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        else:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader, None)
    if tuple(header or ()) != COLUMNS:
        raise FormatError(f"unexpected columns {header}")
    rows = []
    for rec in reader:
        variant, n, q, p, alpha, iteration, trial, metric, value = rec
        rows.append(
            Row(
                variant=variant,
                n=int(n),
                q=float(q),
                p=float(p),
                alpha=None if alpha == "inf" else int(alpha),
                iteration=None if iteration == "" else int(iteration),
                trial=trial if trial in AGGREGATES else int(trial),
                metric=metric,
                value=float(value),
            )
        )
    return ResultTable(meta, rows)


def write_table(table: ResultTable, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_table(table))
    return path


def read_table(path: str | Path) -> ResultTable:
    return parse_table(Path(path).read_text())


def ranking_from_text(text: str) -> Ranking:
    return Ranking(tuple(int(tok) for tok in text.split()))
