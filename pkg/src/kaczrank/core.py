"""Comparisons, comparison systems, rankings and the shared geometry.

A comparison ``(low, high)`` asserts ``x[low] < x[high]``. With a slack
``epsilon > 0`` it becomes the halfspace ``x[low] - x[high] <= -epsilon``,
whose normal is the sparse row with ``+1`` at ``low`` and ``-1`` at
``high``. Score vectors are plain float64 numpy arrays; a ranking lists
items best-first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

DEFAULT_EPSILON = 1e-5


class _Pair(NamedTuple):
    low: int
    high: int


class Comparison(_Pair):
    """Observation that item ``low`` scores strictly below item ``high``."""

    __slots__ = ()

    def __new__(cls, low: int, high: int) -> "Comparison":
        low, high = int(low), int(high)
        if low == high:
            raise ValueError(f"self-comparison of item {low}")
        if low < 0 or high < 0:
            raise ValueError(f"negative item index in ({low}, {high})")
        return super().__new__(cls, low, high)

    def flipped(self) -> "Comparison":
        return Comparison(self.high, self.low)


def _check_index(c: Comparison, n: int) -> None:
    if c.low >= n or c.high >= n:
        raise IndexError(f"comparison {tuple(c)} out of range for n={n}")


@dataclass(frozen=True)
class ComparisonSystem:
    """The feasibility system ``Q x <= -epsilon`` built from comparisons.

    Duplicated comparisons are kept; they are separate rows of ``Q``.
    """

    n: int
    comparisons: tuple[Comparison, ...]
    epsilon: float = DEFAULT_EPSILON
    lows: np.ndarray = field(init=False, repr=False, compare=False)
    highs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        comps = tuple(Comparison(*c) for c in self.comparisons)
        for c in comps:
            _check_index(c, self.n)
        object.__setattr__(self, "comparisons", comps)
        lows = np.fromiter((c.low for c in comps), dtype=np.intp, count=len(comps))
        highs = np.fromiter((c.high for c in comps), dtype=np.intp, count=len(comps))
        lows.flags.writeable = False
        highs.flags.writeable = False
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def m(self) -> int:
        return len(self.comparisons)

    @property
    def n_pairs(self) -> int:
        """Size of the complete comparison set, ``n (n - 1) / 2``."""
        return self.n * (self.n - 1) // 2

    def matrix(self) -> np.ndarray:
        """Dense ``m x n`` matrix ``Q`` with one comparison row per line."""
        Q = np.zeros((self.m, self.n))
        rows = np.arange(self.m)
        Q[rows, self.lows] = 1.0
        Q[rows, self.highs] = -1.0
        return Q

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """``Q x + epsilon``; positive entries are violated rows."""
        x = _as_scores(x, self.n)
        return x[self.lows] - x[self.highs] + self.epsilon


@dataclass(frozen=True)
class Ranking:
    """A permutation of ``0..n-1`` listing items best-first."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"not a permutation: {order}")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, k):
        return self.order[k]

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def positions(self) -> np.ndarray:
        """``positions[item]`` is the rank position of ``item`` (0 = top)."""
        pos = np.empty(self.n, dtype=np.intp)
        pos[list(self.order)] = np.arange(self.n)
        return pos

    @classmethod
    def identity(cls, n: int) -> "Ranking":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Ranking":
        return cls(tuple(rng.permutation(n).tolist()))


RankingLike = Union[Ranking, Sequence[int], np.ndarray]


def as_order(r: RankingLike) -> np.ndarray:
    """Best-first item array for a ranking or plain sequence."""
    if isinstance(r, Ranking):
        return np.asarray(r.order, dtype=np.intp)
    return np.asarray(r, dtype=np.intp)


def _as_scores(x, n: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("score vector must be one-dimensional")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"score vector has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("score vector has non-finite entries")
    return x


def comparison_row(c: Comparison, n: int) -> np.ndarray:
    """Row of ``Q`` for ``c``: ``+1`` at ``c.low``, ``-1`` at ``c.high``.

    Returned dense; it has exactly two nonzeros and squared norm 2.
    """
    c = Comparison(*c)
    _check_index(c, n)
    phi = np.zeros(n)
    phi[c.low] = 1.0
    phi[c.high] = -1.0
    return phi


def residual(c: Comparison, x, epsilon: float = DEFAULT_EPSILON) -> float:
    """``x[low] - x[high] + epsilon``; positive means the comparison is violated."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    c = Comparison(*c)
    x = np.asarray(x, dtype=float)
    _check_index(c, x.shape[0])
    return float(x[c.low] - x[c.high] + epsilon)


def ranking_from_scores(x) -> Ranking:
    """Items sorted by descending score, ties by ascending index."""
    x = _as_scores(x)
    return Ranking(tuple(np.argsort(-x, kind="stable").tolist()))


def feasible_point(r: RankingLike, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Scores ``(n-1-k) * epsilon`` for the item at position ``k``.

    Adjacent items are ``epsilon`` apart, so every comparison consistent
    with ``r`` holds. Where rounding leaves a gap one ulp short of
    ``epsilon`` the lower score is nudged down until the floating-point
    residual is non-positive.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    order = as_order(Ranking(tuple(as_order(r).tolist())))
    n = order.shape[0]
    levels = (n - 1 - np.arange(n)) * epsilon
    for k in range(1, n):
        ulp = np.spacing(abs(levels[k - 1]) + epsilon)
        while levels[k] - levels[k - 1] + epsilon > 0:
            levels[k] -= ulp
    s = np.empty(n)
    s[order] = levels
    return s


def verify_feasible(x, system: ComparisonSystem) -> bool:
    """True iff every row of ``system`` has residual ``<= 0`` (no tolerance)."""
    if system.m == 0:
        return True
    return bool(np.all(system.residuals(x) <= 0.0))

