"""Comparison streams and the flip-noise model.

All randomness goes through a ``numpy.random.Generator`` backed by PCG64
(``random_stream``), so a seed fixes every draw on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core import DEFAULT_EPSILON, Comparison, ComparisonSystem, Ranking, RankingLike, as_order

WITH_REPLACEMENT = "with-replacement"
WITHOUT_REPLACEMENT = "without-replacement"
FRIENDLY = "friendly"
ADVERSARIAL = "adversarial"
MODES = (WITH_REPLACEMENT, WITHOUT_REPLACEMENT, FRIENDLY, ADVERSARIAL)


def random_stream(seed: int) -> np.random.Generator:
    """PCG64 generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class SamplerSpec:
    """How comparisons are drawn from a pool.

    Parameters
    ----------
    mode : str
        One of ``MODES``.
    q : float
        Fraction of the full comparison set kept as the pool, in (0, 1].
    p : float
        Probability that a drawn comparison arrives reversed, in [0, 1/2).
    """

    mode: str = WITH_REPLACEMENT
    q: float = 1.0
    p: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown sampling mode {self.mode!r}; expected one of {MODES}")
        if not 0.0 < self.q <= 1.0:
            raise ValueError("q must lie in (0, 1]")
        if not 0.0 <= self.p < 0.5:
            raise ValueError("p must lie in [0, 1/2)")


def _truth_positions(truth: RankingLike) -> np.ndarray:
    order = as_order(Ranking(tuple(as_order(truth).tolist())))
    pos = np.empty(order.shape[0], dtype=np.intp)
    pos[order] = np.arange(order.shape[0])
    return pos


def full_comparison_set(n: int, truth: RankingLike | None = None) -> list[Comparison]:
    """All ``n (n-1) / 2`` pairs oriented by ``truth`` (identity if omitted).

    Pairs come in lexicographic order of their item indices.
    """
    if n < 2:
        raise ValueError("need at least two items")
    pos = np.arange(n) if truth is None else _truth_positions(truth)
    if pos.shape[0] != n:
        raise ValueError("truth ranking has the wrong length")
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            out.append(Comparison(b, a) if pos[a] < pos[b] else Comparison(a, b))
    return out


def full_system(truth: RankingLike, epsilon: float = DEFAULT_EPSILON) -> ComparisonSystem:
    n = len(as_order(truth))
    return ComparisonSystem(n, tuple(full_comparison_set(n, truth)), epsilon)


def subset_size(m: int, q: float) -> int:
    # the guard keeps q*m = 28.999999999999996 from flooring to 28
    return int(math.floor(q * m + 1e-9))


def subset_sample(full: Sequence[Comparison], q: float, rng: np.random.Generator) -> list[Comparison]:
    """``floor(q m)`` distinct comparisons chosen uniformly without replacement."""
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1]")
    k = subset_size(len(full), q)
    if k == 0:
        raise ValueError(f"q={q} keeps no comparisons out of {len(full)}")
    idx = rng.choice(len(full), size=k, replace=False)
    return [full[i] for i in idx]


def apply_noise(c: Comparison, p: float, rng: np.random.Generator) -> Comparison:
    """Return ``c`` reversed with probability ``p``; ``p == 0`` draws nothing."""
    if not 0.0 <= p < 0.5:
        raise ValueError("p must lie in [0, 1/2)")
    c = Comparison(*c)
    if p > 0.0 and rng.random() < p:
        return c.flipped()
    return c


def backbone(truth: RankingLike) -> list[Comparison]:
    """The ``n - 1`` comparisons between adjacently ranked items, top first."""
    order = as_order(truth)
    if order.shape[0] < 2:
        raise ValueError("need at least two items")
    return [Comparison(order[k + 1], order[k]) for k in range(order.shape[0] - 1)]


def ordered_stream(
    mode: str,
    truth: RankingLike,
    rng: np.random.Generator,
    pool: Sequence[Comparison] | None = None,
) -> list[Comparison]:
    """Order a pool the way a knowledgeable friend or adversary would.

    ``friendly`` puts the backbone comparisons first, in rank order, and
    the rest after them shuffled. ``adversarial`` moves one randomly chosen
    backbone comparison to the very end and shuffles everything before it.
    ``pool`` defaults to the full comparison set.
    """
    n = len(as_order(truth))
    if pool is None:
        pool = full_comparison_set(n, truth)
    pool = [Comparison(*c) for c in pool]
    spine = backbone(truth)
    spine_set = set(spine)
    if mode == FRIENDLY:
        head = [c for c in spine if c in pool]
        rest = [c for c in pool if c not in spine_set]
        return head + [rest[i] for i in rng.permutation(len(rest))]
    if mode == ADVERSARIAL:
        present = [c for c in spine if c in pool]
        if not present:
            return [pool[i] for i in rng.permutation(len(pool))]
        last = present[int(rng.integers(len(present)))]
        pos = pool.index(last)
        rest = pool[:pos] + pool[pos + 1:]
        return [rest[i] for i in rng.permutation(len(rest))] + [last]
    raise ValueError(f"ordered_stream needs mode {FRIENDLY!r} or {ADVERSARIAL!r}, got {mode!r}")


class ComparisonSampler:
    """Draws comparisons from a pool according to a ``SamplerSpec``.

    Draws are generated in blocks of ``block_size`` so the solver loop can
    consume plain integer arrays; ``draw`` hands them out one at a time
    from the same buffer, so both interfaces see the same sequence for a
    given seed. Noise is applied when a block is generated, independently
    per draw.

    ``spec.q`` is not applied here; subset the pool with
    ``subset_sample`` first.
    """

    def __init__(
        self,
        pool: Sequence[Comparison],
        spec: SamplerSpec,
        rng: np.random.Generator,
        truth: RankingLike | None = None,
        block_size: int = 4096,
    ) -> None:
        pool = [Comparison(*c) for c in pool]
        if not pool:
            raise ValueError("empty comparison pool")
        if spec.mode in (FRIENDLY, ADVERSARIAL):
            if truth is None:
                raise ValueError(f"mode {spec.mode!r} needs the true ranking")
            pool = ordered_stream(spec.mode, truth, rng, pool)
        self.spec = spec
        self.rng = rng
        self.block_size = int(block_size)
        self._lows = np.array([c.low for c in pool], dtype=np.intp)
        self._highs = np.array([c.high for c in pool], dtype=np.intp)
        self._order = None
        self._cursor = 0
        if spec.mode == WITHOUT_REPLACEMENT:
            self._order = rng.permutation(len(pool))
        elif spec.mode in (FRIENDLY, ADVERSARIAL):
            self._order = np.arange(len(pool))
        self._buf_lows: list[int] = []
        self._buf_highs: list[int] = []
        self._buf_pos = 0

    @property
    def pool_size(self) -> int:
        return self._lows.shape[0]

    def next_block(self) -> tuple[np.ndarray, np.ndarray]:
        """Next block of ``(lows, highs)``; both empty once exhausted."""
        if self._order is None:
            idx = self.rng.integers(0, self.pool_size, size=self.block_size)
        else:
            idx = self._order[self._cursor:self._cursor + self.block_size]
            self._cursor += idx.shape[0]
        lows = self._lows[idx]
        highs = self._highs[idx]
        if self.spec.p > 0.0 and idx.shape[0]:
            flip = self.rng.random(idx.shape[0]) < self.spec.p
            lows, highs = np.where(flip, highs, lows), np.where(flip, lows, highs)
        return lows, highs

    def blocks(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        while True:
            lows, highs = self.next_block()
            if lows.shape[0] == 0:
                return
            yield lows, highs

    def draw(self) -> Comparison | None:
        """Next comparison, or ``None`` when a without-replacement pool is spent."""
        if self._buf_pos >= len(self._buf_lows):
            lows, highs = self.next_block()
            if lows.shape[0] == 0:
                return None
            self._buf_lows, self._buf_highs = lows.tolist(), highs.tolist()
            self._buf_pos = 0
        k = self._buf_pos
        self._buf_pos += 1
        return Comparison(self._buf_lows[k], self._buf_highs[k])
