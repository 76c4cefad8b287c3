"""Rank Centrality: ranking by the stationary distribution of a win-driven random walk."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Comparison, Ranking, ranking_from_scores
from .metrics import ConvergenceError


@dataclass
class WinRecord:
    """Pairwise tallies; ``wins[i, j]`` counts comparisons in which ``i`` beat ``j``."""

    n: int
    wins: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "WinRecord":
        return cls(n, np.zeros((n, n), dtype=np.int64))

    def update(self, lows: np.ndarray, highs: np.ndarray) -> None:
        """Tally a block of comparisons given as index arrays."""
        lows = np.asarray(lows, dtype=np.intp)
        highs = np.asarray(highs, dtype=np.intp)
        if lows.size and (max(lows.max(), highs.max()) >= self.n or min(lows.min(), highs.min()) < 0):
            raise IndexError(f"comparison index out of range for n={self.n}")
        if np.any(lows == highs):
            raise ValueError("self-comparison in block")
        np.add.at(self.wins, (highs, lows), 1)


def accumulate(comparisons: Iterable[Comparison], n: int) -> WinRecord:
    rec = WinRecord.empty(n)
    comps = [Comparison(*c) for c in comparisons]
    if comps:
        rec.update(np.array([c.low for c in comps]), np.array([c.high for c in comps]))
    return rec


def transition_matrix(rec: WinRecord, regularization: float = 0.01) -> np.ndarray:
    """Row-stochastic Rank Centrality chain.

    After adding ``regularization`` to every off-diagonal count, the walk
    moves from ``i`` to ``j`` with probability ``w_ji / (w_ij + w_ji)``
    divided by the largest number of distinct opponents of any item;
    the remainder stays on ``i``.
    """
    if regularization < 0:
        raise ValueError("regularization must be non-negative")
    n = rec.n
    w = rec.wins.astype(float) + regularization
    np.fill_diagonal(w, 0.0)
    games = w + w.T
    played = games > 0
    if not played.any():
        raise ValueError("no comparisons to aggregate")
    d_max = played.sum(axis=1).max()
    P = np.zeros((n, n))
    P[played] = w.T[played] / games[played]
    P /= d_max
    P[np.diag_indices(n)] = 1.0 - P.sum(axis=1)
    return P


def rank_centrality(
    rec: WinRecord,
    regularization: float = 0.01,
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
) -> tuple[np.ndarray, Ranking]:
    """Stationary distribution by power iteration, and the ranking it induces.

    Iterates ``pi <- pi P`` from the uniform distribution until the L1
    change drops below ``tol``.
    """
    P = transition_matrix(rec, regularization)
    pi = np.full(rec.n, 1.0 / rec.n)
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < tol:
            return nxt, ranking_from_scores(nxt)
        pi = nxt
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
