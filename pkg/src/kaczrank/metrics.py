"""Distances between rankings, and distance from a score vector to the feasible set.

Rankings may be given as ``Ranking`` objects or best-first item sequences.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import nnls

from .core import ComparisonSystem, RankingLike, as_order, verify_feasible

METRICS = ("hamming", "kdist", "kendall", "cayley")


class ConvergenceError(RuntimeError):
    pass


def _pair(a: RankingLike, b: RankingLike) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_order(a), as_order(b)
    if a.shape != b.shape:
        raise ValueError(f"rankings have different lengths ({a.shape[0]} and {b.shape[0]})")
    return a, b


def _positions(order: np.ndarray) -> np.ndarray:
    pos = np.empty(order.shape[0], dtype=np.intp)
    pos[order] = np.arange(order.shape[0])
    return pos


def hamming(a: RankingLike, b: RankingLike) -> int:
    """Number of rank positions holding different items."""
    a, b = _pair(a, b)
    return int(np.count_nonzero(a != b))


def k_distance(a: RankingLike, b: RankingLike, k: int) -> int:
    """Number of items displaced by ``k`` or more positions.

    An item counts as within ``k`` places when its displacement is
    strictly below ``k``, so ``k = 1`` reproduces the Hamming distance.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    a, b = _pair(a, b)
    shift = np.abs(_positions(a) - _positions(b))
    return int(np.count_nonzero(shift >= k))


def kendall_tau(a: RankingLike, b: RankingLike) -> int:
    """Number of item pairs the two rankings order differently."""
    a, b = _pair(a, b)
    pa, pb = _positions(a), _positions(b)
    da = np.subtract.outer(pa, pa)
    db = np.subtract.outer(pb, pb)
    return int(np.count_nonzero(np.triu(da * db < 0, 1)))


def cayley(a: RankingLike, b: RankingLike) -> int:
    """Minimum number of transpositions turning ``a`` into ``b``: n minus the cycle count."""
    a, b = _pair(a, b)
    perm = _positions(b)[a]
    n = perm.shape[0]
    seen = np.zeros(n, dtype=bool)
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
    return n - cycles


def max_distance(metric: str, n: int) -> int:
    if metric in ("hamming", "kdist"):
        return n
    if metric == "kendall":
        return n * (n - 1) // 2
    if metric == "cayley":
        return n - 1
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def normalize(d: float, metric: str, n: int) -> float:
    """Scale a distance into [0, 1] by the metric's largest possible value."""
    top = max_distance(metric, n)
    if top == 0:
        return 0.0
    return d / top


def _least_distance(x: np.ndarray, lows: np.ndarray, highs: np.ndarray, eps: float) -> np.ndarray | None:
    """Exact projection of ``x`` onto the rows ``(lows, highs)`` only.

    Lawson-Hanson: the least-distance problem ``min |u|`` subject to
    ``G u >= h`` is solved through one NNLS problem on ``[G^T; h^T]``.
    """
    n, k = x.shape[0], lows.shape[0]
    G = np.zeros((k, n))
    rows = np.arange(k)
    G[rows, lows] = -1.0
    G[rows, highs] = 1.0
    h = x[lows] - x[highs] + eps
    E = np.vstack([G.T, h[None, :]])
    f = np.zeros(n + 1)
    f[n] = 1.0
    w, _ = nnls(E, f, maxiter=50 * (n + k))
    r = E @ w - f
    if abs(r[n]) < 1e-300:
        return None
    return x - r[:n] / r[n]


def distance_to_feasible(
    x,
    system: ComparisonSystem,
    tol: float | None = None,
    max_sweeps: int = 100_000,
    finish_every: int = 10,
) -> float:
    """Euclidean distance from ``x`` to ``{z : Q z <= -epsilon}``.

    Runs Dykstra's corrected cyclic projections, which for halfspaces are
    Hildreth's dual coordinate ascent: one non-negative multiplier per row
    and ``z = x - sum(lam_i * phi_i)``. Every row has two nonzeros, so a
    sweep costs O(m). Sweeping stops when no single correction in a sweep
    moves ``z`` by ``tol / 10`` or more.

    When ``epsilon`` is tiny next to the spread of ``x`` the multipliers
    drain in ``epsilon``-sized steps and the sweeps crawl. Every
    ``finish_every`` sweeps the rows currently carrying weight (or
    violated) are handed to an exact least-distance solve; if that point
    satisfies every row of the system it is the projection and is
    returned.

    Parameters
    ----------
    tol : float, optional
        Accuracy of the returned distance. Defaults to
        ``1e-6 * epsilon``.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps do not settle.
    """
    eps = system.epsilon
    if tol is None:
        tol = 1e-6 * eps
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=float)
    if verify_feasible(x, system):
        return 0.0
    lows = system.lows.tolist()
    highs = system.highs.tolist()
    lam = [0.0] * len(lows)
    z = x.tolist()
    stop = tol / 10.0
    # slack allowed on rows when accepting an exact finish
    feas_tol = 1e-12 * (float(np.max(np.abs(x))) + eps)
    for sweep in range(1, max_sweeps + 1):
        moved = 0.0
        for i in range(len(lows)):
            lo, hi = lows[i], highs[i]
            # row norm squared is 2
            new = lam[i] + (z[lo] - z[hi] + eps) / 2.0
            if new < 0.0:
                new = 0.0
            delta = new - lam[i]
            if delta != 0.0:
                lam[i] = new
                z[lo] -= delta
                z[hi] += delta
                if abs(delta) > moved:
                    moved = abs(delta)
        if moved < stop:
            return float(np.linalg.norm(x - np.asarray(z)))
        if sweep % finish_every == 0:
            zz = np.asarray(z)
            work = (np.asarray(lam) > 0.0) | (system.residuals(zz) > 0.0)
            for _ in range(5):
                proj = _least_distance(x, system.lows[work], system.highs[work], eps)
                if proj is None:
                    break
                res = system.residuals(proj)
                bad = res > feas_tol
                if not bad.any():
                    return float(np.linalg.norm(x - proj))
                work |= bad
    raise ConvergenceError(f"no convergence within {max_sweeps} sweeps")
