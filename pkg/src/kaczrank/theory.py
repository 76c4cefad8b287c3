"""Closed-form rates, bounds and comparison counts.

Hitting-time bounds grow like ``n^(n^2)``; they are computed exactly with
rational arithmetic and reported together with their natural logarithm,
with ``value = inf`` once the float range is exceeded.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .core import ComparisonSystem
from .sampling import full_comparison_set

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class Bound(NamedTuple):
    value: float
    log: float


def _check_n(n: int) -> int:
    if int(n) != n or n < 2:
        raise ValueError(f"need an integer n >= 2, got {n}")
    return int(n)


def _check_p(p: float) -> float:
    if not 0.0 <= p < 0.5:
        raise ValueError("p must lie in [0, 1/2)")
    return float(p)


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def contraction_rate(n: int) -> float:
    """``1 - n / (2m)`` with ``m = n (n-1) / 2``, i.e. ``1 - 1/(n-1)``."""
    n = _check_n(n)
    return 1.0 - n / (2.0 * n_pairs(n))


def hoffman_bound(n: int) -> float:
    """``1 / sqrt(n)``, the claimed Hoffman-constant bound for the complete system."""
    n = _check_n(n)
    return 1.0 / math.sqrt(n)


def backbone_hoffman_lower_bound(n: int) -> float:
    """``sqrt((n-1)/2)``, a lower bound on the true Hoffman constant.

    Summing the ``n-1`` backbone rows with equal non-negative weights
    telescopes to ``e_bottom - e_top``, so the unit-norm weight vector
    ``v`` has ``|Q^T v| = sqrt(2/(n-1))``. The constant is at least the
    reciprocal. For ``n >= 2`` this exceeds ``hoffman_bound(n)``.
    """
    n = _check_n(n)
    return math.sqrt((n - 1) / 2.0)


def complete_graph_connectivity(n: int) -> float:
    """Smallest positive eigenvalue of ``Q^T Q`` for the complete comparison set.

    ``Q^T Q`` is the Laplacian of the complete graph on ``n`` nodes; the
    result should equal ``n``.
    """
    n = _check_n(n)
    if n > 200:
        raise ValueError("dense eigensolve limited to n <= 200")
    Q = ComparisonSystem(n, tuple(full_comparison_set(n))).matrix()
    evals = np.linalg.eigvalsh(Q.T @ Q)
    positive = evals[evals > 1e-9 * n]
    if positive.size == 0:
        raise np.linalg.LinAlgError("no positive eigenvalue found")
    return float(positive.min())


def _bound(num: Fraction) -> Bound:
    log = math.log(num.numerator) - math.log(num.denominator)
    value = float(num) if log < _LOG_FLOAT_MAX else math.inf
    return Bound(value, log)


def expected_hit_bound(n: int) -> Bound:
    """``(N+1) n^N (n-1)^N / 2^N`` with ``N = n (n-1) / 2``."""
    n = _check_n(n)
    N = n_pairs(n)
    return _bound(Fraction((N + 1) * n**N * (n - 1) ** N, 2**N))


def expected_hit_bound_noisy(n: int, p: float) -> Bound:
    """Noiseless bound divided by ``(1-p)^N``."""
    n = _check_n(n)
    p = _check_p(p)
    N = n_pairs(n)
    keep = (1 - Fraction(p)) ** N
    return _bound(Fraction((N + 1) * n**N * (n - 1) ** N, 2**N) / keep)


def tail_bound(n: int, k: int, p: float = 0.0) -> float:
    """Bound on ``P(tau >= k)``: ``(1 - (1-p)^N 2^N / (n^N (n-1)^N)) ^ floor(k/(N+1))``."""
    n = _check_n(n)
    p = _check_p(p)
    if k < 0:
        raise ValueError("k must be non-negative")
    N = n_pairs(n)
    blocks = k // (N + 1)
    if blocks == 0:
        return 1.0
    log_q = N * (math.log(2.0) + math.log1p(-p) - math.log(n) - math.log(n - 1))
    q = math.exp(log_q)
    if q >= 1.0:
        return 0.0
    return math.exp(blocks * math.log1p(-q))


def coupon_with_replacement(n: int) -> float:
    """Expected uniform draws with replacement until every backbone comparison is seen.

    ``N * H(n-1)`` with ``H`` the harmonic number.
    """
    n = _check_n(n)
    return n_pairs(n) * sum(1.0 / i for i in range(1, n))


def last_zero_position(ones: int, zeros: int) -> float:
    """Expected 1-based position of the last zero in a uniformly shuffled 0/1 string."""
    if zeros < 1 or ones < 0:
        raise ValueError("need zeros >= 1 and ones >= 0")
    return ones + zeros - ones / (zeros + 1)


def coupon_without_replacement(n: int) -> float:
    """Expected draws without replacement until every backbone comparison is seen.

    ``(n-1)(n/2 - 1/2 + 1/n)``; equals ``last_zero_position`` with the
    backbone as zeros and the remaining pairs as ones.
    """
    n = _check_n(n)
    return (n - 1) * (n / 2.0 - 0.5 + 1.0 / n)


def coupon_monte_carlo(n: int, trials: int, rng: np.random.Generator, replace: bool) -> np.ndarray:
    """Simulated draw counts needed to collect the backbone, one per trial.

    The backbone is taken to be pairs ``0..n-2`` of the ``N`` pairs;
    which pairs they are does not matter under uniform sampling.
    """
    n = _check_n(n)
    N = n_pairs(n)
    need = n - 1
    if replace:
        first = np.full((trials, need), -1, dtype=np.int64)
        todo = np.arange(trials)
        width = 4 * N * need
        offset = 0
        while todo.size:
            draws = rng.integers(0, N, size=(todo.size, width))
            for c in range(need):
                hit = draws == c
                fresh = (first[todo, c] < 0) & hit.any(axis=1)
                first[todo[fresh], c] = offset + hit[fresh].argmax(axis=1)
            offset += width
            todo = todo[(first[todo] < 0).any(axis=1)]
        return first.max(axis=1) + 1
    keys = rng.random((trials, N))
    ranks = keys.argsort(axis=1).argsort(axis=1)
    return ranks[:, :need].max(axis=1) + 1
