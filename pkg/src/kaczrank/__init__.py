"""Rank recovery from pairwise comparisons by randomized Kaczmarz projections."""

__version__ = "0.1.0"

from .baselines import WinRecord, accumulate, rank_centrality, transition_matrix
from .core import (
    DEFAULT_EPSILON,
    Comparison,
    ComparisonSystem,
    Ranking,
    comparison_row,
    feasible_point,
    ranking_from_scores,
    residual,
    verify_feasible,
)
from .metrics import (
    ConvergenceError,
    cayley,
    distance_to_feasible,
    hamming,
    k_distance,
    kendall_tau,
    normalize,
)
from .sampling import ComparisonSampler, SamplerSpec, full_comparison_set, full_system, random_stream
from .solvers import SolverConfig, SolverState, Trace, cautious_step, hitting_time, kacz_step, run, simulate

__all__ = [
    "__version__",
    "Comparison",
    "ComparisonSampler",
    "ComparisonSystem",
    "ConvergenceError",
    "DEFAULT_EPSILON",
    "Ranking",
    "SamplerSpec",
    "SolverConfig",
    "SolverState",
    "Trace",
    "WinRecord",
    "accumulate",
    "cautious_step",
    "cayley",
    "comparison_row",
    "distance_to_feasible",
    "feasible_point",
    "full_comparison_set",
    "full_system",
    "hamming",
    "hitting_time",
    "k_distance",
    "kacz_step",
    "kendall_tau",
    "normalize",
    "random_stream",
    "rank_centrality",
    "ranking_from_scores",
    "residual",
    "run",
    "simulate",
    "transition_matrix",
    "verify_feasible",
]
