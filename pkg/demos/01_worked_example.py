"""Four items, five comparisons, one ranking.

Each line ``a,b`` says item ``a`` scored below item ``b``. KaczRank turns
every observation into the inequality x[a] - x[b] <= -epsilon and
projects onto violated ones until the scores sort the items.
"""

import numpy as np

from kaczrank import ComparisonSystem, SamplerSpec, SolverConfig, random_stream, run
from kaczrank.baselines import accumulate, rank_centrality
from kaczrank.io import format_ranking, parse_comparisons

text = """\
n=4
0,1   # item 0 below item 1
2,1
0,2
3,2
0,3
"""
n, comps = parse_comparisons(text)

# the system Q x <= -eps, one row per comparison
system = ComparisonSystem(n, tuple(comps))
print(system.matrix())

# positive residuals mark violated rows
x = np.array([1.0, 0.0, 0.0, 0.0])
print("residuals before:", system.residuals(x))

state, _ = run(n, comps, SamplerSpec(), random_stream(0), SolverConfig())
print("scores after", state.iteration, "iterations:", state.iterate)
print("KaczRank ranking, best first:", format_ranking(state.ranking))  # 1 2 3 0

# residuals are all <= 0 once the iterate is feasible
print("residuals after:", system.residuals(state.iterate))

scores, ranking = rank_centrality(accumulate(comps, n))
print("Rank Centrality scores:", np.round(scores, 4))
print("Rank Centrality ranking:", format_ranking(ranking))  # 1 2 3 0
