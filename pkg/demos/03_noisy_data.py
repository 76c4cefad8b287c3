"""Flipped comparisons, and why a cautious step helps.

With probability p each drawn comparison is reversed. Plain KaczRank keeps
chasing the flipped rows; CautiousRank refuses any step that would move
alpha or more items in the ranking.
"""

from kaczrank.experiments import ExperimentSpec, run_experiment

spec = ExperimentSpec("noise-sweep", n=20, trials=10, alpha=4, p_grid=(0.0, 0.05, 0.1, 0.2), k_list=(5,))
table = run_experiment(spec)
print("          KaczRank          CautiousRank(alpha=4)")
print("   p   Hamming  5-dist      Hamming  5-dist")
for p in spec.p_grid:
    kh = table.values(trial="median", variant="kacz", p=p, metric="hamming")[0]
    k5 = table.values(trial="median", variant="kacz", p=p, metric="k5")[0]
    ch = table.values(trial="median", variant="cautious", p=p, metric="hamming")[0]
    c5 = table.values(trial="median", variant="cautious", p=p, metric="k5")[0]
    print(f"{p:5.2f}  {kh:7.1f} {k5:7.1f}      {ch:7.1f} {c5:7.1f}")

# tuning alpha: too small and nothing moves, too large and it is KaczRank again
spec = ExperimentSpec("alpha-sweep", n=20, trials=10, p_grid=(0.1,), alpha_grid=(1, 2, 4, 8, 16, None))
table = run_experiment(spec)
for a in spec.alpha_grid:
    ham = table.values(trial="median", alpha=a, metric="hamming")[0]
    print(f"alpha={'inf' if a is None else a:>3}  median Hamming {ham:4.1f}")
