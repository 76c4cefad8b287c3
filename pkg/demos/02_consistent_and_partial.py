"""Noiseless data: how fast does the ranking come out, and how much data is needed?

Each trial draws a random true ranking of 50 items, keeps a fraction q of
all 1225 pairwise comparisons and feeds them, sampled with replacement,
to KaczRank from a uniform random start.
"""

from kaczrank.experiments import ExperimentSpec, run_experiment

# --- full data: median Hamming distance along the run -------------------
spec = ExperimentSpec("trace", n=50, trials=10, max_iterations=10_000, k_list=(5, 10))
table = run_experiment(spec)
for t in (0, 1000, 2500, 5000, 7500, 10_000):
    med = table.values(trial="median", metric="hamming", iteration=t)[0]
    k5 = table.values(trial="median", metric="k5", iteration=t)[0]
    print(f"t={t:>6}  median Hamming {med:5.1f}   median 5-distance {k5:5.1f}")

hits = table.values(trial="median", metric="hit")[0]
print("median hitting iteration:", hits)

# --- partial data: end-of-run distances as q shrinks -------------------
spec = ExperimentSpec("partial-sweep", n=50, trials=10, q_grid=(0.25, 0.5, 0.75, 1.0), k_list=(5,))
table = run_experiment(spec)
for q in spec.q_grid:
    ham = table.values(trial="median", metric="hamming", q=q)[0]
    k5 = table.values(trial="median", metric="k5", q=q)[0]
    print(f"q={q:4}  median Hamming {ham:4.0f}   median 5-distance {k5:4.0f}")
# around half the data already puts every item within 5 spots of its place
