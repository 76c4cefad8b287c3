"""The closed-form quantities next to what simulation shows."""

import numpy as np

from kaczrank import SamplerSpec, SolverConfig, hitting_time, random_stream, theory

for n in (3, 4, 5, 10):
    print(
        f"n={n:>2}  rate {theory.contraction_rate(n):.4f}"
        f"  coupons: with {theory.coupon_with_replacement(n):6.2f}"
        f"  without {theory.coupon_without_replacement(n):6.2f}"
    )

# Monte Carlo for the coupon counts
rng = random_stream(1)
for n in (3, 4, 5):
    w = theory.coupon_monte_carlo(n, 50_000, rng, replace=True).mean()
    wo = theory.coupon_monte_carlo(n, 50_000, rng, replace=False).mean()
    print(f"n={n}  simulated with {w:.3f}  without {wo:.3f}")

# the hitting-time bound explodes; actual hitting times do not
for n in (3, 5, 10, 20):
    bound = theory.expected_hit_bound(n)
    sim = hitting_time(n, 20, SolverConfig(max_iterations=200_000, init="uniform"))
    print(f"n={n:>2}  log(bound) {bound.log:9.1f}   log(median hit) {np.log(max(sim.median, 1)):5.2f}")

# the Hoffman constant is larger than 1/sqrt(n): equal weights on the
# n-1 adjacent-pair rows nearly cancel
for n in (5, 10, 50):
    print(f"n={n:>2}  1/sqrt(n) = {theory.hoffman_bound(n):.3f}   lower bound {theory.backbone_hoffman_lower_bound(n):.3f}")
