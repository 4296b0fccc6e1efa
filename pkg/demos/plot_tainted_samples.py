"""
Random numbers tainted with primes
==================================

Replace a growing fraction of a random sample with primes. The Z-score rises
linearly with the prime percentage.
"""

from sodp import build_primes, run_mixed_sweep

store = build_primes(2_000_000)
sweep = run_mixed_sweep(store, s=100_000, trials=200)

for x, summary in sweep.points:
    bar = "#" * int(round(summary.z_score * 2))
    print(f"{100 * x:5.0f}%  z={summary.z_score:6.2f}  {bar}")

fit = sweep.fit
print(f"\nz ~ {fit.slope:.4f} * percent + {fit.intercept:.3f}   (r^2 = {fit.r_squared:.4f})")
