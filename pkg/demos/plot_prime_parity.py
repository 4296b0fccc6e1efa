"""
Digit-sum parity of the first primes
=====================================

Sieve a million primes, count how many have an odd digit sum, then watch the
Z-score of sampled means grow with the sample size while random odd numbers
stay flat.
"""

import numpy as np

from sodp import SourceKind, SourceSpec, build_primes, full_census, run_parity_sweep
from sodp import fit_zscore_curve

# a million primes takes well under a second
store = build_primes(1_000_000)
census = full_census(store)
print(f"{store.count} primes up to {store.max_prime}")
print(f"odd digit sum: {census.odd_count}, even: {census.even_count}")

# the binomial null expects count/2 with standard deviation sqrt(count)/2
excess = (census.odd_count - store.count / 2) / (np.sqrt(store.count) / 2)
print(f"odd excess: {excess:.1f} standard deviations")

sizes = [10_000, 20_000, 50_000, 100_000, 200_000]
primes = run_parity_sweep(store, sizes, 200, SourceSpec(SourceKind.PRIMES, prime_count=store.count))
randoms = run_parity_sweep(store, sizes, 200,
                           SourceSpec(SourceKind.RANDOM_ODD, prime_count=store.count))

print("\n      s   z(primes)  z(random odd)")
for s, zp, zr in zip(sizes, primes.z_scores, randoms.z_scores):
    print(f"{s:>7}   {zp:9.2f}  {zr:13.2f}")

# Z grows roughly like sqrt(s); a quadratic in ln(s) tracks it well
fit = fit_zscore_curve(primes)
print("\nquadratic in ln(s):", np.round(fit.coefficients, 3), "sse", round(fit.sse, 3))
