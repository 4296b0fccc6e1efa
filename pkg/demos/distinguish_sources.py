"""
Telling primes from random numbers
==================================

The distinguisher averages the even-parity count over many samples and says
"Yes" when the mean sits more than five standard errors from s/2.
"""

from sodp import SourceKind, SourceSpec, build_primes, distinguish

store = build_primes(5_000_000)
cases = {
    "primes": SourceSpec(SourceKind.PRIMES, prime_count=store.count),
    "random odd": SourceSpec(SourceKind.RANDOM_ODD, prime_count=store.count),
}

for name, spec in cases.items():
    for seed in range(3):
        run = distinguish(spec, seed=seed, store=store, sample_size=50_000, trials=500)
        print(f"{name:>10}  seed {seed}: z = {run.z_avg:6.2f} -> {run.verdict}")
