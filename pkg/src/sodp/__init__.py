"""Digit-sum parity bias of primes: sieve, sources, statistics, experiments."""
import os

import numba

# the TBB layer shipped here is too old for numba; pick a working one quietly
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .digits import Parity, digit_parity, digit_sum  # noqa: E402
from .experiments import (CensusResult, DistinguisherRun, SweepResult, count_even,  # noqa: E402
                          distinguish, fit_zscore_curve, full_census, run_base_sweep,
                          run_bias_sweep, run_chebyshev_experiment, run_mixed_sweep,
                          run_mod_experiment, run_parity_sweep, run_product_experiment)
from .prime_store import PrimeStore, build_primes, load_cache, sample_primes, save_cache  # noqa: E402
from .rng import Xoshiro256  # noqa: E402
from .sources import SourceKind, SourceSpec, draw  # noqa: E402
from .stats import (FitResult, TrialSummary, binomial_cdf, binomial_sf,  # noqa: E402
                    chebyshev_bound, linear_fit, quadratic_fit_lnx, summarize_trials)

__version__ = "0.1.0"
