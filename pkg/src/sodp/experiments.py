"""Digit-sum parity experiments over primes and reference populations.

Seeding: a sweep point with integer key ``k`` runs trial ``i`` on
``Xoshiro256(derive_seed(derive_seed(seed, k), i))``. Sample-size and base
sweeps key points by sample size, so the same (s, trials, seed) draws the
same numbers in every experiment; rate and fraction sweeps key by position.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from numba import njit

from .digits import check_base, count_odd, digit_parities, odd_digit_sum, parity_table
from .prime_store import PrimeStore
from .rng import Xoshiro256, trial_seeds
from .sources import (SourceKind, SourceSpec, _count_indexed, mod_operands,
                      trial_even_counts)
from .stats import (FitError, FitResult, TrialSummary, linear_fit, quadratic_fit_lnx,
                    summarize_trials)

DEFAULT_SEED = 0xD16175C0DE
TABLE_GRID = (
    100_000, 200_000, 300_000, 400_000, 500_000, 600_000, 700_000,
    800_000, 900_000, 1_000_000, 2_000_000, 3_000_000, 4_000_000, 5_000_000,
)
BIAS_RATES = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
MIX_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
EVEN_BASES = (2, 4, 6, 8, 10, 16)


class Axis(enum.Enum):
    SAMPLE_SIZE = "sample_size"
    BIAS_RATE = "bias_rate"
    PRIME_FRACTION = "prime_fraction"
    BASE = "base"


class DegenerateBaseError(ValueError):
    """Odd bases force every odd prime to an odd digit sum."""


@dataclass(frozen=True)
class TrialBatch:
    sample_size: int
    even_counts: np.ndarray

    def summary(self) -> TrialSummary:
        return summarize_trials(self.even_counts, self.sample_size)


@dataclass
class SweepResult:
    axis: Axis
    points: list
    fit: Optional[FitResult] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.points:
            raise ValueError("a sweep needs at least one point")
        values = [v for v, _ in self.points]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("axis values must be strictly increasing")

    @property
    def axis_values(self) -> list:
        return [v for v, _ in self.points]

    @property
    def summaries(self) -> list:
        return [p for _, p in self.points]

    @property
    def z_scores(self) -> np.ndarray:
        return np.array([p.z_score for _, p in self.points])


@dataclass(frozen=True)
class CensusResult:
    prime_count: int
    base: int
    odd_count: int
    even_count: int


@dataclass(frozen=True)
class DistinguisherRun:
    sample_size: int
    trials: int
    threshold: float
    per_trial_even: np.ndarray
    p_avg: float
    exp_avg: float
    std_avg: float
    z_avg: float
    verdict: str


# --- Algorithm-level pieces -----------------------------------------------------

def count_even(numbers, base: int = 10) -> int:
    """How many of ``numbers`` have an even digit sum."""
    arr = np.ascontiguousarray(numbers, dtype=np.uint64)
    return int(arr.size - count_odd(arr, base))


def full_census(store: PrimeStore, base: int = 10) -> CensusResult:
    odd = int(store.odd_parities(check_base(base)).sum(dtype=np.int64))
    return CensusResult(store.count, base, odd, store.count - odd)


def _increasing(values: Sequence, what: str) -> list:
    values = list(values)
    if not values:
        raise ValueError(f"no {what} given")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{what} must be strictly increasing")
    return values


def _batch(spec, s, trials, seed, key, store, base) -> TrialBatch:
    if trials < 1:
        raise ValueError("trials must be positive")
    seeds = trial_seeds(seed, key, trials)
    return TrialBatch(s, trial_even_counts(spec, s, seeds, store, base))


def _spec_meta(spec: SourceSpec, store: Optional[PrimeStore]) -> dict:
    m = spec.range_max if spec.range_max is not None else (store.max_prime if store else None)
    meta = {"source": spec.kind.value, "prime_count": spec.prime_count, "range_max": m}
    if spec.kind is SourceKind.RANDOM_ODD:
        meta["baseline"] = "odd integers in [3, range_max]"
    elif spec.kind in (SourceKind.RANDOM_ALL, SourceKind.MIXED):
        meta["baseline"] = "all integers in [2, range_max]"
    return meta


def run_parity_sweep(store: Optional[PrimeStore], sample_sizes: Iterable[int], trials: int,
                     spec: SourceSpec, base: int = 10,
                     seed: int = DEFAULT_SEED) -> SweepResult:
    sizes = _increasing(sample_sizes, "sample sizes")
    points = []
    for s in sizes:
        batch = _batch(spec, s, trials, seed, s, store, base)
        points.append((s, batch.summary()))
    meta = _spec_meta(spec, store) | {"base": base, "trials": trials, "seed": seed}
    return SweepResult(Axis.SAMPLE_SIZE, points, meta=meta)


def fit_zscore_curve(sweep: SweepResult) -> FitResult:
    if sweep.axis is not Axis.SAMPLE_SIZE:
        raise ValueError("z-score curve fits need a sample-size sweep")
    return quadratic_fit_lnx([(s, p.z_score) for s, p in sweep.points])


def _verdict(counts: np.ndarray, sample_size: int, threshold: float) -> DistinguisherRun:
    trials = counts.size
    p_avg = int(counts.sum()) / trials
    exp_avg = sample_size / 2.0
    std_avg = math.sqrt(sample_size / (4 * trials))
    z_avg = abs(p_avg - exp_avg) / std_avg
    return DistinguisherRun(sample_size, trials, threshold, counts, p_avg, exp_avg, std_avg,
                            z_avg, "Yes" if z_avg > threshold else "No")


def distinguish(spec: SourceSpec, seed: int = DEFAULT_SEED,
                store: Optional[PrimeStore] = None, sample_size: int = 100_000,
                trials: int = 1000, threshold: float = 5.0,
                base: int = 10) -> DistinguisherRun:
    """Decide whether a source draws primes: "Yes" iff the mean even count
    sits more than ``threshold`` standard errors from sample_size/2."""
    batch = _batch(spec, sample_size, trials, seed, sample_size, store, base)
    return _verdict(batch.even_counts, sample_size, threshold)


def distinguish_numbers(numbers, seed: int = DEFAULT_SEED, sample_size: int = 100_000,
                        trials: int = 1000, threshold: float = 5.0,
                        base: int = 10) -> DistinguisherRun:
    """Run the distinguisher with a finite number set as the source; each
    sample draws uniformly with replacement from ``numbers``."""
    arr = np.ascontiguousarray(numbers, dtype=np.uint64)
    if arr.size == 0:
        raise ValueError("empty number set")
    seeds = trial_seeds(seed, sample_size, trials)
    counts = _count_indexed(seeds, sample_size, digit_parities(arr, base))
    return _verdict(counts, sample_size, threshold)


def run_product_experiment(store: PrimeStore, sample_sizes: Iterable[int] = TABLE_GRID,
                           trials: int = 100, seed: int = DEFAULT_SEED,
                           base: int = 10) -> SweepResult:
    spec = SourceSpec(SourceKind.PRIME_PRODUCTS, prime_count=store.count)
    return run_parity_sweep(store, sample_sizes, trials, spec, base, seed)


def run_bias_sweep(rates: Iterable[float] = BIAS_RATES, s: int = 400_000, trials: int = 100,
                   m: Optional[int] = None, seed: int = DEFAULT_SEED,
                   store: Optional[PrimeStore] = None, base: int = 10) -> SweepResult:
    rates = _increasing(rates, "bias rates")
    if m is None:
        if store is None:
            raise ValueError("give range_max or a store to take it from")
        m = store.max_prime
    points = []
    for i, r in enumerate(rates):
        spec = SourceSpec(SourceKind.BIASED_RANDOM_PRODUCTS, range_max=m, bias_rate=r)
        points.append((r, _batch(spec, s, trials, seed, i, None, base).summary()))
    meta = {"source": "biased-products", "range_max": m, "sample_size": s, "base": base,
            "trials": trials, "seed": seed, "baseline": "odd integers in [3, range_max]"}
    return SweepResult(Axis.BIAS_RATE, points, meta=meta)


def run_mixed_sweep(store: PrimeStore, s: int = 300_000,
                    fractions: Iterable[float] = MIX_FRACTIONS, trials: int = 1000,
                    m: Optional[int] = None, seed: int = DEFAULT_SEED,
                    base: int = 10) -> SweepResult:
    """Z-score versus prime fraction; the attached line is fitted against
    the fraction in percent."""
    fractions = _increasing(fractions, "prime fractions")
    points = []
    for i, x in enumerate(fractions):
        spec = SourceSpec(SourceKind.MIXED, prime_count=store.count, range_max=m,
                          prime_fraction=x)
        points.append((x, _batch(spec, s, trials, seed, i, store, base).summary()))
    fit = None
    try:
        fit = linear_fit([(100.0 * x, p.z_score) for x, p in points])
    except FitError:
        pass
    meta = _spec_meta(SourceSpec(SourceKind.MIXED, prime_count=store.count, range_max=m), store)
    meta |= {"sample_size": s, "base": base, "trials": trials, "seed": seed,
             "fit_x": "prime percentage"}
    return SweepResult(Axis.PRIME_FRACTION, points, fit=fit, meta=meta)


def run_chebyshev_experiment(store: PrimeStore, sample_sizes: Iterable[int] = TABLE_GRID,
                             trials: int = 100, seed: int = DEFAULT_SEED,
                             base: int = 10) -> SweepResult:
    spec = SourceSpec(SourceKind.CHEBYSHEV_BALANCED, prime_count=store.count)
    return run_parity_sweep(store, sample_sizes, trials, spec, base, seed)


@njit(cache=True)
def _count_odd_residues(primes, divisors, chunk, table):
    odd = 0
    for p in primes:
        for r in divisors:
            v = p if p < r else p % r
            odd += odd_digit_sum(v, chunk, table)
    return odd


def run_mod_experiment(store: PrimeStore, seed: int = DEFAULT_SEED,
                       prime_pool_size: int = 1000, prime_subset: int = 100,
                       random_count: int = 1_000_000, m: Optional[int] = None,
                       base: int = 10) -> TrialSummary:
    """Digit parity of ``p mod r`` over all subset-prime/divisor pairs,
    summarized as one binomial sample."""
    rng = Xoshiro256(trial_seeds(seed, 0, 1)[0])
    primes, divisors = mod_operands(store, prime_pool_size, prime_subset, random_count, m, rng)
    chunk, table = parity_table(base)
    odd = int(_count_odd_residues(primes, divisors, np.uint64(chunk), table))
    total = prime_subset * random_count
    return summarize_trials([total - odd], total)


def run_base_sweep(store: PrimeStore, bases: Iterable[int] = EVEN_BASES, s: int = 100_000,
                   trials: int = 1000, seed: int = DEFAULT_SEED) -> SweepResult:
    bases = _increasing(bases, "bases")
    for b in bases:
        check_base(b)
        if b % 2:
            raise DegenerateBaseError(f"base {b} is odd; every odd prime has an odd digit sum")
    spec = SourceSpec(SourceKind.PRIMES, prime_count=store.count)
    points = [(b, _batch(spec, s, trials, seed, s, store, b).summary()) for b in bases]
    meta = {"source": "primes", "prime_count": store.count, "sample_size": s,
            "trials": trials, "seed": seed}
    return SweepResult(Axis.BASE, points, meta=meta)


# --- CSV output -------------------------------------------------------------------

CENSUS_HEADER = ("N", "base", "odd_count", "even_count")
SWEEP_HEADER = ("axis", "axis_value", "sample_size", "trials", "avg_even", "expectation",
                "std_dev", "z_score", "z_signed", "chebyshev_bound")
FIT_HEADER = ("kind", "c2", "c1", "c0", "r_squared", "p_value", "sse")
DISTINGUISH_HEADER = ("sample_size", "trials", "threshold", "p_avg", "exp_avg", "std_avg",
                      "z_avg", "verdict")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def metadata_line(config: dict) -> str:
    return "# " + json.dumps(config, sort_keys=True, default=str) + "\n"


def write_census_csv(result: CensusResult, fh) -> None:
    w = _writer(fh)
    w.writerow(CENSUS_HEADER)
    w.writerow([fmt(result.prime_count), fmt(result.base), fmt(result.odd_count),
                fmt(result.even_count)])


def sweep_rows(sweep: SweepResult) -> list:
    rows = []
    for value, p in sweep.points:
        rows.append([sweep.axis.value, fmt(value), fmt(p.sample_size), fmt(p.trials),
                     fmt(p.avg_even), fmt(p.expectation), fmt(p.std_dev), fmt(p.z_score),
                     fmt(p.z_signed), fmt(p.chebyshev_bound)])
    return rows


def write_sweep_csv(sweep: SweepResult, fh) -> None:
    w = _writer(fh)
    w.writerow(SWEEP_HEADER)
    w.writerows(sweep_rows(sweep))


def write_fit_csv(fit: FitResult, fh) -> None:
    w = _writer(fh)
    w.writerow(FIT_HEADER)
    c2, c1, c0 = fit.coefficients
    linear = fit.kind.value == "linear"
    w.writerow([fit.kind.value, "" if linear else fmt(c2), fmt(c1), fmt(c0),
                fmt(fit.r_squared), fmt(fit.p_value), fmt(fit.sse)])


def write_distinguish_csv(run: DistinguisherRun, fh) -> None:
    w = _writer(fh)
    w.writerow(DISTINGUISH_HEADER)
    w.writerow([fmt(run.sample_size), fmt(run.trials), fmt(run.threshold), fmt(run.p_avg),
                fmt(run.exp_avg), fmt(run.std_avg), fmt(run.z_avg), run.verdict])


def to_csv(writer_fn, obj) -> str:
    buf = io.StringIO()
    writer_fn(obj, buf)
    return buf.getvalue()
