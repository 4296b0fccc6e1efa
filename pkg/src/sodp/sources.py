"""Seeded number sources: primes, random integers, products, mixes.

Each kind has an array generator (``draw``) and a fused kernel that counts
even digit-sum parities per trial without materializing the sample. Both
consume the xoshiro256** stream in the same order, so
``count_even(draw(spec, s, Xoshiro256(seed)))`` equals the fused count for
that seed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from numba import njit, prange

from .digits import odd_digit_sum, parity_table
from .prime_store import PrimeStore, build_primes
from .rng import (Xoshiro256, nb_seed_state, rejection_threshold, uniform_below,
                  uniform_below_t)

DEFAULT_PRIME_COUNT = 50_000_000
BIAS_POOL_FACTOR = 3
BIAS_POOL_RETRIES = 32

_U = np.uint64
_ONE = _U(1)
_TWO = _U(2)
_THREE = _U(3)


class SourceKind(enum.Enum):
    PRIMES = "primes"
    RANDOM_ODD = "random-odd"
    RANDOM_ALL = "random-all"
    PRIME_PRODUCTS = "prime-products"
    BIASED_RANDOM_PRODUCTS = "biased-products"
    MIXED = "mixed"
    CHEBYSHEV_BALANCED = "chebyshev"


_NEEDS_STORE = {
    SourceKind.PRIMES,
    SourceKind.PRIME_PRODUCTS,
    SourceKind.MIXED,
    SourceKind.CHEBYSHEV_BALANCED,
}


class SourceError(ValueError):
    pass


@dataclass(frozen=True)
class SourceSpec:
    """A number-generating distribution.

    ``range_max`` of ``None`` means the largest prime of the population.
    Random odd draws cover ``[3, range_max]``; random-all and the random part
    of a mix cover ``[2, range_max]``.
    """

    kind: SourceKind
    prime_count: int = DEFAULT_PRIME_COUNT
    range_max: Optional[int] = None
    bias_rate: float = 0.5
    prime_fraction: float = 0.0
    seed: int = 0

    def validate(self) -> SourceSpec:
        if self.prime_count < 1:
            raise SourceError("prime_count must be positive")
        if self.range_max is not None and not 3 <= self.range_max < 2**64:
            raise SourceError("range_max must lie in [3, 2**64)")
        if not 0.5 <= self.bias_rate <= 1.0:
            raise SourceError(f"bias_rate {self.bias_rate} outside [0.5, 1]")
        if not 0.0 <= self.prime_fraction <= 1.0:
            raise SourceError(f"prime_fraction {self.prime_fraction} outside [0, 1]")
        return self

    @property
    def needs_store(self) -> bool:
        return self.kind in _NEEDS_STORE or self.range_max is None

    def with_range(self, store: Optional[PrimeStore]) -> SourceSpec:
        if self.range_max is not None:
            return self
        if store is None:
            raise SourceError("range_max unset and no prime store to default from")
        return replace(self, range_max=max(store.max_prime, 3))


@lru_cache(maxsize=1)
def _cached_store(count: int) -> PrimeStore:
    return build_primes(count)


def resolve_store(spec: SourceSpec, store: Optional[PrimeStore]) -> Optional[PrimeStore]:
    if not spec.needs_store:
        return store
    if store is None:
        return _cached_store(spec.prime_count)
    if store.count != spec.prime_count:
        raise SourceError(
            f"spec wants the first {spec.prime_count} primes, store holds {store.count}")
    return store


def mixed_split(s: int, x: float) -> tuple[int, int]:
    """(random draws, prime draws) for a mix with prime fraction ``x``."""
    n_rand = math.floor(round((1.0 - x) * s, 9))
    return n_rand, s - n_rand


def biased_split(s: int, r: float) -> tuple[int, int]:
    """(even-parity, odd-parity) pool members for bias rate ``r``."""
    n_even = math.floor(round(r * s, 9))
    return n_even, s - n_even


# --- generators ---------------------------------------------------------------

@njit(cache=True)
def _gen_from(state, values, out):
    n = _U(values.shape[0])
    th = rejection_threshold(n)
    for i in range(out.shape[0]):
        out[i] = values[uniform_below_t(state, n, th)]


@njit(cache=True)
def _gen_random_odd(state, half_span, out):
    th = rejection_threshold(half_span)
    for i in range(out.shape[0]):
        out[i] = _THREE + _TWO * uniform_below_t(state, half_span, th)


@njit(cache=True)
def _gen_random_all(state, span, out):
    th = rejection_threshold(span)
    for i in range(out.shape[0]):
        out[i] = _TWO + uniform_below_t(state, span, th)


@njit(cache=True)
def _gen_products(state, primes, out):
    n = _U(primes.shape[0])
    th = rejection_threshold(n)
    for i in range(out.shape[0]):
        p = primes[uniform_below_t(state, n, th)]
        q = primes[uniform_below_t(state, n, th)]
        out[i] = p * q


@njit(cache=True)
def _gen_biased_products(state, n_even, n_odd, half_span, chunk, table, retries, out):
    """Pool of n_even even-parity and n_odd odd-parity random odd numbers
    picked from 3s fresh draws, then s products of two pool members.
    Returns the number of pool attempts, or -1 if every attempt fell short."""
    s = n_even + n_odd
    raw = np.empty(3 * s, dtype=np.uint64)
    pool = np.empty(s, dtype=np.uint64)
    for attempt in range(1, retries + 1):
        _gen_random_odd(state, half_span, raw)
        ie = 0
        io = n_even
        for v in raw:
            if odd_digit_sum(v, chunk, table):
                if io < s:
                    pool[io] = v
                    io += 1
            elif ie < n_even:
                pool[ie] = v
                ie += 1
        if ie == n_even and io == s:
            ns = _U(s)
            th = rejection_threshold(ns)
            for i in range(out.shape[0]):
                a = pool[uniform_below_t(state, ns, th)]
                b = pool[uniform_below_t(state, ns, th)]
                out[i] = a * b
            return attempt
    return -1


@njit(cache=True)
def _gen_two_classes(state, class_a, class_b, out):
    half = out.shape[0] // 2
    _gen_from(state, class_a, out[:half])
    _gen_from(state, class_b, out[half:])


@njit(cache=True)
def _choose_subset(state, pool_size, k):
    idx = np.arange(pool_size)
    for i in range(k):
        j = i + uniform_below(state, _U(pool_size - i))
        tmp = idx[i]
        idx[i] = idx[j]
        idx[j] = tmp
    return idx[:k].copy()


# --- fused per-trial counters --------------------------------------------------

@njit(cache=True, parallel=True)
def _count_indexed(seeds, s, odd_flags):
    out = np.empty(seeds.shape[0], dtype=np.int64)
    n = _U(odd_flags.shape[0])
    th = rejection_threshold(n)
    for t in prange(seeds.shape[0]):
        state = nb_seed_state(seeds[t])
        odd = 0
        for _ in range(s):
            odd += odd_flags[uniform_below_t(state, n, th)]
        out[t] = s - odd
    return out


@njit(cache=True, parallel=True)
def _count_random_odd(seeds, s, half_span, chunk, table):
    out = np.empty(seeds.shape[0], dtype=np.int64)
    th = rejection_threshold(half_span)
    for t in prange(seeds.shape[0]):
        state = nb_seed_state(seeds[t])
        odd = 0
        for _ in range(s):
            v = _THREE + _TWO * uniform_below_t(state, half_span, th)
            odd += odd_digit_sum(v, chunk, table)
        out[t] = s - odd
    return out


@njit(cache=True, parallel=True)
def _count_mixed(seeds, n_rand, n_prime, span, odd_flags, chunk, table):
    out = np.empty(seeds.shape[0], dtype=np.int64)
    n = _U(odd_flags.shape[0])
    th_n = rejection_threshold(n)
    th_span = rejection_threshold(span)
    for t in prange(seeds.shape[0]):
        state = nb_seed_state(seeds[t])
        odd = 0
        for _ in range(n_rand):
            odd += odd_digit_sum(_TWO + uniform_below_t(state, span, th_span), chunk, table)
        for _ in range(n_prime):
            odd += odd_flags[uniform_below_t(state, n, th_n)]
        out[t] = n_rand + n_prime - odd
    return out


@njit(cache=True, parallel=True)
def _count_products(seeds, s, primes, chunk, table):
    out = np.empty(seeds.shape[0], dtype=np.int64)
    n = _U(primes.shape[0])
    th = rejection_threshold(n)
    for t in prange(seeds.shape[0]):
        state = nb_seed_state(seeds[t])
        odd = 0
        for _ in range(s):
            p = primes[uniform_below_t(state, n, th)]
            q = primes[uniform_below_t(state, n, th)]
            odd += odd_digit_sum(p * q, chunk, table)
        out[t] = s - odd
    return out


@njit(cache=True, parallel=True)
def _count_biased_products(seeds, n_even, n_odd, half_span, chunk, table):
    s = n_even + n_odd
    out = np.empty(seeds.shape[0], dtype=np.int64)
    for t in prange(seeds.shape[0]):
        state = nb_seed_state(seeds[t])
        buf = np.empty(s, dtype=np.uint64)
        if _gen_biased_products(state, n_even, n_odd, half_span, chunk, table,
                                BIAS_POOL_RETRIES, buf) < 0:
            out[t] = -1
            continue
        odd = 0
        for v in buf:
            odd += odd_digit_sum(v, chunk, table)
        out[t] = s - odd
    return out


@njit(cache=True, parallel=True)
def _count_two_classes(seeds, s, odd_a, odd_b):
    out = np.empty(seeds.shape[0], dtype=np.int64)
    half = s // 2
    na = _U(odd_a.shape[0])
    nb = _U(odd_b.shape[0])
    th_a = rejection_threshold(na)
    th_b = rejection_threshold(nb)
    for t in prange(seeds.shape[0]):
        state = nb_seed_state(seeds[t])
        odd = 0
        for _ in range(half):
            odd += odd_a[uniform_below_t(state, na, th_a)]
        for _ in range(s - half):
            odd += odd_b[uniform_below_t(state, nb, th_b)]
        out[t] = s - odd
    return out


# --- public draws -------------------------------------------------------------

def _range_max(m: Optional[int], store: Optional[PrimeStore]) -> int:
    if m is None:
        if store is None:
            raise SourceError("no range_max and no store")
        m = store.max_prime
    if m < 3:
        raise SourceError("range_max must be at least 3")
    return int(m)


def _check_s(s: int) -> int:
    if s < 1:
        raise SourceError(f"sample size must be >= 1, got {s}")
    return int(s)


def _odd_half_span(m: int) -> np.uint64:
    return _U((m - 3) // 2 + 1)


def draw_random_odd(s: int, m: int, rng: Xoshiro256) -> np.ndarray:
    out = np.empty(_check_s(s), dtype=np.uint64)
    _gen_random_odd(rng.state, _odd_half_span(_range_max(m, None)), out)
    return out


def draw_random_all(s: int, m: int, rng: Xoshiro256) -> np.ndarray:
    out = np.empty(_check_s(s), dtype=np.uint64)
    _gen_random_all(rng.state, _U(_range_max(m, None) - 1), out)
    return out


def draw_primes(store: PrimeStore, s: int, rng: Xoshiro256) -> np.ndarray:
    out = np.empty(_check_s(s), dtype=np.uint64)
    _gen_from(rng.state, store.primes, out)
    return out


def _check_product_range(store: PrimeStore) -> None:
    if store.max_prime ** 2 >= 2**64:
        raise OverflowError(f"max prime {store.max_prime} squared overflows 64 bits")


def draw_prime_products(store: PrimeStore, s: int, rng: Xoshiro256) -> np.ndarray:
    _check_product_range(store)
    out = np.empty(_check_s(s), dtype=np.uint64)
    _gen_products(rng.state, store.primes, out)
    return out


def _check_bias_args(r: float, m: int) -> None:
    if not 0.5 <= r <= 1.0:
        raise SourceError(f"bias rate {r} outside [0.5, 1]")
    if m >= 2**32:
        raise SourceError("biased products need range_max < 2**32 to keep products in 64 bits")


def draw_biased_random_products(r: float, s: int, m: int, rng: Xoshiro256,
                                base: int = 10) -> np.ndarray:
    """Products of pairs from a parity-biased pool of random odd numbers."""
    m = _range_max(m, None)
    _check_bias_args(r, m)
    n_even, n_odd = biased_split(_check_s(s), r)
    chunk, table = parity_table(base)
    out = np.empty(s, dtype=np.uint64)
    if _gen_biased_products(rng.state, n_even, n_odd, _odd_half_span(m),
                            _U(chunk), table, BIAS_POOL_RETRIES, out) < 0:
        raise SourceError(f"no parity-balanced pool after {BIAS_POOL_RETRIES} attempts")
    return out


def draw_mixed(store: PrimeStore, s: int, x: float, m: Optional[int],
               rng: Xoshiro256) -> np.ndarray:
    """Random integers in [2, m] whose trailing block is replaced by primes."""
    if not 0.0 <= x <= 1.0:
        raise SourceError(f"prime fraction {x} outside [0, 1]")
    m = _range_max(m, store)
    n_rand, _ = mixed_split(_check_s(s), x)
    out = np.empty(s, dtype=np.uint64)
    _gen_random_all(rng.state, _U(m - 1), out[:n_rand])
    _gen_from(rng.state, store.primes, out[n_rand:])
    return out


def _balanced_classes(store: PrimeStore, s: int):
    if s % 2:
        raise SourceError(f"balanced samples need an even size, got {s}")
    ones = store.residue_class(1, 4)
    threes = store.residue_class(3, 4)
    if min(ones.size, threes.size) < s // 2:
        raise SourceError(
            f"store has {ones.size} primes = 1 mod 4 and {threes.size} = 3 mod 4; need {s // 2} each")
    return ones, threes


def draw_chebyshev_balanced(store: PrimeStore, s: int, rng: Xoshiro256) -> np.ndarray:
    """s/2 primes = 1 (mod 4) and s/2 primes = 3 (mod 4), shuffled."""
    ones, threes = _balanced_classes(store, _check_s(s))
    out = np.empty(s, dtype=np.uint64)
    _gen_two_classes(rng.state, store.primes[ones], store.primes[threes], out)
    rng.shuffle(out)
    return out


def draw_mod_pairs(store: PrimeStore, prime_pool_size: int, prime_subset: int,
                   random_count: int, m: Optional[int], rng: Xoshiro256) -> np.ndarray:
    """``p mod r`` for every pair of a random prime subset and random divisors.

    ``prime_subset`` distinct primes come from the first ``prime_pool_size``;
    divisors are uniform on [2, m]. Output is prime-major.
    """
    primes, divisors = mod_operands(store, prime_pool_size, prime_subset, random_count, m, rng)
    return (primes[:, None] % divisors[None, :]).ravel()


def mod_operands(store, prime_pool_size, prime_subset, random_count, m, rng):
    if not 1 <= prime_subset <= prime_pool_size <= store.count:
        raise SourceError("need 1 <= prime_subset <= prime_pool_size <= store.count")
    if random_count < 1:
        raise SourceError("random_count must be positive")
    m = _range_max(m, store)
    idx = _choose_subset(rng.state, prime_pool_size, prime_subset)
    divisors = draw_random_all(random_count, m, rng)
    return store.primes[idx], divisors


def draw(spec: SourceSpec, s: int, rng: Xoshiro256,
         store: Optional[PrimeStore] = None, base: int = 10) -> np.ndarray:
    """One sample of ``s`` numbers; ``base`` only matters for biased products,
    whose pool is split by digit parity in that base."""
    spec.validate()
    store = resolve_store(spec, store)
    spec = spec.with_range(store)
    m = spec.range_max
    k = spec.kind
    if k is SourceKind.PRIMES:
        return draw_primes(store, s, rng)
    if k is SourceKind.RANDOM_ODD:
        return draw_random_odd(s, m, rng)
    if k is SourceKind.RANDOM_ALL:
        return draw_random_all(s, m, rng)
    if k is SourceKind.PRIME_PRODUCTS:
        return draw_prime_products(store, s, rng)
    if k is SourceKind.BIASED_RANDOM_PRODUCTS:
        return draw_biased_random_products(spec.bias_rate, s, m, rng, base)
    if k is SourceKind.MIXED:
        return draw_mixed(store, s, spec.prime_fraction, m, rng)
    if k is SourceKind.CHEBYSHEV_BALANCED:
        return draw_chebyshev_balanced(store, s, rng)
    raise SourceError(f"unknown source kind {k}")


def trial_even_counts(spec: SourceSpec, s: int, seeds, store: Optional[PrimeStore] = None,
                      base: int = 10) -> np.ndarray:
    """Even digit-sum counts for one sample of size ``s`` per seed.

    Trial ``i`` draws from ``Xoshiro256(seeds[i])``; the result matches
    counting ``draw(spec, s, Xoshiro256(seeds[i]))`` element by element.
    """
    spec.validate()
    s = _check_s(s)
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    store = resolve_store(spec, store)
    spec = spec.with_range(store)
    m = spec.range_max
    chunk, table = parity_table(base)
    chunk = _U(chunk)
    k = spec.kind
    if k is SourceKind.PRIMES:
        return _count_indexed(seeds, s, store.odd_parities(base))
    if k is SourceKind.RANDOM_ODD:
        return _count_random_odd(seeds, s, _odd_half_span(m), chunk, table)
    if k is SourceKind.RANDOM_ALL:
        return _count_mixed(seeds, s, 0, _U(m - 1), np.zeros(1, np.uint8), chunk, table)
    if k is SourceKind.MIXED:
        n_rand, n_prime = mixed_split(s, spec.prime_fraction)
        return _count_mixed(seeds, n_rand, n_prime, _U(m - 1), store.odd_parities(base),
                            chunk, table)
    if k is SourceKind.PRIME_PRODUCTS:
        _check_product_range(store)
        return _count_products(seeds, s, store.primes, chunk, table)
    if k is SourceKind.BIASED_RANDOM_PRODUCTS:
        _check_bias_args(spec.bias_rate, m)
        n_even, n_odd = biased_split(s, spec.bias_rate)
        counts = _count_biased_products(seeds, n_even, n_odd, _odd_half_span(m), chunk, table)
        if counts.min() < 0:
            raise SourceError(f"no parity-balanced pool after {BIAS_POOL_RETRIES} attempts")
        return counts
    if k is SourceKind.CHEBYSHEV_BALANCED:
        ones, threes = _balanced_classes(store, s)
        par = store.odd_parities(base)
        return _count_two_classes(seeds, s, par[ones], par[threes])
    raise SourceError(f"unknown source kind {k}")
