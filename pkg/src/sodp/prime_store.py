"""The first N primes: segmented sieve, binary cache, uniform sampling."""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np
from numba import njit

from .digits import digit_parities
from .rng import Xoshiro256

MAGIC = b"SODP"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQ")
_TRAILER = struct.Struct("<Q")

SEGMENT_ODDS = 1 << 22


class CacheError(Exception):
    """A prime cache file could not be read."""


class CacheHeaderError(CacheError):
    pass


class CacheTruncatedError(CacheError):
    pass


class CacheChecksumError(CacheError):
    pass


class PrimeStore:
    """Immutable, strictly increasing array of the first ``count`` primes.

    Per-base digit parities and the mod-4 residue split are derived lazily
    and memoized; the prime array itself is read-only.
    """

    __slots__ = ("primes", "_memo")

    def __init__(self, primes):
        arr = np.array(primes, dtype=np.uint64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a PrimeStore holds at least one prime")
        arr.flags.writeable = False
        self.primes = arr
        self._memo = {}

    @property
    def count(self) -> int:
        return int(self.primes.shape[0])

    @property
    def max_prime(self) -> int:
        return int(self.primes[-1])

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other):
        if not isinstance(other, PrimeStore):
            return NotImplemented
        return np.array_equal(self.primes, other.primes)

    __hash__ = None

    def __repr__(self):
        return f"PrimeStore(count={self.count}, max_prime={self.max_prime})"

    def odd_parities(self, base: int = 10) -> np.ndarray:
        """uint8 per prime: 1 where its digit sum in ``base`` is odd."""
        key = ("parity", int(base))
        if key not in self._memo:
            par = digit_parities(self.primes, base)
            par.flags.writeable = False
            self._memo[key] = par
        return self._memo[key]

    def residue_class(self, residue: int, modulus: int = 4) -> np.ndarray:
        """Indices of the primes congruent to ``residue`` mod ``modulus``."""
        key = ("class", int(residue), int(modulus))
        if key not in self._memo:
            idx = np.flatnonzero(self.primes % np.uint64(modulus) == np.uint64(residue))
            idx.flags.writeable = False
            self._memo[key] = idx
        return self._memo[key]


def nth_prime_upper_bound(n: int) -> int:
    """p_n < n (ln n + ln ln n) for n >= 6; small n from the table."""
    if n < 6:
        return (2, 3, 5, 7, 11)[n - 1]
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def _small_primes(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).astype(np.int64)


@njit(cache=True)
def _mark_segment(odd_primes, low, mask):
    # mask[i] stands for low + 2*i; low is odd
    high = low + 2 * mask.shape[0]
    for p in odd_primes:
        p2 = p * p
        if p2 >= high:
            break
        start = max(p2, ((low + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        for j in range((start - low) // 2, mask.shape[0], p):
            mask[j] = False


def build_primes(count: int) -> PrimeStore:
    """The first ``count`` primes via an odd-only segmented sieve."""
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    limit = nth_prime_upper_bound(count)
    try:
        out = np.empty(count, dtype=np.uint64)
    except MemoryError as exc:
        raise MemoryError(f"cannot hold {count} primes ({8 * count} bytes)") from exc
    out[0] = 2
    filled = 1
    low = 3
    while filled < count:
        odd_primes = _small_primes(math.isqrt(limit) + 1)[1:]
        mask = np.empty(SEGMENT_ODDS, dtype=np.bool_)
        while filled < count and low <= limit:
            mask[:] = True
            _mark_segment(odd_primes, low, mask)
            found = low + 2 * np.flatnonzero(mask)
            take = min(found.size, count - filled)
            out[filled:filled + take] = found[:take]
            filled += take
            low += 2 * SEGMENT_ODDS
        # undershoot of the bound: widen and keep sieving from where we stopped
        limit = max(limit * 5 // 4, low + 2 * SEGMENT_ODDS)
    return PrimeStore(out)


def save_cache(store: PrimeStore, path) -> None:
    primes = store.primes.astype("<u8", copy=False)
    checksum = int(np.sum(store.primes, dtype=np.uint64))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, store.count))
        primes.tofile(fh)
        fh.write(_TRAILER.pack(checksum))
    tmp.replace(path)


def load_cache(path) -> PrimeStore:
    path = Path(path)
    size = path.stat().st_size
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise CacheHeaderError(f"{path}: file too short for a header")
        magic, version, count = _HEADER.unpack(head)
        if magic != MAGIC:
            raise CacheHeaderError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise CacheHeaderError(f"{path}: unsupported format version {version}")
        if count < 1:
            raise CacheHeaderError(f"{path}: declared count {count}")
        expected = _HEADER.size + 8 * count + _TRAILER.size
        if size < expected:
            raise CacheTruncatedError(f"{path}: {size} bytes, expected {expected}")
        if size > expected:
            raise CacheHeaderError(f"{path}: {size - expected} trailing bytes")
        primes = np.fromfile(fh, dtype="<u8", count=count).astype(np.uint64, copy=False)
        (checksum,) = _TRAILER.unpack(fh.read(_TRAILER.size))
    if int(np.sum(primes, dtype=np.uint64)) != checksum:
        raise CacheChecksumError(f"{path}: checksum mismatch")
    return PrimeStore(primes)


def sample_primes(store: PrimeStore, s: int, rng: Xoshiro256) -> np.ndarray:
    """``s`` primes drawn uniformly with replacement."""
    if s < 1:
        raise ValueError(f"sample size must be >= 1, got {s}")
    idx = rng.integers(0, store.count - 1, size=s)
    return store.primes[idx]
