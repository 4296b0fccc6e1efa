"""Pinned pseudorandom streams: splitmix64 seeding and xoshiro256**.

Every random quantity in the package flows through the primitives here so
that a (seed, trial) pair names one exact sequence of draws on any platform.

Conventions
-----------
``splitmix64(x)``
    First output of a splitmix64 generator whose state is ``x``, i.e. the
    finalizer applied to ``x + 0x9E3779B97F4A7C15``.
``derive_seed(seed, index)``
    ``splitmix64(seed ^ index)``. Per-trial seeds come from this so trials
    can run in any order.
xoshiro256** state
    The four state words are the first four outputs of a splitmix64
    generator started at the seed.
Bounded integers
    ``uniform_below(n)`` uses Lemire's multiply-and-reject method. When
    ``n <= 2**32`` it consumes the upper 32 bits of one output, otherwise the
    full 64 bits with a 128-bit product. Rejection keeps draws exactly
    uniform.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U = np.uint64
_GOLDEN_U = _U(GOLDEN)
_MIX1_U = _U(_MIX1)
_MIX2_U = _U(_MIX2)
_S30 = _U(30)
_S27 = _U(27)
_S31 = _U(31)
_S17 = _U(17)
_S45 = _U(45)
_S7 = _U(7)
_S32 = _U(32)
_FIVE = _U(5)
_NINE = _U(9)
_ONE = _U(1)
_ZERO = _U(0)
_LO32 = _U(0xFFFFFFFF)
_TWO32 = _U(1 << 32)


def splitmix64(x: int) -> int:
    z = (int(x) + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    return splitmix64((int(seed) ^ int(index)) & MASK64)


def trial_seeds(seed: int, key: int, trials: int) -> np.ndarray:
    """Seeds for ``trials`` independent trials of the sweep point ``key``."""
    point = derive_seed(int(seed) & MASK64, int(key) & MASK64)
    return np.array([derive_seed(point, i) for i in range(trials)], dtype=np.uint64)


def seed_state(seed: int) -> np.ndarray:
    words = []
    x = int(seed) & MASK64
    for _ in range(4):
        words.append(splitmix64(x))
        x = (x + GOLDEN) & MASK64
    return np.array(words, dtype=np.uint64)


# --- jitted primitives --------------------------------------------------------
# All arithmetic is kept in uint64; mixing in Python ints would promote to float.

@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _MIX1_U
    z = (z ^ (z >> _S27)) * _MIX2_U
    return z ^ (z >> _S31)


@njit(cache=True)
def nb_seed_state(seed):
    state = np.empty(4, dtype=np.uint64)
    x = seed
    for i in range(4):
        x = x + _GOLDEN_U
        state[i] = _mix(x)
    return state


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (_U(64) - k))


@njit(cache=True, inline="always")
def next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * _FIVE, _S7) * _NINE
    t = s1 << _S17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, _S45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(cache=True, inline="always")
def _mul128(a, b):
    a_lo = a & _LO32
    a_hi = a >> _S32
    b_lo = b & _LO32
    b_hi = b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    lo = (mid << _S32) | (ll & _LO32)
    return hi, lo


@njit(cache=True, inline="always")
def rejection_threshold(n):
    """Lemire rejection threshold for ``uniform_below_t``."""
    if n <= _TWO32:
        return (_TWO32 - n) % n
    return (_ZERO - n) % n


@njit(cache=True, inline="always")
def uniform_below_t(state, n, thresh):
    """``uniform_below`` with the threshold hoisted out of hot loops."""
    if n <= _TWO32:
        m = (next_u64(state) >> _S32) * n
        while (m & _LO32) < thresh:
            m = (next_u64(state) >> _S32) * n
        return m >> _S32
    hi, lo = _mul128(next_u64(state), n)
    while lo < thresh:
        hi, lo = _mul128(next_u64(state), n)
    return hi


@njit(cache=True, inline="always")
def uniform_below(state, n):
    """Uniform integer in ``[0, n)``; ``n`` is a nonzero uint64."""
    if n <= _TWO32:
        m = (next_u64(state) >> _S32) * n
        low = m & _LO32
        if low < n:
            thresh = (_TWO32 - n) % n
            while low < thresh:
                m = (next_u64(state) >> _S32) * n
                low = m & _LO32
        return m >> _S32
    hi, lo = _mul128(next_u64(state), n)
    if lo < n:
        thresh = (_ZERO - n) % n
        while lo < thresh:
            hi, lo = _mul128(next_u64(state), n)
    return hi


@njit(cache=True)
def _fill_u64(state, out):
    for i in range(out.shape[0]):
        out[i] = next_u64(state)


@njit(cache=True)
def _fill_below(state, n, out):
    thresh = rejection_threshold(n)
    for i in range(out.shape[0]):
        out[i] = uniform_below_t(state, n, thresh)


@njit(cache=True)
def _shuffle(state, arr):
    for i in range(arr.shape[0] - 1, 0, -1):
        j = uniform_below(state, _U(i + 1))
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


class Xoshiro256:
    """A xoshiro256** stream.

    The generator owns a 4-word uint64 state array that jitted kernels
    advance in place. Copy it (``spawn`` or ``copy``) before sharing.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64
        self.state = seed_state(self.seed)

    @classmethod
    def from_state(cls, words) -> Xoshiro256:
        words = [int(w) & MASK64 for w in words]
        if len(words) != 4 or not any(words):
            raise ValueError("xoshiro256** needs four words, not all zero")
        obj = cls.__new__(cls)
        obj.seed = None
        obj.state = np.array(words, dtype=np.uint64)
        return obj

    def copy(self) -> Xoshiro256:
        obj = Xoshiro256.from_state(self.state)
        obj.seed = self.seed
        return obj

    def spawn(self, index: int) -> Xoshiro256:
        """Independent child stream; requires a generator built from a seed."""
        if self.seed is None:
            raise ValueError("spawn needs a seeded generator")
        return Xoshiro256(derive_seed(self.seed, index))

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def random_raw(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.uint64)
        _fill_u64(self.state, out)
        return out

    def integers(self, low: int, high: int, size: int | None = None):
        """Uniform integers on the closed interval ``[low, high]``."""
        if high < low:
            raise ValueError(f"empty range [{low}, {high}]")
        if low < 0 or high > MASK64:
            raise ValueError("bounds must lie in [0, 2**64 - 1]")
        span = high - low + 1
        out = np.empty(1 if size is None else size, dtype=np.uint64)
        if span > MASK64:
            _fill_u64(self.state, out)
        else:
            _fill_below(self.state, np.uint64(span), out)
            out += np.uint64(low)
        return int(out[0]) if size is None else out

    def shuffle(self, arr: np.ndarray) -> None:
        _shuffle(self.state, arr)
