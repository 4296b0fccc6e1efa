"""Digit sums and digit-sum parities in arbitrary bases.

``digit_sum`` and ``digit_parity`` are the plain repeated-division
definitions. The array functions use a chunked lookup table: the parity of a
number's digit sum is the XOR of the parities of its base**k blocks, so one
table of size base**k replaces k divisions. Base 10 uses 10**5 blocks with a
compile-time divisor.
"""
from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np
from numba import njit

MAX_CHUNK = 1 << 17

_U = np.uint64
_C10 = _U(100_000)


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1


def check_base(base: int) -> int:
    base = int(base)
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    return base


def digit_sum(n: int, base: int = 10) -> int:
    if n < 0:
        raise ValueError("digit_sum is defined for nonnegative integers")
    base = check_base(base)
    total = 0
    while n:
        n, d = divmod(n, base)
        total += d
    return total


def digit_parity(n: int, base: int = 10) -> Parity:
    return Parity(digit_sum(n, base) & 1)


@njit(cache=True)
def _digit_sums(values, base, out):
    for i in range(values.shape[0]):
        v = values[i]
        acc = _U(0)
        while v:
            acc += v % base
            v //= base
        out[i] = acc


def digit_sums(values, base: int = 10) -> np.ndarray:
    """Digit sums of a uint64 array by repeated division."""
    arr = np.ascontiguousarray(values, dtype=np.uint64)
    out = np.empty(arr.shape[0], dtype=np.uint64)
    _digit_sums(arr, _U(check_base(base)), out)
    return out


@lru_cache(maxsize=None)
def parity_table(base: int) -> tuple[int, np.ndarray]:
    """Block size ``base**k`` (largest not above 2**17) and the digit-sum
    parity of every block value."""
    base = check_base(base)
    chunk = base
    while chunk * base <= MAX_CHUNK:
        chunk *= base
    table = (digit_sums(np.arange(chunk, dtype=np.uint64), base) & _U(1)).astype(np.uint8)
    table.flags.writeable = False
    return chunk, table


@njit(cache=True, inline="always")
def odd_digit_sum(v, chunk, table):
    """1 if the digit sum of ``v`` is odd, else 0 (``table`` from parity_table)."""
    acc = np.uint8(0)
    if chunk == _C10:
        while v >= _C10:
            acc ^= table[v % _C10]
            v //= _C10
    else:
        while v >= chunk:
            acc ^= table[v % chunk]
            v //= chunk
    return acc ^ table[v]


@njit(cache=True)
def _parities(values, chunk, table, out):
    for i in range(values.shape[0]):
        out[i] = odd_digit_sum(values[i], chunk, table)


@njit(cache=True)
def _count_odd(values, chunk, table):
    n = 0
    for i in range(values.shape[0]):
        n += odd_digit_sum(values[i], chunk, table)
    return n


def digit_parities(values, base: int = 10) -> np.ndarray:
    """uint8 array: 1 where the digit sum is odd."""
    arr = np.ascontiguousarray(values, dtype=np.uint64)
    chunk, table = parity_table(base)
    out = np.empty(arr.shape[0], dtype=np.uint8)
    _parities(arr, _U(chunk), table, out)
    return out


def count_odd(values, base: int = 10) -> int:
    arr = np.ascontiguousarray(values, dtype=np.uint64)
    chunk, table = parity_table(base)
    return int(_count_odd(arr, _U(chunk), table))
