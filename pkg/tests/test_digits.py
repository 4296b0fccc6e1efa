import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reference import digit_list, trial_division_primes
from sodp.digits import (Parity, count_odd, digit_parities, digit_parity, digit_sum,
                         digit_sums, parity_table)
from sodp.rng import Xoshiro256

U64 = st.integers(0, 2**64 - 1)
BASES = st.integers(2, 40)


@pytest.mark.parametrize("n, base, expected", [(0, 10, 0), (9973, 10, 28), (255, 16, 30),
                                               (2**64 - 1, 2, 64)])
def test_digit_sum_examples(n, base, expected):
    assert digit_sum(n, base) == expected


def test_digit_parity_examples():
    assert digit_parity(11) is Parity.EVEN
    assert digit_parity(2) is Parity.EVEN
    assert digit_parity(9973) is Parity.EVEN
    assert digit_parity(3) is Parity.ODD


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        digit_sum(-1)
    with pytest.raises(ValueError):
        digit_sum(10, 1)


@given(U64, BASES)
def test_digit_sum_matches_digit_list(n, base):
    assert digit_sum(n, base) == sum(digit_list(n, base))


@given(st.integers(1, 2**64 - 1), st.integers(2, 36))
def test_digits_below_base_and_string_form(n, base):
    # independent check through Python's own base conversion
    assert digit_sum(n, base) == sum(int(c, 36) for c in np.base_repr(n, base))


def test_congruence_mod_base_minus_one_million_inputs():
    values = Xoshiro256(17).random_raw(1_000_000)
    for base in (3, 10, 16):
        sums = digit_sums(values, base)
        assert np.array_equal(sums % np.uint64(base - 1), values % np.uint64(base - 1))


@given(st.lists(U64, min_size=1, max_size=50), st.integers(2, 64))
@settings(max_examples=200)
def test_fast_parities_match_reference(values, base):
    got = digit_parities(np.array(values, dtype=np.uint64), base)
    assert got.tolist() == [sum(digit_list(v, base)) & 1 for v in values]


@pytest.mark.parametrize("base", [2, 3, 7, 10, 16, 36, 1000, 2**20])
def test_fast_parities_on_block_boundaries(base):
    chunk, _ = parity_table(base)
    edge = [0, 1, chunk - 1, chunk, chunk + 1, chunk * chunk - 1, chunk * chunk, 2**64 - 1]
    vals = np.array(edge, dtype=np.uint64)
    assert digit_parities(vals, base).tolist() == [sum(digit_list(v, base)) & 1 for v in edge]
    assert count_odd(vals, base) == sum(sum(digit_list(v, base)) & 1 for v in edge)


def test_odd_base_parity_equals_number_parity():
    primes = trial_division_primes(2000)[1:]
    for base in (3, 5, 7, 9, 11):
        assert all(digit_parity(p, base) is Parity.ODD for p in primes)
    values = Xoshiro256(3).random_raw(10_000)
    for base in (3, 5, 15):
        assert np.array_equal(digit_parities(values, base), (values & np.uint64(1)).astype(np.uint8))


@given(st.integers(0, 2**60), st.integers(0, 9), BASES)
def test_appending_a_digit_adds_it(n, d, base):
    d %= base
    assert digit_sum(n * base + d, base) == digit_sum(n, base) + d
