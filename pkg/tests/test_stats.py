import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import published
from reference import exact_binomial_cdf, normal_equations
from sodp.stats import (FitError, FitKind, binomial_cdf, binomial_sf, chebyshev_bound,
                        linear_fit, quadratic_fit_lnx, summarize_trials)


def mp_tails(k, n, p, dps=40):
    """(cdf, sf) by summing pmf terms outward from k in high precision."""
    with mp.workdps(dps):
        p = mp.mpf(p)
        q = 1 - p
        sd = mp.sqrt(n * p * q)
        log_pmf = lambda j: (mp.loggamma(n + 1) - mp.loggamma(j + 1) - mp.loggamma(n - j + 1)
                             + j * mp.log(p) + (n - j) * mp.log(q))
        if k <= n * p:
            lo = max(0, int(k - 60 * sd - 50))
            term = mp.exp(log_pmf(k))
            total, j = term, k
            while j > lo:
                term *= j / mp.mpf(n - j + 1) * q / p
                j -= 1
                total += term
            return total, 1 - total
        hi = min(n, int(k + 1 + 60 * sd + 50))
        j = k + 1
        term = mp.exp(log_pmf(j))
        total = term
        while j < hi:
            term *= (n - j) / mp.mpf(j + 1) * p / q
            j += 1
            total += term
        return 1 - total, total


# --- summaries -----------------------------------------------------------------

def test_summary_first_table_row():
    counts = np.full(1000, published.AVG_EVEN_PRIMES[0])
    summary = summarize_trials(counts, 100_000)
    assert summary.z_score == pytest.approx(12.80, abs=0.005)
    assert summary.z_signed < 0
    assert summary.std_dev == pytest.approx(5.0)
    assert summary.chebyshev_bound == pytest.approx(1 / 12.8**2)


def test_summary_last_table_row():
    summary = summarize_trials(np.full(1000, 2_496_799), 5_000_000)
    assert summary.z_score == pytest.approx(90.54, abs=0.005)


def test_summary_exact_expectation():
    summary = summarize_trials([500] * 7, 1000)
    assert summary.z_score == 0 and summary.chebyshev_bound == 1


def test_summary_validation():
    with pytest.raises(ValueError):
        summarize_trials([], 10)
    with pytest.raises(ValueError):
        summarize_trials([11], 10)
    with pytest.raises(ValueError):
        summarize_trials([-1], 10)


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=30))
def test_summary_matches_definition(counts):
    s, t = 1000, len(counts)
    summary = summarize_trials(counts, s)
    mean = Fraction(sum(counts), t)
    assert summary.avg_even == pytest.approx(float(mean))
    assert summary.z_score == pytest.approx(abs(float(mean) - 500) / math.sqrt(s / (4 * t)))


# --- Chebyshev -------------------------------------------------------------------

@pytest.mark.parametrize("z, expected", [(12.80, 6.1e-3), (29.85, 1.1e-3), (0.5, 1.0), (1.0, 1.0)])
def test_chebyshev_examples(z, expected):
    assert float(f"{chebyshev_bound(z):.2g}") == expected


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_chebyshev_monotone_and_bounded(a, b):
    lo, hi = sorted((a, b))
    assert 0 < chebyshev_bound(hi) <= chebyshev_bound(lo) <= 1


def test_chebyshev_negative():
    with pytest.raises(ValueError):
        chebyshev_bound(-0.1)


# --- binomial ----------------------------------------------------------------------

def test_binomial_trivial():
    assert binomial_cdf(1, 2, 0.5) == pytest.approx(0.75, abs=1e-15)
    assert binomial_cdf(-1, 5, 0.3) == 0 and binomial_cdf(5, 5, 0.3) == 1
    assert binomial_cdf(2, 5, 0.0) == 1 and binomial_cdf(2, 5, 1.0) == 0
    with pytest.raises(ValueError):
        binomial_cdf(1, 0, 0.5)
    with pytest.raises(ValueError):
        binomial_cdf(1, 3, 1.5)


@pytest.mark.parametrize("n", range(1, 21))
def test_binomial_exhaustive_small_n(n):
    for p in (0.001, 0.1, 0.25, 0.49935232, 0.5, 0.7, 0.999):
        for k in range(-1, n + 1):
            exact = float(exact_binomial_cdf(k, n, p)) if k >= 0 else 0.0
            assert binomial_cdf(k, n, p) == pytest.approx(exact, abs=1e-12)
            assert binomial_sf(k, n, p) == pytest.approx(1 - exact, abs=1e-12)


@pytest.mark.parametrize("k, n, p", [
    (49_990, 100_000, 0.5), (50_400, 100_000, 0.5), (300, 100_000, 0.002),
    (4_990_000, 10_000_000, 0.499), (2_000_123, 10_000_000, 0.2), (7_001_000, 10_000_000, 0.7),
])
def test_binomial_large_n_against_mpmath(k, n, p):
    cdf, sf = mp_tails(k, n, p)
    assert binomial_cdf(k, n, p) == pytest.approx(float(cdf), rel=1e-10, abs=1e-13)
    assert binomial_sf(k, n, p) == pytest.approx(float(sf), rel=1e-10, abs=1e-300)


def test_binomial_deep_tail_relative_accuracy():
    # 5 sigma above the mean of 10**8 draws at the prime parity rate
    k, n, p = 49_974_999, 10**8, 0.49935232
    _, sf = mp_tails(k, n, p)
    got = binomial_sf(k, n, p)
    assert got == pytest.approx(float(sf), rel=1e-9)
    assert 1e-16 < got < 1e-15


@given(st.integers(1, 200), st.floats(0.01, 0.99))
@settings(max_examples=100)
def test_binomial_cdf_monotone_in_k(n, p):
    values = [binomial_cdf(k, n, p) for k in range(n + 1)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    assert values[-1] == 1.0


# --- fits -------------------------------------------------------------------------

def test_linear_exact_line():
    fit = linear_fit([(x, 2 * x + 1) for x in range(6)])
    assert fit.kind is FitKind.LINEAR
    assert fit.slope == pytest.approx(2) and fit.intercept == pytest.approx(1)
    assert fit.r_squared == pytest.approx(1) and fit.sse == pytest.approx(0, abs=1e-20)


def test_linear_against_normal_equations():
    pts = [(0.5, 1.3), (1.7, 2.9), (3.1, 2.2), (4.4, 6.8), (9.0, 7.7)]
    fit = linear_fit(pts)
    b, m = normal_equations([[1, x] for x, _ in pts], [y for _, y in pts])
    assert fit.slope == pytest.approx(m, abs=1e-9)
    assert fit.intercept == pytest.approx(b, abs=1e-9)


def test_linear_p_value_against_scipy():
    from scipy import stats
    pts = [(0.5, 1.3), (1.7, 2.9), (3.1, 2.2), (4.4, 6.8), (9.0, 7.7)]
    ref = stats.linregress(*zip(*pts))
    fit = linear_fit(pts)
    assert fit.p_value == pytest.approx(ref.pvalue, rel=1e-9)
    assert fit.r_squared == pytest.approx(ref.rvalue**2, rel=1e-12)


def test_linear_rejects_degenerate():
    with pytest.raises(FitError):
        linear_fit([(1, 2), (2, 3)])
    with pytest.raises(FitError):
        linear_fit([(1, 2), (1, 3), (1, 4)])


def test_quadratic_exact():
    xs = [1, 2, 5, 10, 100]
    fit = quadratic_fit_lnx([(x, math.log(x) ** 2) for x in xs])
    assert np.allclose(fit.coefficients, (1, 0, 0), atol=1e-10)
    assert fit.sse == pytest.approx(0, abs=1e-18)


def test_quadratic_against_normal_equations():
    rng = np.random.default_rng(5)
    xs = np.sort(rng.uniform(1, 1e6, 6))
    ys = rng.normal(0, 10, 6)
    fit = quadratic_fit_lnx(list(zip(xs, ys)))
    want = normal_equations([[math.log(x) ** 2, math.log(x), 1] for x in xs], ys)
    assert np.allclose(fit.coefficients, want, atol=1e-9, rtol=0)


def test_quadratic_on_published_z_scores():
    fit = quadratic_fit_lnx(list(zip(published.SIZES, published.Z_PRIMES)))
    for got, want in zip(fit.coefficients, published.QUAD_COEFFS):
        assert got == pytest.approx(want, rel=0.05)
    assert abs(fit.sse - published.QUAD_SSE) < 2
    assert fit.predict(1e6) == pytest.approx(43.03, rel=0.05)


def test_quadratic_rejects_degenerate():
    with pytest.raises(FitError):
        quadratic_fit_lnx([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(FitError):
        quadratic_fit_lnx([(1, 1), (2, 2), (2, 3), (4, 4)])
    with pytest.raises(FitError):
        quadratic_fit_lnx([(0, 1), (2, 2), (3, 3), (4, 4)])
