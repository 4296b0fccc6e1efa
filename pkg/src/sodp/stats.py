"""Binomial moments, Z-scores, Chebyshev bounds, binomial tails, least squares."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as _sps


@dataclass(frozen=True)
class TrialSummary:
    sample_size: int
    trials: int
    avg_even: float
    expectation: float
    std_dev: float
    z_score: float
    z_signed: float
    chebyshev_bound: float


def chebyshev_bound(z: float) -> float:
    """Upper bound min(1, 1/z**2) on P(|X - mu| >= z sigma)."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    if z <= 1.0:
        return 1.0
    return 1.0 / (z * z)


def summarize_trials(even_counts, s: int) -> TrialSummary:
    counts = np.asarray(even_counts, dtype=np.int64)
    if counts.ndim != 1 or counts.size == 0:
        raise ValueError("need at least one trial")
    if s < 1:
        raise ValueError("sample size must be positive")
    if counts.min() < 0 or counts.max() > s:
        raise ValueError(f"even counts must lie in [0, {s}]")
    t = int(counts.size)
    avg = int(counts.sum()) / t
    expectation = s / 2
    std = math.sqrt(s / (4 * t))
    z_signed = (avg - expectation) / std
    z = abs(z_signed)
    return TrialSummary(s, t, avg, expectation, std, z, z_signed, chebyshev_bound(z))


# --- binomial distribution ----------------------------------------------------
# Loader's saddle-point pmf plus the incomplete-beta continued fraction,
# evaluated on whichever tail is smaller so tiny tails keep full relative
# precision.

_LN_SQRT_2PI = 0.5 * math.log(2 * math.pi)
_S0, _S1, _S2, _S3, _S4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188


def _stirlerr(n: float) -> float:
    """log(n!) - log(sqrt(2 pi n) (n/e)**n)."""
    if n <= 15:
        return math.lgamma(n + 1) - (n + 0.5) * math.log(n) + n - _LN_SQRT_2PI
    nn = n * n
    if n > 500:
        return (_S0 - _S1 / nn) / n
    if n > 80:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


def _bd0(x: float, mu: float) -> float:
    """x log(x/mu) + mu - x without cancellation near x = mu."""
    if abs(x - mu) < 0.1 * (x + mu):
        v = (x - mu) / (x + mu)
        s = (x - mu) * v
        ej = 2 * x * v
        v *= v
        j = 1
        while True:
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / mu) + mu - x


def binomial_logpmf(k: int, n: int, p: float) -> float:
    q = 1.0 - p
    if k < 0 or k > n:
        return -math.inf
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if q == 0.0:
        return 0.0 if k == n else -math.inf
    if k == 0:
        return n * math.log1p(-p)
    if k == n:
        return n * math.log(p)
    lc = _stirlerr(n) - _stirlerr(k) - _stirlerr(n - k) - _bd0(k, n * p) - _bd0(n - k, n * q)
    lf = 2 * _LN_SQRT_2PI + math.log(k) + math.log1p(-k / n)
    return lc - 0.5 * lf


def _betacf(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    max_iter = 200 + int(20 * math.sqrt(max(a, b)))
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError(f"incomplete beta fraction did not converge (a={a}, b={b}, x={x})")


def _tails(k: int, n: int, p: float) -> tuple[float, float]:
    """(P[X <= k], P[X > k]) for 0 <= k < n and 0 < p < 1."""
    q = 1.0 - p
    # I_q(n-k, k+1) converges fast when q < (n-k+1)/(n+3)
    if q * (n + 3) < n - k + 1:
        lower = math.exp(binomial_logpmf(k, n, p)) * p * _betacf(n - k, k + 1, q)
        return lower, 1.0 - lower
    upper = math.exp(binomial_logpmf(k + 1, n, p)) * q * _betacf(k + 1, n - k, p)
    return 1.0 - upper, upper


def _check_binom(n: int, p: float) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")


def binomial_cdf(k: int, n: int, p: float) -> float:
    """P[X <= k] for X ~ Binomial(n, p)."""
    _check_binom(n, p)
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    return _tails(int(k), int(n), float(p))[0]


def binomial_sf(k: int, n: int, p: float) -> float:
    """P[X > k]; accurate deep into the upper tail where 1 - cdf underflows."""
    _check_binom(n, p)
    if k < 0:
        return 1.0
    if k >= n:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return _tails(int(k), int(n), float(p))[1]


# --- least squares -------------------------------------------------------------

class FitKind(enum.Enum):
    LINEAR = "linear"
    QUADRATIC_LN = "quadratic_ln"


@dataclass(frozen=True)
class FitResult:
    """``coefficients`` are (c2, c1, c0) with c2 = 0 for a line; the model is
    c2 u**2 + c1 u + c0 where u = x (linear) or u = ln x."""

    kind: FitKind
    coefficients: tuple
    sse: float
    n_points: int
    r_squared: Optional[float] = None
    p_value: Optional[float] = None

    @property
    def slope(self) -> float:
        return self.coefficients[1]

    @property
    def intercept(self) -> float:
        return self.coefficients[2]

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        u = np.log(x) if self.kind is FitKind.QUADRATIC_LN else x
        c2, c1, c0 = self.coefficients
        return (c2 * u + c1) * u + c0


class FitError(ValueError):
    pass


def _xy(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FitError("points must be a sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def linear_fit(points: Sequence) -> FitResult:
    """Ordinary least squares line with r**2 and a two-sided slope t-test."""
    x, y = _xy(points)
    n = x.size
    if n < 3:
        raise FitError(f"linear fit needs at least 3 points, got {n}")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise FitError("x values are all equal")
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    sse = float(resid @ resid)
    syy = float(dy @ dy)
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    dof = n - 2
    if sse == 0.0:
        p = 0.0 if slope != 0.0 else 1.0
    else:
        se = math.sqrt(sse / dof / sxx)
        p = float(2 * _sps.t.sf(abs(slope) / se, dof))
    return FitResult(FitKind.LINEAR, (0.0, slope, float(intercept)), sse, n, r2, p)


def quadratic_fit_lnx(points: Sequence) -> FitResult:
    """Least squares over the basis {ln(x)**2, ln(x), 1}."""
    x, y = _xy(points)
    n = x.size
    if n < 4:
        raise FitError(f"quadratic fit needs at least 4 points, got {n}")
    if np.any(x <= 0):
        raise FitError("x values must be positive")
    if np.unique(x).size != n:
        raise FitError("x values must be distinct")
    u = np.log(x)
    design = np.column_stack([u * u, u, np.ones_like(u)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise FitError("degenerate design matrix")
    resid = y - design @ coef
    sse = float(resid @ resid)
    return FitResult(FitKind.QUADRATIC_LN, tuple(float(c) for c in coef), sse, n)
