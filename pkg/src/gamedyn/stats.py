"""Exact binomial confidence intervals and standard errors.

Proportions get Clopper-Pearson intervals (default confidence 0.995);
continuous metrics get mean and standard error for +-2 SE bands.  The
incomplete beta function is evaluated here with the standard continued
fraction so the package has no runtime dependency beyond numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

DEFAULT_CONFIDENCE = 0.995


@dataclass(frozen=True)
class IntervalEstimate:
    point: float
    lo: float
    hi: float
    confidence: float


@dataclass(frozen=True)
class SummaryStat:
    """Mean with its standard error; single_sample marks count == 1, where
    the spread is unknown and se is reported as 0."""

    mean: float
    se: float
    count: int
    single_sample: bool = False


def _betacf(x: float, a: float, b: float) -> float:
    # Lentz's algorithm for the continued fraction of I_x(a,b)
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for k in range(1, 400):
        k2 = 2 * k
        aa = k * (b - k) * x / ((qam + k2) * (a + k2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + k) * (qab + k) * x / ((a + k2) * (qap + k2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            return h
    raise ArithmeticError("incomplete beta continued fraction stalled")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b), absolute error below 1e-10."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be positive")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                     + a * math.log(x) + b * math.log1p(-x))
    # the continued fraction converges fast only below the mean; mirror
    # with I_x(a,b) = 1 - I_{1-x}(b,a) otherwise
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(1.0 - x, b, a) / b


def _beta_quantile(p: float, a: float, b: float) -> float:
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if reg_inc_beta(mid, a, b) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    return 0.5 * (lo + hi)


def clopper_pearson(successes: int, trials: int,
                    confidence: float = DEFAULT_CONFIDENCE) -> IntervalEstimate:
    """Exact binomial confidence interval for a proportion."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    alpha = 1.0 - confidence
    k, s = successes, trials
    lo = 0.0 if k == 0 else _beta_quantile(alpha / 2.0, k, s - k + 1)
    hi = 1.0 if k == s else _beta_quantile(1.0 - alpha / 2.0, k + 1, s - k)
    return IntervalEstimate(point=k / s, lo=lo, hi=hi, confidence=confidence)


def mean_and_se(samples: Sequence[float]) -> SummaryStat:
    """Mean and standard error (unbiased sample stddev / sqrt(count))."""
    count = len(samples)
    if count == 0:
        raise ValueError("need at least one sample")
    mean = math.fsum(samples) / count
    if count == 1:
        return SummaryStat(mean=mean, se=0.0, count=1, single_sample=True)
    var = math.fsum((v - mean) ** 2 for v in samples) / (count - 1)
    return SummaryStat(mean=mean, se=math.sqrt(var / count), count=count)
