"""Mean/SD, Student's t CDF, paired t-test, and proportions.

The t CDF goes through the regularized incomplete beta function rather
than a statistics dependency: for T ~ t(df),

    P(|T| > t) = I_x(df/2, 1/2)  with  x = df / (df + t^2)

which is exactly the two-sided p-value a paired t-test needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .._kernels import betainc
from .errors import InvalidCounts, LengthMismatch, TooFewSamples, ZeroVariance


def mean_sd(xs):
    """Sample mean and standard deviation (n-1 denominator)."""
    xs = list(xs)
    n = len(xs)
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples for a sd, got {n}")
    m = math.fsum(xs) / n
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return m, math.sqrt(var)


def student_t_two_sided(t: float, df: int) -> float:
    """P(|T| >= |t|) for T ~ Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return betainc(df / 2.0, 0.5, x)


def student_t_cdf(t: float, df: int) -> float:
    half_tail = 0.5 * student_t_two_sided(t, df)
    return 1.0 - half_tail if t > 0 else half_tail


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: int
    p_two_sided: float
    mean_diff: float
    sd_diff: float
    n: int


def paired_t_test(a, b) -> TTestResult:
    """Two-sided paired t-test of mean(a - b) == 0.

    Raises LengthMismatch for unequal samples, TooFewSamples below n=2,
    and ZeroVariance when every pair differs by the same amount (the t
    statistic is undefined there, including the a == b case).
    """
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise LengthMismatch(f"paired samples differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise TooFewSamples(f"paired t-test needs n >= 2, got {n}")
    d = [x - y for x, y in zip(a, b)]
    mean_d, sd_d = mean_sd(d)
    if sd_d == 0.0:
        raise ZeroVariance("all pairwise differences are equal")
    t = mean_d / (sd_d / math.sqrt(n))
    df = n - 1
    return TTestResult(
        t_stat=t,
        df=df,
        p_two_sided=student_t_two_sided(t, df),
        mean_diff=mean_d,
        sd_diff=sd_d,
        n=n,
    )


def proportion(count: int, total: int) -> float:
    """Percentage 100*count/total with count in [0, total], total > 0."""
    if total <= 0:
        raise InvalidCounts(f"total must be positive, got {total}")
    if not 0 <= count <= total:
        raise InvalidCounts(f"count {count} outside [0, {total}]")
    return 100.0 * count / total
