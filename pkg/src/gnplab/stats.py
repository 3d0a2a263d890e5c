"""Moment statistics, Kolmogorov-Smirnov distance and small fitting helpers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import ndtr

from ._validation import DegenerateInputError, check_samples


class RunningMoments:
    """One-pass mean and central moments up to order four.

    Uses the pairwise-update recurrences (Welford / Terriberry), so a long
    stream of trial values can be summarised without keeping it in memory.
    """

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.m3 = 0.0
        self.m4 = 0.0

    def push(self, x):
        n1 = self.count
        self.count += 1
        n = self.count
        delta = float(x) - self.mean
        dn = delta / n
        dn2 = dn * dn
        term1 = delta * dn * n1
        self.mean += dn
        self.m4 += term1 * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * self.m2 - 4 * dn * self.m3
        self.m3 += term1 * dn * (n - 2) - 3 * dn * self.m2
        self.m2 += term1
        return self

    def extend(self, xs):
        for x in xs:
            self.push(x)
        return self

    @property
    def variance(self):
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def skewness(self):
        if self.m2 == 0:
            return 0.0
        return math.sqrt(self.count) * self.m3 / self.m2 ** 1.5

    @property
    def excess_kurtosis(self):
        if self.m2 == 0:
            return 0.0
        return self.count * self.m4 / (self.m2 * self.m2) - 3.0


def standardize(x):
    """(x - mean) / sd with the sample (ddof=1) standard deviation."""
    x = check_samples(x, 2)
    sd = x.std(ddof=1)
    if sd == 0:
        raise DegenerateInputError("samples have zero variance")
    return (x - x.mean()) / sd


def ks_distance(x, cdf=ndtr):
    """Exact one-sample sup |F_n - F| for a continuous reference CDF."""
    x = np.sort(check_samples(x, 1))
    n = x.size
    f = cdf(x)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max(), 0.0))


@dataclass(frozen=True)
class NormalityReport:
    count: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    ks_distance: float

    def to_dict(self):
        return asdict(self)


def normality(samples, min_count=100):
    """Moment and KS summary of samples standardised by their own mean and sd.

    Skewness and kurtosis are the plain moment ratios m3/m2^1.5 and
    m4/m2^2 - 3.
    """
    x = check_samples(samples, min_count)
    z = standardize(x)
    c = z - z.mean()
    m2 = np.mean(c ** 2)
    return NormalityReport(
        count=int(x.size),
        mean=float(x.mean()),
        variance=float(x.var(ddof=1)),
        skewness=float(np.mean(c ** 3) / m2 ** 1.5),
        excess_kurtosis=float(np.mean(c ** 4) / m2 ** 2 - 3.0),
        ks_distance=ks_distance(z),
    )


def variance_standard_error(x):
    """Large-sample standard error of the ddof=1 sample variance."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        return float("inf")
    c = x - x.mean()
    s2 = c.var(ddof=1)
    mu4 = np.mean(c ** 4)
    v = (mu4 - s2 * s2 * (n - 3) / (n - 1)) / n
    return float(math.sqrt(max(v, 0.0)))


@dataclass(frozen=True)
class DecayFit:
    base: float
    intercept: float
    jmin: int
    jmax: int
    points: int

    def to_dict(self):
        return asdict(self)


def fit_geometric_decay(freq, jmin=3, jmax=30):
    """Least-squares fit of log freq[j] = a + j log(base) over jmin..jmax.

    ``freq`` maps size -> count.  Each point is weighted by its count (the
    inverse variance of a Poisson log-count); empty sizes are skipped.
    """
    js = np.array([j for j in range(jmin, jmax + 1) if freq.get(j, 0) > 0], dtype=float)
    if js.size < 2:
        return DecayFit(float("nan"), float("nan"), jmin, jmax, int(js.size))
    cnt = np.array([freq[int(j)] for j in js], dtype=float)
    A = np.column_stack([np.ones_like(js), js])
    w = np.sqrt(cnt)
    coef, *_ = np.linalg.lstsq(A * w[:, None], np.log(cnt) * w, rcond=None)
    return DecayFit(base=float(math.exp(coef[1])), intercept=float(coef[0]),
                    jmin=jmin, jmax=jmax, points=int(js.size))
