"""The k-core threshold constant: the root above k of x P(Poisson(x) <= k-1) = 1/e."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._validation import NumericalError, ParameterError, check_int

INV_E = math.exp(-1.0)


def poisson_cdf(x, m):
    """P(Poisson(x) <= m) by the recurrence term_{i+1} = term_i * x / (i + 1).

    When m >= x the sum is close to 1 and is formed as 1 minus the upper
    tail, whose terms shrink geometrically; this keeps the result monotone
    in x and m where the direct sum would wobble in the last bit.  For rates
    where e^-x underflows the recurrence starts from the largest needed term,
    evaluated in log space, and runs away from it.
    """
    if not x > 0:
        raise ParameterError(f"rate must be positive, got {x}")
    m = check_int(m, "m", minimum=0)
    if x >= _EXP_SAFE:
        return _poisson_cdf_large(x, m)
    term = math.exp(-x)
    total = term
    for i in range(m):
        term *= x / (i + 1)
        total += term
    if m < x:
        return min(total, 1.0)
    return _one_minus_tail(term, x, m)


_EXP_SAFE = 700.0


def _log_pmf(x, i):
    return i * math.log(x) - x - math.lgamma(i + 1)


def _one_minus_tail(term_m, x, m):
    tail = 0.0
    term = term_m
    i = m
    while True:
        term *= x / (i + 1)
        i += 1
        if term <= tail * 1e-17 or term == 0.0:
            break
        tail += term
    return min(max(1.0 - tail, 0.0), 1.0)


def _poisson_cdf_large(x, m):
    if m >= x:
        return _one_minus_tail(math.exp(_log_pmf(x, m)), x, m)
    term = math.exp(_log_pmf(x, m))
    total = term
    for i in range(m, 0, -1):
        term *= i / x
        if term <= total * 1e-17:
            break
        total += term
    return min(total, 1.0)


def f_k(x, k):
    """x * P(Poisson(x) <= k - 1); strictly decreasing for x > k."""
    k = check_int(k, "k", minimum=1)
    return x * poisson_cdf(x, k - 1)


def asymptotic_c_hat(k):
    k = check_int(k, "k", minimum=2)
    return k + math.sqrt(2.0 * k * math.log(k))


@dataclass(frozen=True)
class ThresholdResult:
    k: int
    c_hat: float
    residual: float
    iterations: int
    asymptotic: float

    def to_dict(self):
        return asdict(self)


def solve_c_hat(k, tol=1e-12):
    """Bisection for the unique root of f_k(x) = 1/e on (k, inf).

    The upper end doubles from k + 1 until f drops below 1/e.
    """
    k = check_int(k, "k", minimum=2)
    if not tol > 0:
        raise ParameterError("tol must be positive")
    lo = float(k)
    hi = float(k + 1)
    while f_k(hi, k) >= INV_E:
        lo = hi
        hi *= 2.0
        if hi > 1e6 * k:
            raise NumericalError(f"no sign change for k={k} below {hi}")
    if f_k(float(k), k) <= INV_E:
        raise NumericalError(f"f_k(k) <= 1/e for k={k}; no root above k")
    it = 0
    while hi - lo >= tol and it < 500:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f_k(mid, k) > INV_E:
            lo = mid
        else:
            hi = mid
        it += 1
    c = 0.5 * (lo + hi)
    return ThresholdResult(k=k, c_hat=c, residual=abs(f_k(c, k) - INV_E),
                           iterations=it, asymptotic=asymptotic_c_hat(k))
