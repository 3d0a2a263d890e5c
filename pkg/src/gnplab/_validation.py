"""Parameter checks shared by the public API and the estimators."""

import math
import numbers

import numpy as np


class ParameterError(ValueError):
    """Invalid argument to a laboratory routine."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or bracket its root."""


class DegenerateInputError(ValueError):
    """Input has no spread where a spread is required (e.g. zero variance)."""


def check_probability(p, name="p"):
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise ParameterError(f"{name} must lie in [0, 1], got {p}")
    return p


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_positive(value, name):
    value = float(value)
    if not value > 0 or math.isinf(value):
        raise ParameterError(f"{name} must be a finite positive number, got {value}")
    return value


def check_samples(x, min_count=1, name="samples"):
    """1-d finite float array with at least ``min_count`` entries."""
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size < min_count:
        raise ParameterError(f"{name} needs at least {min_count} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    return arr


def size_threshold(n):
    """ceil((ln n)^4): the cut between 'small' and 'large' components."""
    if n <= 1:
        return 0
    return int(math.ceil(math.log(n) ** 4))
