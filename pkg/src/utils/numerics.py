"""Compensated reductions used by estimators and the harness.

Long sums (up to 10^7 terms) go through ``math.fsum`` or a Neumaier running
sum so that results do not depend on summation order.
"""

import math
from typing import Iterable, Optional, Sequence

import numpy as np
import numpy.typing as npt


FloatArray = npt.NDArray[np.float64]


def exact_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum of ``values``."""
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)


def exact_mean(values: Sequence[float]) -> float:
    """Mean computed from a correctly rounded sum."""
    n = len(values)
    if n == 0:
        raise ValueError("mean of empty sequence")
    return exact_sum(values) / n


def sample_covariance(x: Sequence[float], y: Sequence[float]) -> float:
    """Unbiased (n-1) sample covariance with compensated reductions."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape:
        raise ValueError("x and y must have the same shape")
    n = xa.size
    if n < 2:
        raise ValueError("covariance needs at least two samples")
    dx = xa - exact_mean(xa)
    dy = ya - exact_mean(ya)
    return exact_sum(dx * dy) / (n - 1)


def sample_variance(x: Sequence[float]) -> float:
    """Unbiased (n-1) sample variance."""
    return sample_covariance(x, x)


def sliding_window_sums(values: Sequence[float], window: int) -> FloatArray:
    """Sums of every run of ``window`` consecutive values.

    Returns an array of length ``len(values) - window + 1`` whose j-th entry is
    ``values[j] + ... + values[j + window - 1]``. The window slides in O(n)
    with a Neumaier-compensated accumulator.
    """
    if window < 1:
        raise ValueError("window must be positive")
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if window > n:
        raise ValueError("window longer than series")
    if window == 1:
        return x.copy()

    xs = x.tolist()
    out = np.empty(n - window + 1, dtype=np.float64)
    s = 0.0
    c = 0.0
    for v in xs[:window]:
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    out[0] = s + c

    for j in range(1, n - window + 1):
        v = xs[j + window - 1]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        v = -xs[j - 1]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[j] = s + c
    return out


def sample_std(values: Sequence[float]) -> Optional[float]:
    """Sample standard deviation, or None for fewer than two values."""
    if len(values) < 2:
        return None
    return math.sqrt(sample_variance(values))
