"""Input validation helpers shared by the estimators and functional API.

Mirrors the sklearn check_* idiom: coerce to a well-typed ndarray, fail
loudly with a domain exception otherwise.
"""

from __future__ import annotations

import numpy as np

from .exceptions import EmptySeries, SeriesTooShort


def check_returns(y, min_len: int = 2, name: str = "returns") -> np.ndarray:
    """Coerce a return series (array-like or ReturnSeries) to 1-D float64.

    Raises EmptySeries for length-0 input, SeriesTooShort below min_len,
    and ValueError for non-finite entries.
    """
    values = getattr(y, "returns", y)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise EmptySeries(f"{name} is empty")
    if arr.size < min_len:
        raise SeriesTooShort(f"{name} has {arr.size} observations, need >= {min_len}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_in_open_interval(value: float, lo: float, hi: float, name: str) -> float:
    value = float(value)
    if not (lo < value < hi):
        raise ValueError(f"{name} must lie in ({lo}, {hi}), got {value}")
    return value


def check_int_at_least(value: int, lo: int, name: str) -> int:
    ivalue = int(value)
    if ivalue != value or ivalue < lo:
        raise ValueError(f"{name} must be an integer >= {lo}, got {value}")
    return ivalue
