"""Exponentially weighted moving-average variance and its flat forecast."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .validation import check_in_open_interval, check_returns

INIT_FIRST = "first"
INIT_MEAN = "mean"


@dataclass(frozen=True)
class EwmaConfig:
    """Decay weight and initial-variance policy.

    init=INIT_FIRST seeds with the first squared return; INIT_MEAN with the
    mean of the first init_window squared returns (or all, if fewer).
    """

    lam: float = 0.97
    init: str = INIT_MEAN
    init_window: int = 20

    def __post_init__(self):
        check_in_open_interval(self.lam, 0.0, 1.0, "lambda")
        if self.init not in (INIT_FIRST, INIT_MEAN):
            raise ValueError(f"unknown init policy {self.init!r}")
        if self.init_window < 1:
            raise ValueError("init_window must be >= 1")


@dataclass(frozen=True)
class EwmaState:
    variance: float
    last_date: dt.date | None = None

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be non-negative")


def initial_variance(y: np.ndarray, config: EwmaConfig) -> float:
    if config.init == INIT_FIRST:
        return float(y[0] ** 2)
    head = y[: config.init_window]
    return float(np.mean(head * head))


def ewma_filter(returns, config: EwmaConfig | None = None) -> np.ndarray:
    """Conditional-variance path of length n+1.

    out[t] = lam*out[t-1] + (1-lam)*r[t-1]^2, so out[t] is the variance for
    day t given information through day t-1; out[0] is the seed.
    """
    config = config or EwmaConfig()
    y = check_returns(returns)
    out = np.empty(y.size + 1)
    out[0] = initial_variance(y, config)
    lam = config.lam
    for t in range(1, y.size + 1):
        out[t] = lam * out[t - 1] + (1.0 - lam) * y[t - 1] ** 2
    return out


def ewma_forecast(state: EwmaState, horizon: int = 20) -> float:
    """Flat multi-step forecast: daily vol = sqrt(current variance), for any
    horizon (directly comparable to the w-day sample-std proxy)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return float(np.sqrt(state.variance))


class EwmaVariance(BaseEstimator):
    """EWMA variance model in the estimator idiom.

    Fitting runs the filter; forecasting is flat at the last filtered
    variance, expressed as daily vol in %.
    """

    def __init__(self, lam: float = 0.97, init: str = INIT_MEAN, init_window: int = 20):
        self.lam = lam
        self.init = init
        self.init_window = init_window

    def _config(self) -> EwmaConfig:
        return EwmaConfig(lam=self.lam, init=self.init, init_window=self.init_window)

    def fit(self, y, dates=None):
        path = ewma_filter(y, self._config())
        self.variance_path_ = path
        last_date = None
        series_dates = getattr(y, "dates", None) if dates is None else dates
        if series_dates is not None and len(series_dates):
            last_date = series_dates[-1]
        self.state_ = EwmaState(variance=float(path[-1]), last_date=last_date)
        return self

    def forecast(self, horizon: int = 20) -> float:
        if not hasattr(self, "state_"):
            raise NotFittedError("EwmaVariance must be fitted before forecasting")
        return ewma_forecast(self.state_, horizon)
