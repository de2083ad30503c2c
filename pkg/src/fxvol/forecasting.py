"""Multi-step variance forecasts and rolling/expanding backtests.

GARCH and GJR paths iterate the analytic expectation recursion; EGARCH and
TGARCH have no implemented closed form and use seeded antithetic Monte
Carlo. Backtests step through out-of-sample forecast origins, refit, and
pair each aggregated h-day forecast with the realized h-day proxy.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import expected_abs_innovation, sample_standardized
from .estimation import CONSTANT_MEAN, FitResult, OptimizerConfig, fit
from .ewma import EwmaConfig, ewma_filter
from .exceptions import (
    InvalidState,
    NoValidOrigins,
    OptimizationFailed,
    SeriesTooShort,
)
from .marketdata import ReturnSeries, SampleSplit, realized_vol
from .recursions import (
    EGARCH,
    GARCH,
    GJR,
    TGARCH,
    VARIANCE_FLOOR,
    GarchParams,
    GarchSpec,
    Innovations,
    variance_filter,
    _LN_CAP,
    _LN_FLOOR,
)

ROLLING = "rolling"
EXPANDING = "expanding"


@dataclass(frozen=True)
class ForecastMethod:
    mode: str = ROLLING
    window: int = 200
    horizon: int = 20
    refit_every: int = 1

    def __post_init__(self):
        if self.mode not in (ROLLING, EXPANDING):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == ROLLING and self.window < 50:
            raise ValueError("rolling window must be >= 50")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")


@dataclass(frozen=True)
class ForecastSeries:
    """Aligned (forecast, realized-proxy) pairs keyed by forecast origin date."""

    dates: tuple[dt.date, ...]
    predicted: np.ndarray
    realized: np.ndarray
    model_label: str
    method_label: str = ""
    skipped: tuple[tuple[dt.date, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predicted", np.asarray(self.predicted, dtype=np.float64))
        object.__setattr__(self, "realized", np.asarray(self.realized, dtype=np.float64))
        if not (len(self.dates) == self.predicted.size == self.realized.size):
            raise ValueError("dates, predicted, realized must have equal length")
        if self.predicted.size and (np.any(self.predicted < 0) or np.any(self.realized < 0)):
            raise ValueError("predicted and realized must be non-negative")

    def __len__(self) -> int:
        return self.predicted.size

    @property
    def full_label(self) -> str:
        return f"{self.model_label}/{self.method_label}" if self.method_label else self.model_label


def write_forecast_csv(series: ForecastSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["origin_date", "model_label", "predicted", "realized"])
        for d, p, r in zip(series.dates, series.predicted, series.realized):
            writer.writerow([d.isoformat(), series.full_label, repr(float(p)), repr(float(r))])


def read_forecast_csv(path) -> ForecastSeries:
    dates, predicted, realized = [], [], []
    label = ""
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            dates.append(dt.date.fromisoformat(row["origin_date"]))
            label = row["model_label"]
            predicted.append(float(row["predicted"]))
            realized.append(float(row["realized"]))
    model, _, method = label.rpartition("/")
    if not model:
        model, method = label, ""
    return ForecastSeries(tuple(dates), np.array(predicted), np.array(realized),
                          model_label=model, method_label=method)


def variance_path_forecast(spec: GarchSpec, params: GarchParams, state: Innovations,
                           horizon: int, n_paths: int = 1000, seed: int = 0) -> np.ndarray:
    """E[sigma^2_{t+h}] for h = 1..horizon given the filtered state at t."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    m = max(spec.p, spec.q)
    if len(state.residuals) < m:
        raise InvalidState(f"need at least {m} trailing residuals/variances")
    if spec.family in (GARCH, GJR):
        return _analytic_path(spec, params, state, horizon)
    return _mc_path(spec, params, state, horizon, n_paths, seed)


def _analytic_path(spec, params, state, horizon):
    p, q = spec.p, spec.q
    eps = state.residuals
    var = state.variances
    gamma = np.zeros(p)
    if spec.o:
        gamma[: spec.o] = params.gamma
    path = np.empty(horizon)
    for h in range(1, horizon + 1):
        v = params.omega
        for i in range(1, p + 1):
            s = h - i
            if s <= 0:
                e = eps[s - 1]  # eps[-1] is the origin-time residual
                coef = params.alpha[i - 1] + (gamma[i - 1] if e < 0 else 0.0)
                v += coef * e * e
            else:
                v += (params.alpha[i - 1] + 0.5 * gamma[i - 1]) * path[s - 1]
        for j in range(1, q + 1):
            s = h - j
            v += params.beta[j - 1] * (var[s - 1] if s <= 0 else path[s - 1])
        path[h - 1] = max(v, VARIANCE_FLOOR)
    return path


def _mc_path(spec, params, state, horizon, n_paths, seed):
    n_paths = int(n_paths)
    if n_paths % 2:
        n_paths += 1
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    z = sample_standardized(spec.distribution, (n_paths, horizon), rng,
                            nu=params.nu, antithetic=True)
    p, q = spec.p, spec.q
    gamma = np.zeros(p)
    if spec.o:
        gamma[: spec.o] = params.gamma
    alpha, beta = params.alpha, params.beta
    path = np.empty(horizon)

    if spec.family == EGARCH:
        eabs = expected_abs_innovation(spec.distribution, params.nu)
        z_hist = [np.full(n_paths, state.standardized[-i]) for i in range(1, p + 1)]
        lns_hist = [np.full(n_paths, math.log(state.variances[-j])) for j in range(1, q + 1)]
        for h in range(horizon):
            v = np.full(n_paths, params.omega)
            for i in range(p):
                v += alpha[i] * (np.abs(z_hist[i]) - eabs) + gamma[i] * z_hist[i]
            for j in range(q):
                v += beta[j] * lns_hist[j]
            np.clip(v, _LN_FLOOR, _LN_CAP, out=v)
            sig2 = np.exp(v)
            path[h] = sig2.mean()
            if p:
                z_hist = [z[:, h]] + z_hist[:-1]
            if q:
                lns_hist = [v] + lns_hist[:-1]
        return path

    # TGARCH: recursion on sigma with simulated residuals
    sqrt_floor = math.sqrt(VARIANCE_FLOOR)
    eps_hist = [np.full(n_paths, state.residuals[-i]) for i in range(1, p + 1)]
    sig_hist = [np.full(n_paths, math.sqrt(state.variances[-j])) for j in range(1, q + 1)]
    for h in range(horizon):
        v = np.full(n_paths, params.omega)
        for i in range(p):
            e = eps_hist[i]
            v += alpha[i] * ((1.0 - gamma[i]) * np.maximum(e, 0.0)
                             - (1.0 + gamma[i]) * np.minimum(e, 0.0))
        for j in range(q):
            v += beta[j] * sig_hist[j]
        np.maximum(v, sqrt_floor, out=v)
        path[h] = np.mean(v * v)
        if p:
            eps_hist = [v * z[:, h]] + eps_hist[:-1]
        if q:
            sig_hist = [v] + sig_hist[:-1]
    return path


def horizon_vol(path: np.ndarray, horizon: int) -> float:
    """Average forward daily variance over the horizon, as daily vol in %."""
    path = np.asarray(path, dtype=np.float64)
    if path.size < horizon:
        raise ValueError(f"path has {path.size} steps, need >= {horizon}")
    return float(np.sqrt(np.mean(path[:horizon])))


def forecast_origins(n_returns: int, split_index: int, horizon: int,
                     refit_every: int = 1) -> list[int]:
    """Origin positions: out-of-sample indices whose full h-day future window
    stays inside the sample, stepped by refit_every."""
    last = n_returns - 1 - horizon
    return list(range(split_index, last + 1, refit_every))


def backtest(spec: GarchSpec, returns: ReturnSeries, split: SampleSplit,
             method: ForecastMethod, config: OptimizerConfig | None = None,
             mean: str = CONSTANT_MEAN, n_paths: int = 1000,
             min_obs: int = 50, warm_start: bool = True) -> ForecastSeries:
    """Out-of-sample h-day-ahead volatility forecasts for one model spec.

    Rolling mode fits the trailing `window` returns at each origin (warm
    starting from the previous optimum); expanding mode fits everything up
    to the origin from a cold start. Failed fits are skipped and recorded.
    """
    config = config or OptimizerConfig()
    horizon = method.horizon
    if len(split.out_of_sample) < horizon + 1:
        raise NoValidOrigins(
            f"out-of-sample length {len(split.out_of_sample)} < horizon + 1 = {horizon + 1}"
        )
    origins = forecast_origins(len(returns), split.split_index, horizon, method.refit_every)
    proxy = realized_vol(returns, horizon)

    dates, predicted, realized, skipped = [], [], [], []
    previous: GarchParams | None = None
    for k, t in enumerate(origins):
        if method.mode == ROLLING:
            start_idx = t + 1 - method.window
            if start_idx < 0:
                skipped.append((returns.dates[t], "insufficient history for rolling window"))
                continue
            window = returns.slice(start_idx, t + 1)
        else:
            window = returns.slice(0, t + 1)
        try:
            result = fit(spec, window, config, mean=mean,
                         start=previous if (warm_start and method.mode == ROLLING) else None,
                         min_obs=min_obs, std_errors=False)
        except (OptimizationFailed, SeriesTooShort) as exc:
            skipped.append((returns.dates[t], str(exc)))
            continue
        previous = result.params
        innov = variance_filter(spec, result.params, window)
        path = variance_path_forecast(spec, result.params, innov, horizon,
                                      n_paths=n_paths, seed=_origin_seed(config.seed, k))
        dates.append(returns.dates[t])
        predicted.append(horizon_vol(path, horizon))
        # proxy index t+1 is the window covering returns[t+1 .. t+horizon]
        realized.append(float(proxy.proxy[t + 1]))
    if not dates:
        raise NoValidOrigins(f"{spec.label}: every forecast origin failed to fit")
    return ForecastSeries(tuple(dates), np.array(predicted), np.array(realized),
                          model_label=spec.label, method_label=method.mode,
                          skipped=tuple(skipped))


def _origin_seed(base_seed: int, origin_index: int) -> int:
    return int(np.random.SeedSequence([base_seed, origin_index]).generate_state(1)[0])


def ewma_backtest(returns: ReturnSeries, split: SampleSplit, config: EwmaConfig,
                  horizon: int = 20, refit_every: int = 1) -> ForecastSeries:
    """EWMA flat forecast over the same origin grid as `backtest`."""
    if len(split.out_of_sample) < horizon + 1:
        raise NoValidOrigins(
            f"out-of-sample length {len(split.out_of_sample)} < horizon + 1 = {horizon + 1}"
        )
    origins = forecast_origins(len(returns), split.split_index, horizon, refit_every)
    proxy = realized_vol(returns, horizon)
    path = ewma_filter(returns, config)  # path[t+1] is the variance for day t+1
    dates, predicted, realized = [], [], []
    for t in origins:
        dates.append(returns.dates[t])
        predicted.append(math.sqrt(path[t + 1]))
        realized.append(float(proxy.proxy[t + 1]))
    return ForecastSeries(tuple(dates), np.array(predicted), np.array(realized),
                          model_label=f"EWMA({config.lam:g})", method_label=EXPANDING)
