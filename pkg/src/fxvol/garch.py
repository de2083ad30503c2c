"""sklearn-style estimator facade over the GARCH-family MLE machinery."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .distributions import NORMAL
from .estimation import CONSTANT_MEAN, OptimizerConfig, fit
from .forecasting import horizon_vol, variance_path_forecast
from .recursions import GARCH, GarchSpec, variance_filter


class GarchModel(BaseEstimator):
    """Conditional-volatility model with maximum-likelihood fitting.

    Parameters mirror GarchSpec plus the optimizer knobs; fitted state lands
    in trailing-underscore attributes so the estimator composes with
    sklearn-style tooling (get_params/set_params/clone).

    Examples
    --------
    >>> model = GarchModel(family="gjr", p=1, o=1, q=1, dist="t")
    >>> model.fit(returns).forecast_vol(horizon=20)  # doctest: +SKIP
    """

    def __init__(self, family: str = GARCH, p: int = 1, o: int = 0, q: int = 1,
                 dist: str = NORMAL, mean: str = CONSTANT_MEAN,
                 max_iterations: int = 1000, tolerance: float = 1e-8,
                 restarts: int = 1, seed: int = 0, min_obs: int = 50):
        self.family = family
        self.p = p
        self.o = o
        self.q = q
        self.dist = dist
        self.mean = mean
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.restarts = restarts
        self.seed = seed
        self.min_obs = min_obs

    def _spec(self) -> GarchSpec:
        return GarchSpec(family=self.family, p=self.p, o=self.o, q=self.q,
                         distribution=self.dist)

    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(max_iterations=self.max_iterations,
                               tolerance=self.tolerance,
                               restarts=self.restarts, seed=self.seed)

    def fit(self, y, X=None):
        """Fit to a 1-D return series (array-like or ReturnSeries)."""
        spec = self._spec()
        result = fit(spec, y, self._config(), mean=self.mean, min_obs=self.min_obs)
        self.result_ = result
        self.params_ = result.params
        self.loglik_ = result.loglik
        self.aic_ = result.aic
        self.bic_ = result.bic
        self.std_errors_ = result.std_errors
        self.t_stats_ = result.t_stats
        self.converged_ = result.converged
        self.n_obs_ = result.n_obs
        self.innovations_ = variance_filter(spec, result.params, y)
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise NotFittedError("GarchModel must be fitted first")

    def conditional_volatility(self) -> np.ndarray:
        """In-sample conditional daily vol (%), one value per observation."""
        self._check_fitted()
        return np.sqrt(self.innovations_.variances)

    def forecast_variance(self, horizon: int = 20, n_paths: int = 1000,
                          seed: int | None = None) -> np.ndarray:
        """E[sigma^2] path for h = 1..horizon from the end of the fit sample."""
        self._check_fitted()
        return variance_path_forecast(self._spec(), self.params_, self.innovations_,
                                      horizon, n_paths=n_paths,
                                      seed=self.seed if seed is None else seed)

    def forecast_vol(self, horizon: int = 20, n_paths: int = 1000,
                     seed: int | None = None) -> float:
        """h-day-ahead volatility forecast comparable to the h-day proxy."""
        path = self.forecast_variance(horizon, n_paths=n_paths, seed=seed)
        return horizon_vol(path, horizon)
