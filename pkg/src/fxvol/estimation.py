"""Maximum-likelihood fitting of the variance models.

Optimization runs in an unconstrained parameterization (log for the
positivity-constrained coefficients, atanh for the threshold asymmetry
weights, identity elsewhere) with a Nelder-Mead stage refined by BFGS.
Standard errors come from the inverse central-difference Hessian of the
negative log-likelihood in the natural parameterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .distributions import STUDENT_T, loglikelihood
from .exceptions import (
    InvalidParams,
    NonFiniteLikelihood,
    OptimizationFailed,
    SeriesTooShort,
)
from .recursions import (
    EGARCH,
    GARCH,
    GJR,
    TGARCH,
    GarchParams,
    GarchSpec,
    validate_params,
    variance_filter,
)
from .validation import check_returns

_BOUNDARY_NUDGE = 1e-8

CONSTANT_MEAN = "constant"
ZERO_MEAN = "zero"


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 1000
    tolerance: float = 1e-8
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class FitResult:
    spec: GarchSpec
    params: GarchParams
    loglik: float
    aic: float
    bic: float
    std_errors: np.ndarray
    t_stats: np.ndarray
    n_obs: int
    converged: bool
    iterations: int
    clamp_events: int
    param_names: tuple[str, ...]
    mean: str = CONSTANT_MEAN

    @property
    def k(self) -> int:
        return len(self.param_names)

    def coef(self, name: str) -> float:
        return float(pack_natural(self.spec, self.params, self.mean)[self.param_names.index(name)])

    def t_stat(self, name: str) -> float:
        return float(self.t_stats[self.param_names.index(name)])


def information_criteria(loglik: float, k: int, n: int) -> tuple[float, float]:
    """AIC = 2k - 2*loglik; BIC = k*ln(n) - 2*loglik."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    aic = 2.0 * k - 2.0 * loglik
    bic = k * math.log(n) - 2.0 * loglik
    return aic, bic


def param_names(spec: GarchSpec, mean: str = CONSTANT_MEAN) -> tuple[str, ...]:
    names = [] if mean == ZERO_MEAN else ["mu"]
    names.append("omega")
    names += [f"alpha[{i}]" for i in range(1, spec.p + 1)]
    names += [f"gamma[{i}]" for i in range(1, spec.o + 1)]
    names += [f"beta[{j}]" for j in range(1, spec.q + 1)]
    if spec.distribution == STUDENT_T:
        names.append("nu")
    return tuple(names)


def pack_natural(spec: GarchSpec, params: GarchParams, mean: str = CONSTANT_MEAN) -> np.ndarray:
    head = [] if mean == ZERO_MEAN else [params.mu]
    vec = np.concatenate([head, [params.omega], params.alpha, params.gamma, params.beta])
    if spec.distribution == STUDENT_T:
        vec = np.append(vec, params.nu)
    return vec


def unpack_natural(spec: GarchSpec, vec: np.ndarray, mean: str = CONSTANT_MEAN) -> GarchParams:
    vec = np.asarray(vec, dtype=np.float64)
    i = 0
    mu = 0.0
    if mean != ZERO_MEAN:
        mu, i = float(vec[0]), 1
    omega = float(vec[i])
    i += 1
    alpha = vec[i:i + spec.p]
    i += spec.p
    gamma = vec[i:i + spec.o]
    i += spec.o
    beta = vec[i:i + spec.q]
    i += spec.q
    nu = None
    if spec.distribution == STUDENT_T:
        nu = float(vec[i])
        i += 1
    if i != vec.size:
        raise InvalidParams(f"parameter vector has length {vec.size}, expected {i}")
    return GarchParams(mu=mu, omega=omega, alpha=alpha, gamma=gamma, beta=beta, nu=nu)


def _log_nudged(x: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(x, _BOUNDARY_NUDGE))


def transform_to_unconstrained(spec: GarchSpec, params: GarchParams,
                               mean: str = CONSTANT_MEAN) -> np.ndarray:
    """Map valid natural parameters to the optimizer's unconstrained space."""
    validate_params(spec, params)
    head = [] if mean == ZERO_MEAN else [params.mu]
    if spec.family == EGARCH:
        body = np.concatenate([[params.omega], params.alpha, params.gamma, params.beta])
    elif spec.family == GJR:
        body = np.concatenate([
            _log_nudged(np.array([params.omega])),
            _log_nudged(params.alpha),
            params.gamma,
            _log_nudged(params.beta),
        ])
    elif spec.family == TGARCH:
        g = np.clip(params.gamma, -1 + _BOUNDARY_NUDGE, 1 - _BOUNDARY_NUDGE)
        body = np.concatenate([
            _log_nudged(np.array([params.omega])),
            _log_nudged(params.alpha),
            np.arctanh(g),
            _log_nudged(params.beta),
        ])
    else:
        body = np.concatenate([
            _log_nudged(np.array([params.omega])),
            _log_nudged(params.alpha),
            _log_nudged(params.beta),
        ])
    vec = np.concatenate([head, body])
    if spec.distribution == STUDENT_T:
        vec = np.append(vec, math.log(max(params.nu - 2.0, _BOUNDARY_NUDGE)))
    return vec


def transform_from_unconstrained(spec: GarchSpec, vec: np.ndarray,
                                 mean: str = CONSTANT_MEAN) -> GarchParams:
    vec = np.asarray(vec, dtype=np.float64)
    i = 0
    mu = 0.0
    if mean != ZERO_MEAN:
        mu, i = float(vec[0]), 1
    raw_omega = vec[i]
    i += 1
    raw_alpha = vec[i:i + spec.p]
    i += spec.p
    raw_gamma = vec[i:i + spec.o]
    i += spec.o
    raw_beta = vec[i:i + spec.q]
    i += spec.q
    nu = None
    if spec.distribution == STUDENT_T:
        nu = 2.0 + math.exp(min(float(vec[i]), 500.0))
        i += 1
    if i != vec.size:
        raise InvalidParams(f"unconstrained vector has length {vec.size}, expected {i}")

    if spec.family == EGARCH:
        omega, alpha, gamma, beta = float(raw_omega), raw_alpha, raw_gamma, raw_beta
    elif spec.family == GJR:
        omega, alpha, gamma, beta = math.exp(raw_omega), np.exp(raw_alpha), raw_gamma, np.exp(raw_beta)
    elif spec.family == TGARCH:
        omega, alpha, gamma, beta = math.exp(raw_omega), np.exp(raw_alpha), np.tanh(raw_gamma), np.exp(raw_beta)
    else:
        omega, alpha, gamma, beta = math.exp(raw_omega), np.exp(raw_alpha), raw_gamma, np.exp(raw_beta)
    return GarchParams(mu=mu, omega=omega, alpha=alpha, gamma=gamma, beta=beta, nu=nu)


def default_start(spec: GarchSpec, y: np.ndarray, mean: str = CONSTANT_MEAN) -> GarchParams:
    """Deterministic initial point: sample-mean mu, variance-targeted omega,
    persistence split 0.05/0.85 with gamma 0.05 and nu 8."""
    mu = float(np.mean(y)) if mean != ZERO_MEAN else 0.0
    s2 = max(float(np.var(y - mu, ddof=1)), 1e-8)
    alpha = np.full(spec.p, 0.05 / spec.p)
    beta = np.full(spec.q, 0.85 / spec.q) if spec.q else np.empty(0)
    beta_total = 0.85 if spec.q else 0.0
    nu = 8.0 if spec.distribution == STUDENT_T else None

    if spec.family == EGARCH:
        alpha = np.full(spec.p, 0.10 / spec.p)
        gamma = np.zeros(spec.o)
        omega = (1.0 - beta_total) * math.log(s2)
    elif spec.family == GJR:
        gamma = np.full(spec.o, 0.05 / spec.o) if spec.o else np.empty(0)
        persistence = 0.05 + beta_total + 0.5 * (0.05 if spec.o else 0.0)
        omega = s2 * max(1.0 - persistence, 0.01)
    elif spec.family == TGARCH:
        gamma = np.zeros(spec.o)
        s = math.sqrt(s2)
        omega = s * max(1.0 - 0.05 * 0.8 - beta_total, 0.01)
    else:
        gamma = np.empty(0)
        omega = s2 * max(1.0 - 0.05 - beta_total, 0.01)
    return GarchParams(mu=mu, omega=omega, alpha=alpha, gamma=gamma, beta=beta, nu=nu)


def _negative_loglik(spec: GarchSpec, y: np.ndarray, mean: str):
    def nll(u: np.ndarray) -> float:
        try:
            params = transform_from_unconstrained(spec, u, mean)
            innov = variance_filter(spec, params, y)
            ll = loglikelihood(spec.distribution, innov.residuals, innov.variances, params.nu)
        except (InvalidParams, NonFiniteLikelihood, OverflowError):
            return np.inf
        return -ll

    return nll


def _optimize_one(nll, u0: np.ndarray, config: OptimizerConfig):
    """Nelder-Mead then BFGS; returns (u, fun, iterations, converged)."""
    f0 = nll(u0)
    if not np.isfinite(f0):
        return u0, np.inf, 0, False
    fatol = config.tolerance * max(1.0, abs(f0))
    nm = minimize(
        nll, u0, method="Nelder-Mead",
        options={"maxiter": config.max_iterations, "xatol": 1e-6, "fatol": fatol,
                 "adaptive": True},
    )
    u_best, f_best = (nm.x, float(nm.fun)) if np.isfinite(nm.fun) else (u0, f0)
    iterations = int(nm.nit)
    qn_success = False
    qn = minimize(nll, u_best, method="BFGS",
                  options={"gtol": 1e-5, "maxiter": 200})
    iterations += int(qn.nit)
    if np.isfinite(qn.fun) and qn.fun <= f_best:
        u_best, f_best = qn.x, float(qn.fun)
        qn_success = bool(qn.success)
    return u_best, f_best, iterations, qn_success


def _scaled_gradient(nll, u: np.ndarray) -> np.ndarray:
    """Central-difference gradient in the unconstrained space (which is the
    parameter-magnitude-scaled gradient for the log-transformed coords)."""
    g = np.empty(u.size)
    for i in range(u.size):
        h = 1e-5 * max(1.0, abs(u[i]))
        up, dn = u.copy(), u.copy()
        up[i] += h
        dn[i] -= h
        g[i] = (nll(up) - nll(dn)) / (2.0 * h)
    return g


def _hessian_std_errors(spec: GarchSpec, y: np.ndarray, theta: np.ndarray, mean: str):
    """Inverse central-difference Hessian of the negative log-likelihood at
    the optimum, in the natural parameterization."""
    names = param_names(spec, mean)
    k = theta.size

    def f(vec):
        try:
            params = unpack_natural(spec, vec, mean)
            innov = variance_filter(spec, params, y)
            return -loglikelihood(spec.distribution, innov.residuals, innov.variances, params.nu)
        except (InvalidParams, NonFiniteLikelihood, OverflowError):
            return np.nan

    steps = np.empty(k)
    for i, name in enumerate(names):
        h = 5e-4 * max(abs(theta[i]), 1e-2)
        if name in ("omega",) or name.startswith(("alpha", "beta")):
            if spec.family != EGARCH and theta[i] > 0:
                h = min(h, 0.49 * theta[i])
        elif name == "nu":
            h = min(h, 0.49 * (theta[i] - 2.0))
        elif name.startswith("gamma") and spec.family == TGARCH:
            h = min(h, 0.49 * (1.0 - abs(theta[i])))
        steps[i] = max(h, 1e-10)

    hess = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            hi, hj = steps[i], steps[j]
            pp, pm, mp, mm = theta.copy(), theta.copy(), theta.copy(), theta.copy()
            pp[i] += hi
            pp[j] += hj
            pm[i] += hi
            pm[j] -= hj
            mp[i] -= hi
            mp[j] += hj
            mm[i] -= hi
            mm[j] -= hj
            hess[i, j] = hess[j, i] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi * hj)

    se = np.full(k, np.nan)
    if np.all(np.isfinite(hess)):
        try:
            cov = np.linalg.inv(hess)
            diag = np.diag(cov)
            ok = diag > 0
            se[ok] = np.sqrt(diag[ok])
        except np.linalg.LinAlgError:
            pass
    return se


def fit(spec: GarchSpec, returns, config: OptimizerConfig | None = None,
        mean: str = CONSTANT_MEAN, start: GarchParams | None = None,
        min_obs: int = 50, std_errors: bool = True) -> FitResult:
    """Maximum-likelihood fit of `spec` to a return series.

    `start` warm-starts the search (used by the rolling backtest); when it
    is usable it is the only start, otherwise the deterministic default
    start plus `config.restarts` jittered starts are tried and the best
    final log-likelihood wins.
    """
    config = config or OptimizerConfig()
    y = check_returns(returns, min_len=max(min_obs, max(spec.p, spec.q) + 1))
    if y.size < min_obs:
        raise SeriesTooShort(f"need >= {min_obs} observations, have {y.size}")
    nll = _negative_loglik(spec, y, mean)

    starts: list[np.ndarray] = []
    if start is not None:
        try:
            u_warm = transform_to_unconstrained(spec, start, mean)
            if np.isfinite(nll(u_warm)):
                starts.append(u_warm)
        except InvalidParams:
            pass
    if not starts:
        u0 = transform_to_unconstrained(spec, default_start(spec, y, mean), mean)
        starts.append(u0)
        rng = np.random.default_rng(config.seed)
        for _ in range(config.restarts):
            starts.append(u0 + rng.normal(0.0, 0.2, size=u0.size))

    best = None
    total_iterations = 0
    for u0 in starts:
        u, fun, nit, qn_ok = _optimize_one(nll, u0, config)
        total_iterations += nit
        if np.isfinite(fun) and (best is None or fun < best[1]):
            best = (u, fun, qn_ok)
    if best is None:
        raise OptimizationFailed(
            f"{spec.label}: no start produced a finite likelihood on {y.size} observations"
        )

    u_opt, f_opt, qn_ok = best
    grad = _scaled_gradient(nll, u_opt)
    converged = bool(qn_ok or np.max(np.abs(grad)) < 1e-3)

    params = transform_from_unconstrained(spec, u_opt, mean)
    innov = variance_filter(spec, params, y)
    ll = -f_opt
    names = param_names(spec, mean)
    k = len(names)
    aic, bic = information_criteria(ll, k, y.size)

    theta = pack_natural(spec, params, mean)
    if std_errors:
        se = _hessian_std_errors(spec, y, theta, mean)
    else:
        se = np.full(k, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(se > 0, theta / se, np.nan)

    return FitResult(
        spec=spec, params=params, loglik=ll, aic=aic, bic=bic,
        std_errors=se, t_stats=t_stats, n_obs=int(y.size),
        converged=converged, iterations=total_iterations,
        clamp_events=innov.n_clamped, param_names=names, mean=mean,
    )
