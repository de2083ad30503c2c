"""Conditional-variance recursions for the GARCH family.

Four families share one convention set:

* the recursion runs for every observation t >= 0;
* lagged sigma-type terms with negative index use the backcast seed
  (sample variance of the residuals, or its log / square root);
* lagged residual terms with negative index are zero;
* variances are floored at VARIANCE_FLOOR before entering the likelihood,
  and floor/cap events are counted, not raised.

The inner loops are numba-compiled when numba is importable; the plain
Python definitions remain the fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DISTRIBUTIONS, NORMAL, STUDENT_T, expected_abs_innovation
from .exceptions import InvalidParams, NonStationary, SeriesTooShort
from .validation import check_returns

GARCH = "garch"
EGARCH = "egarch"
GJR = "gjr"
TGARCH = "tgarch"

FAMILIES = (GARCH, EGARCH, GJR, TGARCH)

VARIANCE_FLOOR = 1e-12  # in %^2 units
_LN_FLOOR = math.log(VARIANCE_FLOOR)
_LN_CAP = 700.0  # keeps exp() finite while the optimizer explores


@dataclass(frozen=True)
class GarchSpec:
    """Model family, lag orders, and innovation distribution.

    p counts ARCH (alpha) lags, o asymmetry (gamma) lags, q GARCH (beta)
    lags; plain GARCH has o = 0.
    """

    family: str = GARCH
    p: int = 1
    o: int = 0
    q: int = 1
    distribution: str = NORMAL

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.q < 0 or self.o < 0:
            raise ValueError("o and q must be >= 0")
        if self.o > self.p:
            raise ValueError("o must be <= p")
        if self.family == GARCH and self.o != 0:
            raise ValueError("plain GARCH has no asymmetry lags (o must be 0)")

    @property
    def label(self) -> str:
        orders = (self.p, self.q) if self.family == GARCH else (self.p, self.o, self.q)
        dist = "n" if self.distribution == NORMAL else "t"
        return f"{self.family.upper()}({','.join(map(str, orders))})-{dist}"


@dataclass(frozen=True)
class GarchParams:
    """Coefficient vector for a GarchSpec.

    omega's units depend on the family: %^2 for GARCH/GJR, log-%^2 for
    EGARCH, % for TGARCH (the recursion is on sigma, not sigma^2).
    """

    mu: float = 0.0
    omega: float = 0.0
    alpha: np.ndarray = field(default_factory=lambda: np.empty(0))
    gamma: np.ndarray = field(default_factory=lambda: np.empty(0))
    beta: np.ndarray = field(default_factory=lambda: np.empty(0))
    nu: float | None = None

    def __post_init__(self):
        for name in ("alpha", "gamma", "beta"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=np.float64)))


@dataclass(frozen=True)
class Innovations:
    """Filtered residuals, conditional variances, and standardized residuals."""

    residuals: np.ndarray
    variances: np.ndarray
    standardized: np.ndarray
    n_clamped: int = 0

    def __post_init__(self):
        if not (len(self.residuals) == len(self.variances) == len(self.standardized)):
            raise ValueError("residuals, variances, standardized must have equal length")
        if np.any(self.variances <= 0):
            raise ValueError("variances must be positive")


def validate_params(spec: GarchSpec, params: GarchParams) -> None:
    """Raise InvalidParams naming the violated constraint, if any."""
    alpha, gamma, beta = params.alpha, params.gamma, params.beta
    if alpha.size != spec.p or gamma.size != spec.o or beta.size != spec.q:
        raise InvalidParams(
            f"lag counts (p={alpha.size}, o={gamma.size}, q={beta.size}) "
            f"do not match spec ({spec.p}, {spec.o}, {spec.q})"
        )
    flat = np.concatenate([[params.mu, params.omega], alpha, gamma, beta])
    if not np.all(np.isfinite(flat)):
        raise InvalidParams("parameters must be finite")
    if spec.distribution == STUDENT_T:
        if params.nu is None or not np.isfinite(params.nu) or params.nu <= 2:
            raise InvalidParams(f"nu > 2 required for Student-t, got {params.nu}")
    if spec.family == EGARCH:
        return
    if params.omega <= 0:
        raise InvalidParams(f"omega > 0 required, got {params.omega}")
    if np.any(alpha < 0):
        raise InvalidParams("alpha_i >= 0 required")
    if np.any(beta < 0):
        raise InvalidParams("beta_j >= 0 required")
    if spec.family == GJR and gamma.size and np.any(alpha[: gamma.size] + gamma < 0):
        raise InvalidParams("alpha_i + gamma_i >= 0 required for GJR")
    if spec.family == TGARCH and gamma.size and np.any(np.abs(gamma) > 1):
        raise InvalidParams("|gamma_i| <= 1 required for TGARCH")


def _garch_core_py(eps, sigma2, omega, alpha, gamma, beta, backcast, floor):
    n = eps.shape[0]
    p = alpha.shape[0]
    q = beta.shape[0]
    clamps = 0
    for t in range(n):
        v = omega
        for i in range(1, p + 1):
            if t - i >= 0:
                e = eps[t - i]
                coef = alpha[i - 1]
                if e < 0.0:
                    coef += gamma[i - 1]
                v += coef * e * e
        for j in range(1, q + 1):
            v += beta[j - 1] * (sigma2[t - j] if t - j >= 0 else backcast)
        if v < floor:
            v = floor
            clamps += 1
        sigma2[t] = v
    return clamps


def _egarch_core_py(eps, sigma2, omega, alpha, gamma, beta, eabs, ln_backcast,
                    ln_floor, ln_cap):
    n = eps.shape[0]
    p = alpha.shape[0]
    q = beta.shape[0]
    lns = np.empty(n)
    clamps = 0
    for t in range(n):
        v = omega
        for i in range(1, p + 1):
            if t - i >= 0:
                z = eps[t - i] / math.sqrt(sigma2[t - i])
                v += alpha[i - 1] * (abs(z) - eabs) + gamma[i - 1] * z
            else:
                v += alpha[i - 1] * (0.0 - eabs)
        for j in range(1, q + 1):
            v += beta[j - 1] * (lns[t - j] if t - j >= 0 else ln_backcast)
        if v < ln_floor:
            v = ln_floor
            clamps += 1
        elif v > ln_cap:
            v = ln_cap
            clamps += 1
        lns[t] = v
        sigma2[t] = math.exp(v)
    return clamps


def _tgarch_core_py(eps, sigma2, omega, alpha, gamma, beta, sqrt_backcast, sqrt_floor):
    n = eps.shape[0]
    p = alpha.shape[0]
    q = beta.shape[0]
    sig = np.empty(n)
    clamps = 0
    for t in range(n):
        v = omega
        for i in range(1, p + 1):
            if t - i >= 0:
                e = eps[t - i]
                ep = e if e > 0.0 else 0.0
                en = e if e < 0.0 else 0.0
                v += alpha[i - 1] * ((1.0 - gamma[i - 1]) * ep - (1.0 + gamma[i - 1]) * en)
        for j in range(1, q + 1):
            v += beta[j - 1] * (sig[t - j] if t - j >= 0 else sqrt_backcast)
        if v < sqrt_floor:
            v = sqrt_floor
            clamps += 1
        sig[t] = v
        sigma2[t] = v * v
    return clamps


try:
    from numba import njit

    _garch_core = njit(cache=True)(_garch_core_py)
    _egarch_core = njit(cache=True)(_egarch_core_py)
    _tgarch_core = njit(cache=True)(_tgarch_core_py)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _garch_core = _garch_core_py
    _egarch_core = _egarch_core_py
    _tgarch_core = _tgarch_core_py


def _padded_gamma(spec: GarchSpec, params: GarchParams) -> np.ndarray:
    out = np.zeros(spec.p)
    if spec.o:
        out[: spec.o] = params.gamma
    return out


def variance_filter(spec: GarchSpec, params: GarchParams, returns) -> Innovations:
    """Run the family's variance recursion over a return series."""
    y = check_returns(returns)
    m = max(spec.p, spec.q)
    if y.size <= m:
        raise SeriesTooShort(f"need more than max(p, q) = {m} observations, have {y.size}")
    validate_params(spec, params)

    eps = y - params.mu
    backcast = max(float(np.var(eps, ddof=1)), VARIANCE_FLOOR)
    sigma2 = np.empty(y.size)
    gamma = _padded_gamma(spec, params)
    alpha = params.alpha
    beta = params.beta

    if spec.family in (GARCH, GJR):
        clamps = _garch_core(eps, sigma2, params.omega, alpha, gamma, beta,
                             backcast, VARIANCE_FLOOR)
    elif spec.family == EGARCH:
        eabs = expected_abs_innovation(spec.distribution, params.nu)
        clamps = _egarch_core(eps, sigma2, params.omega, alpha, gamma, beta,
                              eabs, math.log(backcast), _LN_FLOOR, _LN_CAP)
    else:
        clamps = _tgarch_core(eps, sigma2, params.omega, alpha, gamma, beta,
                              math.sqrt(backcast), math.sqrt(VARIANCE_FLOOR))

    z = eps / np.sqrt(sigma2)
    return Innovations(eps, sigma2, z, int(clamps))


def log_likelihood(spec: GarchSpec, params: GarchParams, returns) -> float:
    """Log-likelihood of the returns under the filtered conditional variances."""
    from .distributions import loglikelihood

    innov = variance_filter(spec, params, returns)
    return loglikelihood(spec.distribution, innov.residuals, innov.variances, params.nu)


def unconditional_variance(spec: GarchSpec, params: GarchParams) -> float | None:
    """Long-run variance for GARCH/GJR; None for EGARCH/TGARCH (no closed
    form implemented). The GJR formula assumes symmetric innovations."""
    if spec.family == GARCH:
        persistence = float(np.sum(params.alpha) + np.sum(params.beta))
    elif spec.family == GJR:
        persistence = float(
            np.sum(params.alpha) + 0.5 * np.sum(params.gamma) + np.sum(params.beta)
        )
    else:
        return None
    if persistence >= 1.0:
        raise NonStationary(f"persistence {persistence:.6f} >= 1")
    return params.omega / (1.0 - persistence)


def persistence(spec: GarchSpec, params: GarchParams) -> float | None:
    """Sum of variance-equation weights; None where no closed form is used."""
    if spec.family == GARCH:
        return float(np.sum(params.alpha) + np.sum(params.beta))
    if spec.family == GJR:
        return float(np.sum(params.alpha) + 0.5 * np.sum(params.gamma) + np.sum(params.beta))
    if spec.family == EGARCH:
        return float(np.sum(params.beta))
    return None
