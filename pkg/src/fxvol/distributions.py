"""Innovation distributions for the variance models.

Both distributions are standardized to unit variance so that sigma_t is the
conditional standard deviation regardless of the distribution choice. The
Student-t therefore requires nu > 2.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .exceptions import InvalidParams, NonFiniteLikelihood

NORMAL = "normal"
STUDENT_T = "t"

DISTRIBUTIONS = (NORMAL, STUDENT_T)

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def expected_abs_innovation(distribution: str, nu: float | None = None) -> float:
    """E|z| for a unit-variance innovation z.

    Normal: sqrt(2/pi). Standardized Student-t:
    2*sqrt(nu-2)*Gamma((nu+1)/2) / (sqrt(pi)*(nu-1)*Gamma(nu/2)).
    """
    if distribution == NORMAL:
        return SQRT_2_OVER_PI
    if distribution == STUDENT_T:
        if nu is None or nu <= 2:
            raise InvalidParams(f"Student-t requires nu > 2, got {nu}")
        log_val = (
            math.log(2.0)
            + 0.5 * math.log(nu - 2.0)
            + gammaln((nu + 1.0) / 2.0)
            - 0.5 * math.log(math.pi)
            - math.log(nu - 1.0)
            - gammaln(nu / 2.0)
        )
        return float(math.exp(log_val))
    raise ValueError(f"unknown distribution {distribution!r}")


def loglikelihood(distribution: str, resids: np.ndarray, variances: np.ndarray,
                  nu: float | None = None) -> float:
    """Sum of per-observation log densities of resids given variances.

    Raises NonFiniteLikelihood when the result is not a finite number, which
    the optimizer treats as a rejected point.
    """
    sigma2 = variances
    if distribution == NORMAL:
        ll = -0.5 * np.sum(np.log(2.0 * np.pi) + np.log(sigma2) + resids * resids / sigma2)
    elif distribution == STUDENT_T:
        if nu is None or nu <= 2:
            raise InvalidParams(f"Student-t requires nu > 2, got {nu}")
        z2 = resids * resids / sigma2
        const = (
            gammaln((nu + 1.0) / 2.0)
            - gammaln(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
        )
        ll = np.sum(
            const - 0.5 * np.log(sigma2) - ((nu + 1.0) / 2.0) * np.log1p(z2 / (nu - 2.0))
        )
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    ll = float(ll)
    if not np.isfinite(ll):
        raise NonFiniteLikelihood(f"log-likelihood is {ll}")
    return ll


def sample_standardized(distribution: str, size, rng: np.random.Generator,
                        nu: float | None = None, antithetic: bool = False) -> np.ndarray:
    """Draw unit-variance innovations; antithetic pairs each draw with its
    negation (size must then be even along the first axis)."""
    if antithetic:
        shape = (size,) if np.isscalar(size) else tuple(size)
        if shape[0] % 2:
            raise ValueError("antithetic sampling needs an even first dimension")
        half = (shape[0] // 2,) + shape[1:]
        base = _draw(distribution, half, rng, nu)
        return np.concatenate([base, -base], axis=0)
    return _draw(distribution, size, rng, nu)


def _draw(distribution, size, rng, nu):
    if distribution == NORMAL:
        return rng.standard_normal(size)
    if distribution == STUDENT_T:
        if nu is None or nu <= 2:
            raise InvalidParams(f"Student-t requires nu > 2, got {nu}")
        return rng.standard_t(nu, size) * math.sqrt((nu - 2.0) / nu)
    raise ValueError(f"unknown distribution {distribution!r}")
