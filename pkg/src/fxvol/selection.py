"""Lag-order grid search and normal-vs-Student-t comparison."""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

import numpy as np

from .distributions import NORMAL, STUDENT_T
from .estimation import CONSTANT_MEAN, FitResult, OptimizerConfig, fit
from .exceptions import AllCellsFailed, FxvolError, OptimizationFailed
from .recursions import GARCH, GarchSpec

O_FIXED_ONE = "one"
O_MATCH_P = "match_p"


def _order_for(family: str, p: int, o_mode) -> int:
    if family == GARCH:
        return 0
    if o_mode == O_FIXED_ONE:
        return 1
    if o_mode == O_MATCH_P:
        return p
    return min(int(o_mode), p)


@dataclass(frozen=True)
class GridResult:
    family: str
    distribution: str
    p_max: int
    q_max: int
    aic: np.ndarray          # (p_max, q_max); NaN where the cell failed
    bic: np.ndarray
    loglik: np.ndarray
    converged: np.ndarray    # bool
    n_obs: int
    best_by_aic: GarchSpec | None
    best_by_bic: GarchSpec | None
    failures: tuple[tuple[int, int, str], ...] = ()

    def cell(self, p: int, q: int) -> tuple[float, float, bool]:
        return (float(self.aic[p - 1, q - 1]), float(self.bic[p - 1, q - 1]),
                bool(self.converged[p - 1, q - 1]))


def _best_spec(family, distribution, matrix, converged, o_mode) -> GarchSpec | None:
    candidates = []
    p_max, q_max = matrix.shape
    for p in range(1, p_max + 1):
        for q in range(1, q_max + 1):
            value = matrix[p - 1, q - 1]
            if converged[p - 1, q - 1] and np.isfinite(value):
                candidates.append((value, p + q, p, q))
    if not candidates:
        return None
    _, _, p, q = min(candidates)
    return GarchSpec(family=family, p=p, o=_order_for(family, p, o_mode),
                     q=q, distribution=distribution)


def grid_search(family: str, distribution: str, returns, p_max: int = 5,
                q_max: int = 5, config: OptimizerConfig | None = None,
                o_mode=O_FIXED_ONE, mean: str = CONSTANT_MEAN,
                min_obs: int = 50) -> GridResult:
    """Fit every (p, q) cell; failed cells are recorded and excluded from the
    best-of selection (ties break toward smaller p+q, then smaller p)."""
    if p_max < 1 or q_max < 1:
        raise ValueError("p_max and q_max must be >= 1")
    config = config or OptimizerConfig()
    aic = np.full((p_max, q_max), np.nan)
    bic = np.full((p_max, q_max), np.nan)
    loglik = np.full((p_max, q_max), np.nan)
    converged = np.zeros((p_max, q_max), dtype=bool)
    failures: list[tuple[int, int, str]] = []
    n_obs = 0
    for p in range(1, p_max + 1):
        for q in range(1, q_max + 1):
            spec = GarchSpec(family=family, p=p, o=_order_for(family, p, o_mode),
                             q=q, distribution=distribution)
            try:
                result = fit(spec, returns, config, mean=mean, min_obs=min_obs,
                             std_errors=False)
            except FxvolError as exc:
                failures.append((p, q, str(exc)))
                continue
            aic[p - 1, q - 1] = result.aic
            bic[p - 1, q - 1] = result.bic
            loglik[p - 1, q - 1] = result.loglik
            converged[p - 1, q - 1] = result.converged
            n_obs = result.n_obs
    if len(failures) == p_max * q_max:
        raise AllCellsFailed(f"every cell of the {family}/{distribution} grid failed")
    return GridResult(
        family=family, distribution=distribution, p_max=p_max, q_max=q_max,
        aic=aic, bic=bic, loglik=loglik, converged=converged, n_obs=n_obs,
        best_by_aic=_best_spec(family, distribution, aic, converged, o_mode),
        best_by_bic=_best_spec(family, distribution, bic, converged, o_mode),
        failures=tuple(failures),
    )


def matrix_csv_text(grid: GridResult, criterion: str) -> str:
    """Render one criterion matrix as CSV (rows = p, columns = q)."""
    matrix = getattr(grid, criterion)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["p\\q"] + [str(q) for q in range(1, grid.q_max + 1)])
    for p in range(1, grid.p_max + 1):
        row = [str(p)]
        for q in range(1, grid.q_max + 1):
            value = matrix[p - 1, q - 1]
            row.append(repr(float(value)) if np.isfinite(value) else "N/A")
        writer.writerow(row)
    return buf.getvalue()


@dataclass(frozen=True)
class DistributionComparison:
    """Paired fits of one (family, p, o, q) under normal and Student-t."""

    normal: FitResult | None
    student_t: FitResult | None
    errors: tuple[tuple[str, str], ...] = ()

    @property
    def delta_aic(self) -> float | None:
        if self.normal is None or self.student_t is None:
            return None
        return self.student_t.aic - self.normal.aic

    @property
    def delta_bic(self) -> float | None:
        if self.normal is None or self.student_t is None:
            return None
        return self.student_t.bic - self.normal.bic


def compare_distributions(family: str, p: int, o: int, q: int, returns,
                          config: OptimizerConfig | None = None,
                          mean: str = CONSTANT_MEAN,
                          min_obs: int = 50) -> DistributionComparison:
    """Fit the same spec under both distributions on identical data; errors in
    one arm are reported alongside the surviving arm's result."""
    config = config or OptimizerConfig()
    results: dict[str, FitResult | None] = {}
    errors: list[tuple[str, str]] = []
    for dist in (NORMAL, STUDENT_T):
        spec = GarchSpec(family=family, p=p, o=o, q=q, distribution=dist)
        try:
            results[dist] = fit(spec, returns, config, mean=mean, min_obs=min_obs)
        except (OptimizationFailed,) as exc:
            results[dist] = None
            errors.append((dist, str(exc)))
    return DistributionComparison(normal=results[NORMAL], student_t=results[STUDENT_T],
                                  errors=tuple(errors))
