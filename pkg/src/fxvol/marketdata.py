"""Price/return series ingestion, cleaning, statistics, and sample splitting.

Returns are simple percent returns (x100), the realized-volatility proxy is
the trailing w-day sample standard deviation of those returns, and all
second moments use the n-1 convention.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sstats

from .exceptions import (
    EmptySeries,
    FileUnreadable,
    HoldoutTooLarge,
    MalformedRow,
    TooFewObservations,
)


@dataclass(frozen=True)
class PriceSeries:
    """Dated close prices, strictly increasing dates, positive closes."""

    dates: tuple[dt.date, ...]
    close: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "close", np.asarray(self.close, dtype=np.float64))
        if len(self.dates) != self.close.size:
            raise ValueError("dates and close must have equal length")
        if self.close.size < 2:
            raise EmptySeries("price series needs at least 2 rows")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if not np.all(self.close > 0):
            raise ValueError("close prices must be positive")

    def __len__(self) -> int:
        return self.close.size


@dataclass(frozen=True)
class ReturnSeries:
    """Daily percent returns, dated at the later day of each pair."""

    dates: tuple[dt.date, ...]
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "returns", np.asarray(self.returns, dtype=np.float64))
        if len(self.dates) != self.returns.size:
            raise ValueError("dates and returns must have equal length")
        if not np.all(np.isfinite(self.returns)):
            raise ValueError("returns must be finite")

    def __len__(self) -> int:
        return self.returns.size

    def slice(self, start: int, stop: int) -> "ReturnSeries":
        return ReturnSeries(self.dates[start:stop], self.returns[start:stop])


@dataclass(frozen=True)
class DistributionStats:
    count: int
    mean: float
    std: float
    skew: float
    kurt: float
    min: float
    q25: float
    median: float
    q75: float
    max: float

    def as_text(self, label: str = "Returns") -> str:
        """Pandas-describe-style block: count/mean/std/skew/kurt then quantiles."""
        rows = [
            ("count", float(self.count)),
            ("mean", self.mean),
            ("std", self.std),
            ("skew", self.skew),
            ("kurt", self.kurt),
            ("min", self.min),
            ("25%", self.q25),
            ("50%", self.median),
            ("75%", self.q75),
            ("max", self.max),
        ]
        lines = [f"{k:<8}{v:.6f}" for k, v in rows]
        lines.append(f"Name: {label}, dtype: float64")
        return "\n".join(lines)


@dataclass(frozen=True)
class VolProxySeries:
    """Trailing w-day sample std of returns, dated at each window's last day."""

    dates: tuple[dt.date, ...]
    proxy: np.ndarray
    window: int

    def __post_init__(self):
        object.__setattr__(self, "proxy", np.asarray(self.proxy, dtype=np.float64))
        if len(self.dates) != self.proxy.size:
            raise ValueError("dates and proxy must have equal length")
        if np.any(self.proxy < 0):
            raise ValueError("proxy values must be non-negative")

    def __len__(self) -> int:
        return self.proxy.size


@dataclass(frozen=True)
class SampleSplit:
    in_sample: ReturnSeries
    out_of_sample: ReturnSeries
    split_index: int


def load_prices(path, date_column: str = "date", close_column: str = "close") -> PriceSeries:
    """Parse a headered CSV into a PriceSeries, sorted ascending by date.

    Rows that fail to parse raise MalformedRow with the 1-based line number.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptySeries(f"{path} has no header row")
        for col in (date_column, close_column):
            if col not in reader.fieldnames:
                raise MalformedRow(1, f"missing column {col!r} in header")
        rows: list[tuple[dt.date, float]] = []
        for lineno, row in enumerate(reader, start=2):
            raw_date = (row.get(date_column) or "").strip()
            raw_close = (row.get(close_column) or "").strip()
            try:
                date = dt.date.fromisoformat(raw_date)
            except ValueError as exc:
                raise MalformedRow(lineno, f"bad date {raw_date!r}") from exc
            try:
                close = float(raw_close)
            except ValueError as exc:
                raise MalformedRow(lineno, f"bad close {raw_close!r}") from exc
            if not np.isfinite(close) or close <= 0:
                raise MalformedRow(lineno, f"non-positive close {raw_close!r}")
            rows.append((date, close))
    if len(rows) < 2:
        raise EmptySeries(f"{path} holds {len(rows)} usable rows, need >= 2")
    rows.sort(key=lambda r: r[0])
    for i in range(1, len(rows)):
        if rows[i][0] == rows[i - 1][0]:
            raise MalformedRow(0, f"duplicate date {rows[i][0].isoformat()}")
    dates = tuple(r[0] for r in rows)
    close = np.array([r[1] for r in rows])
    return PriceSeries(dates, close)


def compute_returns(prices: PriceSeries) -> ReturnSeries:
    """Percent day-over-day change, dated at the later day."""
    close = prices.close
    if close.size < 2:
        raise EmptySeries("need at least 2 prices to compute returns")
    rets = 100.0 * (close[1:] / close[:-1] - 1.0)
    return ReturnSeries(prices.dates[1:], rets)


def smooth_outliers(prices: PriceSeries, threshold: float = 8.0) -> PriceSeries:
    """Replace interior closes whose absolute percent move from the previous
    close exceeds `threshold` with the midpoint of the original neighbours.

    Single left-to-right pass over the original values; endpoints untouched.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    close = prices.close
    if close.size < 3:
        return prices
    orig = close.copy()
    out = close.copy()
    for i in range(1, close.size - 1):
        move = 100.0 * abs(orig[i] / orig[i - 1] - 1.0)
        if move > threshold:
            out[i] = 0.5 * (orig[i - 1] + orig[i + 1])
    return PriceSeries(prices.dates, out)


def distribution_stats(returns: ReturnSeries | np.ndarray) -> DistributionStats:
    """Summary statistics in the pandas conventions: sample std, bias-adjusted
    skew and excess kurtosis, linearly interpolated quartiles."""
    r = np.asarray(getattr(returns, "returns", returns), dtype=np.float64)
    if r.size < 4:
        raise TooFewObservations("need >= 4 observations for kurtosis")
    q25, med, q75 = np.percentile(r, [25.0, 50.0, 75.0])
    return DistributionStats(
        count=int(r.size),
        mean=float(np.mean(r)),
        std=float(np.std(r, ddof=1)),
        skew=float(sstats.skew(r, bias=False)),
        kurt=float(sstats.kurtosis(r, fisher=True, bias=False)),
        min=float(np.min(r)),
        q25=float(q25),
        median=float(med),
        q75=float(q75),
        max=float(np.max(r)),
    )


def realized_vol(returns: ReturnSeries, window: int = 20) -> VolProxySeries:
    """Trailing sample std over each length-`window` block of returns."""
    if window < 2:
        raise ValueError("window must be >= 2")
    r = returns.returns
    n = r.size
    if n < window:
        raise TooFewObservations(f"need >= {window} returns, have {n}")
    windows = np.lib.stride_tricks.sliding_window_view(r, window)
    proxy = windows.std(axis=1, ddof=1)
    dates = returns.dates[window - 1:]
    return VolProxySeries(dates, proxy, window)


def split_sample(returns: ReturnSeries, holdout: int) -> SampleSplit:
    """Final `holdout` observations become the out-of-sample set."""
    n = len(returns)
    if not 0 < holdout < n:
        raise HoldoutTooLarge(f"holdout {holdout} must satisfy 0 < holdout < {n}")
    split = n - holdout
    return SampleSplit(returns.slice(0, split), returns.slice(split, n), split)
