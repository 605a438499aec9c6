"""Daily realized variance and its before/after change rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateError, UndefinedAggregateError


@dataclass(frozen=True)
class PeriodVolatility:
    sigma_bar: float
    n_days: int
    period: str = "before"
    symbol: str = ""


@dataclass(frozen=True)
class RvChangeRate:
    rv: float
    symbol: str = ""


def realized_variance(returns) -> float | np.ndarray:
    """Sum of squared intraday log returns.

    A 2-D input is treated as one day per row and gives one value per row.
    """
    r = np.asarray(returns, dtype=np.float64)
    return np.sum(r * r, axis=-1)


def period_volatility(sigma2, period: str = "before", symbol: str = "") -> PeriodVolatility:
    """Root of the mean daily realized variance over a period's accepted days."""
    s = np.asarray(sigma2, dtype=np.float64).ravel()
    if s.size == 0:
        raise UndefinedAggregateError(
            f"{symbol or 'stock'}: no accepted days in the {period} period")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("daily realized variances must be finite and non-negative")
    return PeriodVolatility(math.sqrt(float(np.mean(s))), int(s.size), period, symbol)


def rv_change_rate(before: PeriodVolatility, after: PeriodVolatility) -> RvChangeRate:
    """``ln(sigma_bar_after / sigma_bar_before)``."""
    if before.sigma_bar <= 0 or after.sigma_bar <= 0:
        raise DegenerateError(
            f"{before.symbol or after.symbol or 'stock'}: zero realized volatility "
            f"(before={before.sigma_bar}, after={after.sigma_bar})")
    return RvChangeRate(math.log(after.sigma_bar / before.sigma_bar),
                        before.symbol or after.symbol)
