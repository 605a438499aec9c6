"""Fixed-grid sampling of a stock-day's trades.

Two grids are built from last-observation-carried-forward (LOCF) trade
prices:

* 71 prices at 0, 300, ..., 21000 s, giving 70 five-minute log returns
  ``ln(p_k / p_{k-1})``;
* 349 log prices at 60, 120, ..., 20940 s (the open and close are dropped).

A grid point takes the last trade with ``time <= offset``; ties in time are
broken by input order.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import IO, Sequence

import numpy as np

from .exceptions import NoPriceYet
from .market_data import DEFAULT_SESSION, SessionSpec, Tick

RETURN_STEP = 300
MINUTE_STEP = 60

NO_PRICE_AT_OPEN = "no_price_at_open"
NO_PRICE_AT_FIRST_MINUTE = "no_price_at_first_minute"


def five_minute_offsets(session: SessionSpec = DEFAULT_SESSION) -> np.ndarray:
    return np.arange(0, session.length_seconds + 1, RETURN_STEP, dtype=np.int64)


def minute_offsets(session: SessionSpec = DEFAULT_SESSION) -> np.ndarray:
    return np.arange(MINUTE_STEP, session.length_seconds, MINUTE_STEP, dtype=np.int64)


@dataclass(frozen=True)
class FiveMinuteReturns:
    symbol: str
    day: date
    returns: np.ndarray


@dataclass(frozen=True)
class MinuteLogPriceVector:
    symbol: str
    day: date
    values: np.ndarray


def _day_arrays(ticks: Sequence[Tick]) -> tuple[np.ndarray, np.ndarray]:
    times = np.array([t.time for t in ticks], dtype=np.int64)
    prices = np.array([t.price for t in ticks], dtype=np.float64)
    order = np.argsort(times, kind="stable")
    return times[order], prices[order]


def _identity(ticks: Sequence[Tick]) -> tuple[str, date]:
    if not ticks:
        return "", date.min
    return ticks[0].symbol, ticks[0].day


def sample_locf(times: np.ndarray, prices: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """LOCF prices at ``offsets``; NaN where no trade has happened yet.

    ``times`` must be sorted ascending.
    """
    idx = np.searchsorted(times, offsets, side="right") - 1
    out = np.full(len(offsets), np.nan)
    ok = idx >= 0
    out[ok] = prices[idx[ok]]
    return out


def locf_price(ticks: Sequence[Tick], t: int) -> int:
    """Price of the last trade at or before offset ``t``."""
    best = None
    for tick in sorted(ticks, key=lambda k: k.time):
        if tick.time > t:
            break
        best = tick
    if best is None:
        raise NoPriceYet(t)
    return best.price


def build_five_minute_returns(ticks: Sequence[Tick],
                              session: SessionSpec = DEFAULT_SESSION) -> FiveMinuteReturns:
    times, prices = _day_arrays(ticks)
    grid = five_minute_offsets(session)
    sampled = sample_locf(times, prices, grid)
    if np.isnan(sampled[0]):
        raise NoPriceYet(int(grid[0]))
    symbol, day = _identity(ticks)
    return FiveMinuteReturns(symbol, day, np.log(sampled[1:] / sampled[:-1]))


def build_minute_vector(ticks: Sequence[Tick],
                        session: SessionSpec = DEFAULT_SESSION) -> MinuteLogPriceVector:
    times, prices = _day_arrays(ticks)
    grid = minute_offsets(session)
    sampled = sample_locf(times, prices, grid)
    if np.isnan(sampled[0]):
        raise NoPriceYet(int(grid[0]))
    symbol, day = _identity(ticks)
    return MinuteLogPriceVector(symbol, day, np.log(sampled))


@dataclass
class DayGrids:
    """Both grids for every day of one stock.

    Rows of ``returns`` and ``log_prices`` for rejected days are NaN and
    ``reasons`` holds the exclusion reason (``None`` when accepted).
    """

    day_code: np.ndarray
    returns: np.ndarray
    log_prices: np.ndarray
    reasons: list

    @property
    def accepted(self) -> np.ndarray:
        return np.array([r is None for r in self.reasons], dtype=bool)


def resample_days(day_code: np.ndarray, times: np.ndarray, prices: np.ndarray,
                  session: SessionSpec = DEFAULT_SESSION) -> DayGrids:
    """Resample every day of one stock in a single pass.

    Inputs are parallel arrays sorted by ``(day_code, time)``.
    """
    span = session.length_seconds + 1
    key = day_code.astype(np.int64) * span + times
    days = np.unique(day_code)
    five = five_minute_offsets(session)
    minute = minute_offsets(session)

    def grid(offsets):
        q = (days[:, None] * span + offsets[None, :]).ravel()
        idx = np.searchsorted(key, q, side="right") - 1
        ok = idx >= 0
        ok[ok] = day_code[idx[ok]] == np.repeat(days, len(offsets))[ok]
        out = np.full(q.shape, np.nan)
        out[ok] = prices[idx[ok]]
        return out.reshape(len(days), len(offsets))

    p5 = grid(five)
    p1 = np.log(grid(minute))
    reasons = []
    for row5, row1 in zip(p5, p1):
        if np.isnan(row5[0]):
            reasons.append(NO_PRICE_AT_OPEN)
        elif np.isnan(row1[0]):
            reasons.append(NO_PRICE_AT_FIRST_MINUTE)
        else:
            reasons.append(None)
    returns = np.log(p5[:, 1:] / p5[:, :-1])
    bad = np.array([r is not None for r in reasons], dtype=bool)
    returns[bad] = np.nan
    p1[bad] = np.nan
    return DayGrids(days, returns, p1, reasons)


def dump_grid(fh: IO[str], symbol: str, days: Sequence[date], rows: np.ndarray) -> None:
    """Debug dump: ``symbol,day,v1,...,vn`` per stock-day."""
    for day, row in zip(days, rows):
        fh.write(f"{symbol},{day.isoformat()}," + ",".join(repr(float(v)) for v in row) + "\n")
