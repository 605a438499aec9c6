"""End-to-end before/after study over a tick table.

Every stock-day is resampled once; a day is accepted only if both grids can
be built, and the same accepted days feed the realized-variance and the
spectral aggregates.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np

from .event_study import (
    CrossSectionSummary, FrequencyProfile, assemble_report, cross_section, fmt,
    frequency_profile, window_dirname,
)
from .exceptions import DegenerateError
from .market_data import DaySet, StudyConfig, TickTable, split_days, window_label
from .resample import resample_days
from .spectral import (
    PeriodAmplitude, SpectralChangeRate, amplitude_spectrum, n_frequencies,
    period_amplitude, spectral_change_rate,
)
from .volatility import PeriodVolatility, period_volatility, realized_variance, rv_change_rate

log = logging.getLogger(__name__)

NO_TICKS = "no_ticks"


@dataclass
class StockDays:
    """Per-day measures for one stock, keyed by calendar date."""

    symbol: str
    sigma2: dict[date, float] = field(default_factory=dict)
    amplitudes: dict[date, np.ndarray] = field(default_factory=dict)
    rejected: dict[date, str] = field(default_factory=dict)


@dataclass
class StockResult:
    symbol: str
    vol_before: PeriodVolatility
    vol_after: PeriodVolatility
    rv: float
    amp_before: PeriodAmplitude
    amp_after: PeriodAmplitude
    spectral: SpectralChangeRate


@dataclass
class WindowResult:
    label: str
    days: DaySet
    stocks: list[StockResult]
    summary: CrossSectionSummary
    profile: FrequencyProfile
    exclusions: list[tuple[str, str, str]]

    @property
    def rv_values(self) -> np.ndarray:
        return np.array([s.rv for s in self.stocks if np.isfinite(s.rv)])

    @property
    def f_matrix(self) -> np.ndarray:
        return np.vstack([s.spectral.f for s in self.stocks])


@dataclass
class StudyResult:
    windows: list[WindowResult]
    symbols: list[str]
    n_stock_days: int


def _pool_size(threads: int) -> int:
    return threads if threads > 0 else (os.cpu_count() or 1)


def measure_stock(symbol: str, day_code: np.ndarray, times: np.ndarray, prices: np.ndarray,
                  table_days: Sequence[date], study: StudyConfig) -> StockDays:
    """Resample every day of one stock and compute sigma^2 and amplitudes."""
    out = StockDays(symbol)
    if len(times) == 0:
        return out
    grids = resample_days(day_code, times, prices, study.session)
    ok = grids.accepted
    sigma2 = realized_variance(grids.returns[ok])
    amps = amplitude_spectrum(grids.log_prices[ok]) if ok.any() else np.empty((0, 0))
    dates = [table_days[c] for c in grids.day_code]
    k = 0
    for d, reason in zip(dates, grids.reasons):
        if reason is None:
            out.sigma2[d] = float(sigma2[k])
            out.amplitudes[d] = amps[k]
            k += 1
        else:
            out.rejected[d] = reason
    return out


def _stock_slices(table: TickTable, universe: Sequence[str], keep_days: np.ndarray,
                  study_span: int):
    """Per-symbol arrays sorted by ``(day, time)``, file order kept for ties."""
    rows = keep_days[table.day_code] if len(table) else np.zeros(0, dtype=bool)
    sym = table.symbol_code[rows]
    day = table.day_code[rows]
    t = table.time[rows]
    p = table.price[rows].astype(np.float64)
    key = (sym * max(len(table.days), 1) + day) * (study_span + 1) + t
    if len(key) and np.any(np.diff(key) < 0):
        order = np.argsort(key, kind="stable")
        sym, day, t, p = sym[order], day[order], t[order], p[order]
    index = {s: i for i, s in enumerate(table.symbols)}
    for symbol in universe:
        code = index.get(symbol)
        if code is None:
            yield symbol, day[:0], t[:0], p[:0]
            continue
        lo, hi = np.searchsorted(sym, [code, code + 1])
        yield symbol, day[lo:hi], t[lo:hi], p[lo:hi]


def _analyze_window(window, study: StudyConfig, calendar: Sequence[date],
                    measured: Sequence[StockDays]) -> WindowResult:
    label = window_label(window)
    days = split_days(calendar, window, study.event_date)
    n_freq = n_frequencies(study.session.length_minutes - 1)
    stocks: list[StockResult] = []
    exclusions: list[tuple[str, str, str]] = []

    for m in measured:
        sides = {}
        for side in ("before", "after"):
            accepted = []
            for d in days.side(side):
                if d in m.sigma2:
                    accepted.append(d)
                else:
                    exclusions.append((m.symbol, d.isoformat(), m.rejected.get(d, NO_TICKS)))
            sides[side] = accepted
        if not sides["before"] or not sides["after"]:
            empty = "before" if not sides["before"] else "after"
            exclusions.append((m.symbol, "", f"no_accepted_days_{empty}"))
            continue
        vb = period_volatility([m.sigma2[d] for d in sides["before"]], "before", m.symbol)
        va = period_volatility([m.sigma2[d] for d in sides["after"]], "after", m.symbol)
        try:
            rv = rv_change_rate(vb, va).rv
        except DegenerateError:
            exclusions.append((m.symbol, "", "zero_realized_volatility"))
            rv = float("nan")
        ab = period_amplitude(np.array([m.amplitudes[d] for d in sides["before"]]), "before", m.symbol)
        aa = period_amplitude(np.array([m.amplitudes[d] for d in sides["after"]]), "after", m.symbol)
        spec = spectral_change_rate(ab, aa)
        for w in spec.degenerate:
            exclusions.append((m.symbol, "", f"zero_amplitude_w{w}"))
        stocks.append(StockResult(m.symbol, vb, va, rv, ab, aa, spec))

    rv_values = np.array([s.rv for s in stocks if np.isfinite(s.rv)])
    summary = cross_section(rv_values, label)
    f = np.vstack([s.spectral.f for s in stocks]) if stocks else np.empty((0, n_freq))
    profile = frequency_profile(f, label)
    return WindowResult(label, days, stocks, summary, profile, exclusions)


def analyze(table: TickTable, calendar: Sequence[date], study: StudyConfig,
            threads: int = 1) -> StudyResult:
    """Run every configured window of the study on ``table``."""
    universe = list(study.symbols) if study.symbols is not None else list(table.symbols)
    cal = sorted(set(calendar))
    for window in study.windows:
        split_days(cal, window, study.event_date)

    trading = set(cal)
    in_any = np.array([
        d in trading and any(s <= d <= e for s, e in study.windows) for d in table.days
    ], dtype=bool)
    slices = list(_stock_slices(table, universe, in_any, study.session.length_seconds))
    with ThreadPoolExecutor(max_workers=_pool_size(threads)) as pool:
        measured = list(pool.map(
            lambda s: measure_stock(s[0], s[1], s[2], s[3], table.days, study), slices))
    n_stock_days = sum(len(m.sigma2) + len(m.rejected) for m in measured)
    log.info("measured %d stock-days across %d symbols", n_stock_days, len(universe))
    windows = [_analyze_window(w, study, cal, measured) for w in study.windows]
    return StudyResult(windows, universe, n_stock_days)


def write_results(result: StudyResult, out_dir) -> list[Path]:
    out = Path(out_dir)
    written = assemble_report(
        out, [w.summary for w in result.windows], [w.profile for w in result.windows],
        {w.label: w.exclusions for w in result.windows},
    )
    for w in result.windows:
        d = out / window_dirname(w.label)
        rv_path, spec_path = d / "rv.csv", d / "spectrum.csv"
        with open(rv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("symbol,sigma_bar_before,n_before,sigma_bar_after,n_after,rv\n")
            for s in w.stocks:
                fh.write(",".join([s.symbol, fmt(s.vol_before.sigma_bar), fmt(s.vol_before.n_days),
                                   fmt(s.vol_after.sigma_bar), fmt(s.vol_after.n_days),
                                   fmt(s.rv)]) + "\n")
        with open(spec_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("symbol,w,c_bar_before,c_bar_after,f\n")
            for s in w.stocks:
                for i in range(len(s.spectral.f)):
                    fh.write(f"{s.symbol},{i + 1},{fmt(s.amp_before.c_bar[i])},"
                             f"{fmt(s.amp_after.c_bar[i])},{fmt(s.spectral.f[i])}\n")
        written += [rv_path, spec_path]
    return written
