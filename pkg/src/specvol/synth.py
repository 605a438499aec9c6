"""Synthetic tick data with known before/after ground truth.

Each stock-day draws from its own Philox stream keyed by
``(seed, stock, day_index)``, so output does not depend on how stocks are
scheduled across workers. Within a stock, days are generated in order
because each day opens at the previous day's final latent price, which is
also the reference for the price-limit band.

The latent log price at minute ``m = 0 .. 350`` is::

    ln(reference) + cumulative Gaussian steps (sd = regime vol per minute)
                  + sum_k A_k cos(2 pi w_k m / 349 + phi_k)

with a fresh uniform phase per injected component per day. A trade at
second ``t`` executes at the latent price of minute ``ceil(t / 60)``,
rounded to whole currency units.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import ConfigError
from .market_data import (
    DEFAULT_SESSION, EVENT_DATE, SessionSpec, StudyConfig, TickTable, _config_clock,
    _parse_date, format_study_config, parse_key_values, read_calendar, write_calendar,
)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Injection:
    w: int
    amplitude_before: float
    amplitude_after: float


@dataclass
class SynthConfig:
    n_stocks: int
    days: list[date]
    seed: int
    event_date: date = EVENT_DATE
    vol_before: float = 0.001
    vol_after: float = 0.001
    injected: list[Injection] = field(default_factory=list)
    trade_rate: float = 1.0
    limit_pct: float | None = None
    base_price: float = 50000.0
    session: SessionSpec = DEFAULT_SESSION
    max_quantity: int = 100

    def __post_init__(self):
        if self.n_stocks <= 0:
            raise ConfigError("n_stocks must be positive")
        if not self.days:
            raise ConfigError("calendar is empty")
        if self.vol_before < 0 or self.vol_after < 0:
            raise ConfigError("vol_before/vol_after must be non-negative")
        if not self.trade_rate > 0:
            raise ConfigError("trade_rate must be positive")
        if self.limit_pct is not None and not 0 < self.limit_pct <= 1:
            raise ConfigError("limit_pct must lie in (0, 1]")
        if not self.base_price > 0:
            raise ConfigError("base_price must be positive")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        top = (self.n_points - 1) // 2
        for inj in self.injected:
            if not 1 <= inj.w <= top:
                raise ConfigError(f"injected frequency {inj.w} outside 1..{top}")
            if inj.amplitude_before < 0 or inj.amplitude_after < 0:
                raise ConfigError("injected amplitudes must be non-negative")

    @property
    def n_minutes(self) -> int:
        return self.session.length_minutes

    @property
    def n_points(self) -> int:
        return self.n_minutes - 1

    @property
    def symbols(self) -> list[str]:
        return [f"A{i + 1:06d}" for i in range(self.n_stocks)]

    def is_after(self, day: date) -> bool:
        return day >= self.event_date


@dataclass
class SimulatedDay:
    times: np.ndarray
    prices: np.ndarray
    quantities: np.ndarray
    latent: np.ndarray
    reference: float

    @property
    def close(self) -> float:
        return float(self.latent[-1])


def rng_stream(seed: int, stock: int, day_index: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, ((stock & 0xFFFFFFFF) << 32) | (day_index & 0xFFFFFFFF)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def apply_price_limit(price, reference_price, limit_pct):
    """Clamp into ``[reference * (1 - limit), reference * (1 + limit)]``."""
    lo = reference_price * (1.0 - limit_pct)
    hi = reference_price * (1.0 + limit_pct)
    return np.minimum(np.maximum(price, lo), hi) if isinstance(price, np.ndarray) \
        else min(max(price, lo), hi)


def simulate_day(cfg: SynthConfig, stock: int, day_index: int,
                 reference_price: float | None = None,
                 rng: np.random.Generator | None = None) -> SimulatedDay:
    if rng is None:
        rng = rng_stream(cfg.seed, stock, day_index)
    ref = cfg.base_price if reference_price is None else reference_price
    after = cfg.is_after(cfg.days[day_index])
    vol = cfg.vol_after if after else cfg.vol_before
    n_min = cfg.n_minutes

    steps = rng.standard_normal(n_min) * vol
    x = np.empty(n_min + 1)
    x[0] = 0.0
    np.cumsum(steps, out=x[1:])
    x += math.log(ref)
    if cfg.injected:
        phases = rng.uniform(0.0, 2.0 * math.pi, len(cfg.injected))
        m = np.arange(n_min + 1)
        for inj, phi in zip(cfg.injected, phases):
            amp = inj.amplitude_after if after else inj.amplitude_before
            x += amp * np.cos(2.0 * math.pi * inj.w * m / cfg.n_points + phi)
    latent = np.exp(x)

    n_trades = int(rng.poisson(cfg.trade_rate * n_min))
    times = np.empty(n_trades + 1, dtype=np.int64)
    times[0] = 0
    times[1:] = np.sort(rng.integers(1, cfg.session.length_seconds + 1, size=n_trades))
    quantities = rng.integers(1, cfg.max_quantity + 1, size=n_trades + 1)

    if cfg.limit_pct is not None:
        latent = apply_price_limit(latent, ref, cfg.limit_pct)
    minute = -(-times // 60)
    prices = np.rint(latent[minute]).astype(np.int64)
    if cfg.limit_pct is not None:
        lo = math.ceil(ref * (1.0 - cfg.limit_pct))
        hi = math.floor(ref * (1.0 + cfg.limit_pct))
        prices = np.clip(prices, max(lo, 1), hi)
    np.maximum(prices, 1, out=prices)
    return SimulatedDay(times, prices, quantities.astype(np.int64), latent, ref)


@dataclass
class StockPath:
    day_code: np.ndarray
    times: np.ndarray
    prices: np.ndarray
    quantities: np.ndarray
    references: np.ndarray


def simulate_stock(cfg: SynthConfig, stock: int) -> StockPath:
    ref = cfg.base_price
    parts = []
    refs = np.empty(len(cfg.days))
    for d in range(len(cfg.days)):
        day = simulate_day(cfg, stock, d, ref)
        refs[d] = ref
        parts.append(day)
        ref = day.close
    return StockPath(
        np.concatenate([np.full(len(p.times), d, dtype=np.int64) for d, p in enumerate(parts)]),
        np.concatenate([p.times for p in parts]),
        np.concatenate([p.prices for p in parts]),
        np.concatenate([p.quantities for p in parts]),
        refs,
    )


def _pool_size(threads: int) -> int:
    return threads if threads > 0 else (os.cpu_count() or 1)


def generate_paths(cfg: SynthConfig, threads: int = 1) -> list[StockPath]:
    with ThreadPoolExecutor(max_workers=_pool_size(threads)) as pool:
        return list(pool.map(lambda s: simulate_stock(cfg, s), range(cfg.n_stocks)))


def generate_table(cfg: SynthConfig, threads: int = 1) -> TickTable:
    paths = generate_paths(cfg, threads)
    code = np.concatenate([np.full(len(p.times), s, dtype=np.int64) for s, p in enumerate(paths)])
    return TickTable(
        cfg.symbols, list(cfg.days), code,
        np.concatenate([p.day_code for p in paths]),
        np.concatenate([p.times for p in paths]),
        np.concatenate([p.prices for p in paths]),
        np.concatenate([p.quantities for p in paths]),
    )


# -- ground truth and files --------------------------------------------------

@dataclass(frozen=True)
class GroundTruth:
    symbol: str
    true_rv: float
    true_f: dict[int, float]


def _log_ratio(after: float, before: float) -> float:
    if before > 0 and after > 0:
        return math.log(after / before)
    return math.nan


def ground_truth(cfg: SynthConfig) -> list[GroundTruth]:
    rv = _log_ratio(cfg.vol_after, cfg.vol_before)
    f = {inj.w: _log_ratio(inj.amplitude_after, inj.amplitude_before) for inj in cfg.injected}
    return [GroundTruth(s, rv, dict(f)) for s in cfg.symbols]


def format_truth(truth: Sequence[GroundTruth]) -> str:
    lines = ["symbol,true_rv,true_f_w_list"]
    for g in truth:
        f = ";".join(f"{w}:{g.true_f[w]!r}" for w in sorted(g.true_f))
        lines.append(f"{g.symbol},{g.true_rv!r},{f}")
    return "\n".join(lines) + "\n"


def write_ticks_fast(fh, symbol: str, days: Sequence[date], path: StockPath) -> int:
    day_s = [d.isoformat() for d in days]
    fh.write("".join([
        f"{symbol},{day_s[d]},{t:05d},{p},{q}\n"
        for d, t, p, q in zip(path.day_code.tolist(), path.times.tolist(),
                              path.prices.tolist(), path.quantities.tolist())
    ]))
    return len(path.times)


@dataclass
class SynthOutput:
    ticks: Path
    calendar: Path
    truth: Path
    symbols: Path
    study: Path
    n_ticks: int


def generate_dataset(cfg: SynthConfig, out_dir, threads: int = 1) -> SynthOutput:
    """Write ``ticks.csv``, ``calendar.txt``, ``truth.csv``, ``symbols.txt``
    and a matching ``study.cfg`` covering the whole calendar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = generate_paths(cfg, threads)
    files = SynthOutput(out / "ticks.csv", out / "calendar.txt", out / "truth.csv",
                        out / "symbols.txt", out / "study.cfg", 0)
    n = 0
    with open(files.ticks, "w", encoding="utf-8", newline="\n") as fh:
        for symbol, path in zip(cfg.symbols, paths):
            n += write_ticks_fast(fh, symbol, cfg.days, path)
    files.n_ticks = n
    with open(files.calendar, "w", encoding="utf-8", newline="\n") as fh:
        write_calendar(cfg.days, fh)
    files.truth.write_text(format_truth(ground_truth(cfg)), encoding="utf-8")
    files.symbols.write_text("".join(s + "\n" for s in cfg.symbols), encoding="utf-8")
    if cfg.days[0] < cfg.event_date <= cfg.days[-1]:
        study = StudyConfig(cfg.event_date, [(cfg.days[0], cfg.days[-1])], cfg.symbols,
                            cfg.session)
        files.study.write_text(format_study_config(study, files.symbols.name), encoding="utf-8")
    return files


# -- configuration file --------------------------------------------------------

def weekdays(start: date, end: date) -> list[date]:
    out, d = [], start
    while d <= end:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def parse_injections(text: str) -> list[Injection]:
    """``w:amp_before:amp_after`` items separated by ``;``."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"key 'injected': bad item {item!r}, expected w:before:after")
        try:
            out.append(Injection(int(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError:
            raise ConfigError(f"key 'injected': bad item {item!r}") from None
    return out


_SYNTH_KEYS = {
    "seed", "n_stocks", "start_date", "end_date", "calendar_file", "event_date",
    "vol_before", "vol_after", "injected", "trade_rate", "limit_pct", "base_price",
    "session.open", "session.close", "max_quantity",
}


def load_synth_config(path) -> SynthConfig:
    """Read a synth configuration (``key = value`` lines).

    Required: ``seed``, ``n_stocks``, and either ``calendar_file`` or both
    ``start_date`` and ``end_date`` (weekdays in between are trading days).
    """
    path = Path(path)
    values = parse_key_values(path.read_text(encoding="utf-8"))
    for key in values:
        if key not in _SYNTH_KEYS:
            raise ConfigError(f"unknown key {key!r}")

    def required(key):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
        return values[key]

    def number(key, kind, default=None):
        if key not in values:
            if default is None:
                required(key)
            return default
        try:
            return kind(values[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: bad value {values[key]!r}") from None

    seed = number("seed", int)
    n_stocks = number("n_stocks", int)
    if "calendar_file" in values:
        cal = Path(values["calendar_file"])
        if not cal.is_absolute():
            cal = path.parent / cal
        try:
            days = read_calendar(cal)
        except OSError as exc:
            raise ConfigError(f"key 'calendar_file': cannot read {cal}: {exc}") from None
    else:
        try:
            days = weekdays(_parse_date(required("start_date")), _parse_date(required("end_date")))
        except ValueError:
            raise ConfigError("keys 'start_date'/'end_date': expected YYYY-MM-DD") from None
    try:
        event = _parse_date(values["event_date"]) if "event_date" in values else EVENT_DATE
    except ValueError:
        raise ConfigError(f"key 'event_date': bad date {values['event_date']!r}") from None
    limit = values.get("limit_pct", "none").lower()
    session = SessionSpec(
        _config_clock(values, "session.open", DEFAULT_SESSION.open_time),
        _config_clock(values, "session.close", DEFAULT_SESSION.close_time),
    )
    vol_before = number("vol_before", float, 0.001)
    return SynthConfig(
        n_stocks=n_stocks, days=days, seed=seed, event_date=event,
        vol_before=vol_before,
        vol_after=number("vol_after", float, vol_before),
        injected=parse_injections(values.get("injected", "")),
        trade_rate=number("trade_rate", float, 1.0),
        limit_pct=None if limit in ("", "none") else number("limit_pct", float),
        base_price=number("base_price", float, 50000.0),
        session=session,
        max_quantity=number("max_quantity", int, 100),
    )
