"""Tick records, trading sessions, calendars and before/after day sets.

Tick file format (one record per line, optional header)::

    symbol,day,time_seconds,price,quantity
    A005930,2015-06-15,00034,1298000,10

``time_seconds`` counts whole seconds since the session open.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from datetime import date, datetime, time as clock_time
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np
import pandas as pd

from .exceptions import ConfigError, ParseError, ValidationError

EVENT_DATE = date(2015, 6, 15)

# the widest window starts 2014-07-01, not 2014-01-01
DEFAULT_WINDOWS = (
    (date(2015, 2, 2), date(2015, 10, 30)),
    (date(2014, 10, 1), date(2016, 2, 29)),
    (date(2014, 7, 1), date(2016, 5, 31)),
)

TICK_FIELDS = ("symbol", "day", "time", "price", "quantity")


@dataclass(frozen=True)
class SessionSpec:
    open_time: clock_time = clock_time(9, 0)
    close_time: clock_time = clock_time(14, 50)

    def __post_init__(self):
        if self.length_minutes <= 0:
            raise ConfigError(
                f"session close {self.close_time} must be after open {self.open_time}"
            )

    @property
    def length_minutes(self) -> int:
        seconds = self.length_seconds
        return seconds // 60

    @property
    def length_seconds(self) -> int:
        o = self.open_time.hour * 3600 + self.open_time.minute * 60 + self.open_time.second
        c = self.close_time.hour * 3600 + self.close_time.minute * 60 + self.close_time.second
        return c - o


DEFAULT_SESSION = SessionSpec()


@dataclass(frozen=True)
class Tick:
    symbol: str
    day: date
    time: int
    price: int
    quantity: int


@dataclass(frozen=True)
class DaySet:
    """Trading days of one window, split at the event date."""

    before: tuple[date, ...]
    after: tuple[date, ...]

    def side(self, name: str) -> tuple[date, ...]:
        if name == "before":
            return self.before
        if name == "after":
            return self.after
        raise ValueError(f"unknown period {name!r}")

    def __len__(self):
        return len(self.before) + len(self.after)


def window_label(window: tuple[date, date]) -> str:
    return f"{window[0].isoformat()}..{window[1].isoformat()}"


@dataclass
class StudyConfig:
    event_date: date = EVENT_DATE
    windows: list[tuple[date, date]] = field(default_factory=lambda: list(DEFAULT_WINDOWS))
    symbols: list[str] | None = None
    session: SessionSpec = DEFAULT_SESSION

    def __post_init__(self):
        if not self.windows:
            raise ConfigError("at least one analysis window is required")
        for start, end in self.windows:
            if start > end:
                raise ConfigError(f"window {start}..{end}: start after end")
            if not start < self.event_date <= end:
                raise ConfigError(
                    f"window {start}..{end} does not contain event date {self.event_date}"
                )

    @property
    def labels(self) -> list[str]:
        return [window_label(w) for w in self.windows]


def split_days(trading_days: Iterable[date], window: tuple[date, date],
               event_date: date) -> DaySet:
    """Partition the trading days inside ``window`` at ``event_date``.

    The event day itself belongs to the *after* set: the new limit was in
    force that day.
    """
    start, end = window
    if start > end:
        raise ConfigError(f"window {start}..{end}: start after end")
    if not start < event_date <= end:
        raise ConfigError(f"event date {event_date} outside window {start}..{end}")
    days = sorted(set(trading_days))
    before = tuple(d for d in days if start <= d < event_date)
    after = tuple(d for d in days if event_date <= d <= end)
    label = window_label(window)
    if not before:
        raise ConfigError(f"window {label}: no trading days before {event_date}")
    if not after:
        raise ConfigError(f"window {label}: no trading days on or after {event_date}")
    return DaySet(before, after)


# -- tick text format -------------------------------------------------------

def _parse_date(text: str) -> date:
    return datetime.strptime(text.strip(), "%Y-%m-%d").date()


def _is_header(fields: Sequence[str]) -> bool:
    return len(fields) >= 3 and not fields[2].strip().isdigit()


def _lines(source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
        return
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line


def parse_ticks(source, session: SessionSpec = DEFAULT_SESSION,
                strict: bool = True) -> Iterator[Tick]:
    """Stream :class:`Tick` records from a path, text/binary handle or lines.

    Ticks are yielded in file order. Out-of-session times raise in strict
    mode and are skipped otherwise; bad prices or quantities always raise.
    """
    limit = session.length_seconds
    first = True
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split(",")
        if first:
            first = False
            if _is_header(fields):
                continue
        if len(fields) != 5:
            raise ParseError(f"expected 5 fields, got {len(fields)}", lineno)
        symbol, day_s, time_s, price_s, qty_s = (f.strip() for f in fields)
        if not symbol:
            raise ParseError("empty symbol", lineno)
        try:
            day = _parse_date(day_s)
            t = int(time_s)
            price = int(price_s)
            qty = int(qty_s)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if price <= 0:
            raise ValidationError(f"non-positive price {price}", lineno)
        if qty <= 0:
            raise ValidationError(f"non-positive quantity {qty}", lineno)
        if not 0 <= t <= limit:
            if strict:
                raise ValidationError(f"time {t}s outside session [0, {limit}]", lineno)
            continue
        yield Tick(symbol, day, t, price, qty)


def format_tick(tick: Tick) -> str:
    return f"{tick.symbol},{tick.day.isoformat()},{tick.time:05d},{tick.price},{tick.quantity}"


def write_ticks(ticks: Iterable[Tick], fh: IO[str], header: bool = False) -> None:
    if header:
        fh.write(",".join(TICK_FIELDS) + "\n")
    for tick in ticks:
        fh.write(format_tick(tick) + "\n")


# -- columnar tick table ----------------------------------------------------

@dataclass
class TickTable:
    """Columnar tick store; ``symbol_code``/``day_code`` index ``symbols``/``days``."""

    symbols: list[str]
    days: list[date]
    symbol_code: np.ndarray
    day_code: np.ndarray
    time: np.ndarray
    price: np.ndarray
    quantity: np.ndarray

    def __len__(self):
        return len(self.time)

    @classmethod
    def from_ticks(cls, ticks: Iterable[Tick]) -> "TickTable":
        ticks = list(ticks)
        symbols = sorted({t.symbol for t in ticks})
        days = sorted({t.day for t in ticks})
        s_idx = {s: i for i, s in enumerate(symbols)}
        d_idx = {d: i for i, d in enumerate(days)}
        return cls(
            symbols, days,
            np.array([s_idx[t.symbol] for t in ticks], dtype=np.int64),
            np.array([d_idx[t.day] for t in ticks], dtype=np.int64),
            np.array([t.time for t in ticks], dtype=np.int64),
            np.array([t.price for t in ticks], dtype=np.int64),
            np.array([t.quantity for t in ticks], dtype=np.int64),
        )

    def to_ticks(self) -> list[Tick]:
        return [
            Tick(self.symbols[s], self.days[d], int(t), int(p), int(q))
            for s, d, t, p, q in zip(self.symbol_code, self.day_code, self.time,
                                     self.price, self.quantity)
        ]

    def select(self, symbols: Iterable[str] | None = None,
               start: date | None = None, end: date | None = None) -> "TickTable":
        """Rows whose symbol is in ``symbols`` and day in ``[start, end]``."""
        mask = np.ones(len(self), dtype=bool)
        if symbols is not None:
            wanted = set(symbols)
            keep = np.array([s in wanted for s in self.symbols], dtype=bool)
            mask &= keep[self.symbol_code] if len(keep) else mask
        if start is not None or end is not None:
            lo = start or date.min
            hi = end or date.max
            keep = np.array([lo <= d <= hi for d in self.days], dtype=bool)
            mask &= keep[self.day_code] if len(keep) else mask
        return TickTable(self.symbols, self.days, self.symbol_code[mask],
                         self.day_code[mask], self.time[mask], self.price[mask],
                         self.quantity[mask])


def read_tick_table(source, session: SessionSpec = DEFAULT_SESSION,
                    strict: bool = True) -> TickTable:
    """Bulk-load a tick file into a :class:`TickTable`.

    Uses the pandas C reader; on any parse failure the file is re-read with
    :func:`parse_ticks` so the error carries the offending line number.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    first_line = data.split(b"\n", 1)[0].decode("utf-8", "replace").strip()
    header = bool(first_line) and _is_header(first_line.split(","))
    offset = 1 + int(header)

    def slow_path():
        list(parse_ticks(io.BytesIO(data), session, strict))
        raise ParseError("unparseable tick file")

    body = data.split(b"\n", 1)[1] if header and b"\n" in data else (b"" if header else data)
    if not body.strip():
        return TickTable([], [], *(np.empty(0, dtype=np.int64) for _ in range(5)))
    try:
        frame = pd.read_csv(
            io.BytesIO(data), header=None, skiprows=int(header), names=TICK_FIELDS,
            dtype={"symbol": "category", "day": "category", "time": np.int64,
                   "price": np.int64, "quantity": np.int64},
            skip_blank_lines=True, engine="c", na_filter=False,
        )
    except (ValueError, pd.errors.ParserError):
        slow_path()

    symbols, sym_code = _recode(frame["symbol"].cat, str.strip)
    try:
        days, day_code = _recode(frame["day"].cat, _parse_date)
    except ValueError:
        slow_path()
    if any(not s for s in symbols):
        slow_path()
    t = frame["time"].to_numpy(np.int64)
    price = frame["price"].to_numpy(np.int64)
    qty = frame["quantity"].to_numpy(np.int64)

    def first_bad(mask):
        # line numbers ignore blank lines, which pandas skips
        return int(np.flatnonzero(mask)[0]) + offset

    if (price <= 0).any():
        i = first_bad(price <= 0)
        raise ValidationError(f"non-positive price {price[i - offset]}", _true_line(data, i))
    if (qty <= 0).any():
        i = first_bad(qty <= 0)
        raise ValidationError(f"non-positive quantity {qty[i - offset]}", _true_line(data, i))
    limit = session.length_seconds
    outside = (t < 0) | (t > limit)
    if outside.any():
        if strict:
            i = first_bad(outside)
            raise ValidationError(f"time {t[i - offset]}s outside session [0, {limit}]",
                                  _true_line(data, i))
    keep = ~outside
    # categories are sorted lexically; ISO dates sort chronologically
    return TickTable(
        symbols, days,
        sym_code[keep], day_code[keep],
        t[keep], price[keep], qty[keep],
    )


def _recode(cat, convert):
    """Apply ``convert`` to the categories, merge duplicates, sort, and remap codes."""
    values = [convert(str(c)) for c in cat.categories]
    uniq = sorted(set(values))
    pos = {v: i for i, v in enumerate(uniq)}
    lookup = np.array([pos[v] for v in values], dtype=np.int64)
    return uniq, lookup[cat.codes.to_numpy()] if len(lookup) else cat.codes.to_numpy().astype(np.int64)


def _true_line(data: bytes, record_line: int) -> int:
    """Map the n-th non-blank line to its physical line number."""
    count = 0
    for lineno, line in enumerate(data.split(b"\n"), start=1):
        if line.strip():
            count += 1
            if count == record_line:
                return lineno
    return record_line


# -- calendar and study configuration --------------------------------------

def read_calendar(source) -> list[date]:
    """Trading dates, one ``YYYY-MM-DD`` per line, strictly increasing."""
    days: list[date] = []
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            d = _parse_date(line)
        except ValueError:
            raise ParseError(f"bad calendar date {line!r}", lineno) from None
        if days and d <= days[-1]:
            raise ValidationError(f"calendar dates must increase ({d} after {days[-1]})",
                                  lineno)
        days.append(d)
    return days


def write_calendar(days: Iterable[date], fh: IO[str]) -> None:
    for d in days:
        fh.write(d.isoformat() + "\n")


def parse_key_values(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _config_date(values: dict[str, str], key: str) -> date:
    if key not in values:
        raise ConfigError(f"missing key {key!r}")
    try:
        return _parse_date(values[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: bad date {values[key]!r}") from None


def _config_clock(values: dict[str, str], key: str, default: clock_time) -> clock_time:
    if key not in values:
        return default
    try:
        return datetime.strptime(values[key], "%H:%M").time()
    except ValueError:
        raise ConfigError(f"key {key!r}: expected HH:MM, got {values[key]!r}") from None


def load_study_config(path) -> StudyConfig:
    """Read a study configuration file.

    Keys: ``event_date``, ``window.N.start``, ``window.N.end``,
    ``session.open``, ``session.close``, ``symbols_file``. Omitted windows
    fall back to the three default windows; an omitted ``symbols_file``
    means every symbol present in the tick file.
    """
    path = Path(path)
    values = parse_key_values(path.read_text(encoding="utf-8"))
    known = {"event_date", "session.open", "session.close", "symbols_file"}
    indices = set()
    for key in values:
        if key.startswith("window."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in ("start", "end") or not parts[1].isdigit():
                raise ConfigError(f"unknown key {key!r}")
            indices.add(int(parts[1]))
        elif key not in known:
            raise ConfigError(f"unknown key {key!r}")
    event = _config_date(values, "event_date") if "event_date" in values else EVENT_DATE
    windows = [
        (_config_date(values, f"window.{n}.start"), _config_date(values, f"window.{n}.end"))
        for n in sorted(indices)
    ] or list(DEFAULT_WINDOWS)
    session = SessionSpec(
        _config_clock(values, "session.open", DEFAULT_SESSION.open_time),
        _config_clock(values, "session.close", DEFAULT_SESSION.close_time),
    )
    symbols = None
    if "symbols_file" in values:
        sym_path = Path(values["symbols_file"])
        if not sym_path.is_absolute():
            sym_path = path.parent / sym_path
        try:
            text = sym_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"key 'symbols_file': cannot read {sym_path}: {exc}") from None
        symbols = [s.strip() for s in text.splitlines() if s.strip()]
    return StudyConfig(event, windows, symbols, session)


def format_study_config(cfg: StudyConfig, symbols_file: str | None = None) -> str:
    lines = [f"event_date = {cfg.event_date.isoformat()}"]
    for n, (start, end) in enumerate(cfg.windows, start=1):
        lines.append(f"window.{n}.start = {start.isoformat()}")
        lines.append(f"window.{n}.end = {end.isoformat()}")
    lines.append(f"session.open = {cfg.session.open_time.strftime('%H:%M')}")
    lines.append(f"session.close = {cfg.session.close_time.strftime('%H:%M')}")
    if symbols_file:
        lines.append(f"symbols_file = {symbols_file}")
    return "\n".join(lines) + "\n"
