"""Intraday realized variance and DFT amplitude event studies around a price-limit change."""

from .analysis import analyze, write_results
from .event_study import cross_section, frequency_profile
from .market_data import (
    DEFAULT_SESSION, EVENT_DATE, DEFAULT_WINDOWS, DaySet, SessionSpec, StudyConfig, Tick,
    TickTable, parse_ticks, read_calendar, read_tick_table, split_days,
)
from .resample import build_five_minute_returns, build_minute_vector, locf_price
from .spectral import (
    amplitude_spectrum, amplitude_vector, dft_coefficients, period_amplitude,
    spectral_change_rate,
)
from .synth import SynthConfig, apply_price_limit, generate_dataset, simulate_day
from .volatility import period_volatility, realized_variance, rv_change_rate

__version__ = "0.1.0"
