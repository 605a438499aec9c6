from datetime import date

import numpy as np
import pytest

from specvol.synth import SynthConfig, weekdays

ACCEPTANCE_LINES = []


def record_acceptance(criterion, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_days():
    return weekdays(date(2015, 5, 18), date(2015, 7, 10))


@pytest.fixture
def small_cfg(small_days):
    return SynthConfig(n_stocks=4, days=small_days, seed=7, vol_before=0.001,
                       vol_after=0.0012, trade_rate=2.0)


SYNTH_CONFIG_TEXT = """\
seed = 99
n_stocks = 5
start_date = 2015-05-04
end_date = 2015-07-31
event_date = 2015-06-15
vol_before = 0.001
vol_after = 0.0011
injected = 2:0.002:0.004
trade_rate = 1.5
base_price = 40000
"""


@pytest.fixture
def synth_config_file(tmp_path):
    path = tmp_path / "synth.cfg"
    path.write_text(SYNTH_CONFIG_TEXT)
    return path
