import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specvol.exceptions import NoPriceYet
from specvol.market_data import Tick
from specvol.resample import (
    NO_PRICE_AT_FIRST_MINUTE, NO_PRICE_AT_OPEN, build_five_minute_returns,
    build_minute_vector, five_minute_offsets, locf_price, minute_offsets, resample_days,
)
from specvol.synth import SynthConfig, simulate_day, weekdays

DAY = date(2015, 6, 15)


def ticks_of(pairs, symbol="A"):
    return [Tick(symbol, DAY, t, p, 1) for t, p in pairs]


def brute_force_sample(ticks, offset):
    """Scan every tick; the latest time <= offset wins, later input wins ties."""
    best_time, best_price = None, None
    for tick in ticks:
        if tick.time <= offset and (best_time is None or tick.time >= best_time):
            best_time, best_price = tick.time, tick.price
    return best_price


def oracle_grids(ticks):
    """Returns the brute-force price grids; logs are left to the caller."""
    five = np.array([brute_force_sample(ticks, 300 * k) for k in range(71)], dtype=float)
    minute = np.array([brute_force_sample(ticks, 60 * j) for j in range(1, 350)], dtype=float)
    return five, minute


def synthetic_day(seed, rate=1.0, stock=0):
    cfg = SynthConfig(n_stocks=1, days=[DAY], seed=seed, vol_before=0.002, vol_after=0.002,
                      trade_rate=rate)
    d = simulate_day(cfg, stock, 0)
    return [Tick("A", DAY, int(t), int(p), int(q)) for t, p, q in
            zip(d.times, d.prices, d.quantities)]


def test_grid_sizes():
    assert len(five_minute_offsets()) == 71
    assert five_minute_offsets()[-1] == 21000
    m = minute_offsets()
    assert len(m) == 349 and m[0] == 60 and m[-1] == 20940


class TestLocf:
    def test_last_before(self):
        ticks = ticks_of([(10, 100), (130, 102)])
        assert locf_price(ticks, 120) == 100
        assert locf_price(ticks, 130) == 102

    def test_no_price_yet(self):
        with pytest.raises(NoPriceYet):
            locf_price(ticks_of([(10, 100)]), 5)

    def test_same_second_takes_last_in_input_order(self):
        ticks = ticks_of([(0, 100), (50, 101), (50, 99)])
        assert locf_price(ticks, 60) == 99
        assert build_minute_vector(ticks).values[0] == math.log(99)

    def test_dense_day_matches_minute_bucket_close(self):
        ticks = synthetic_day(seed=3, rate=30.0)
        vec = build_minute_vector(ticks).values
        for j in range(1, 350):
            bucket = [t for t in ticks if 60 * (j - 1) < t.time <= 60 * j]
            assert bucket, "dense day must trade every minute"
            assert vec[j - 1] == math.log(bucket[-1].price)
            assert locf_price(ticks, 60 * j) == bucket[-1].price


class TestFiveMinuteReturns:
    def test_constant_price(self):
        r = build_five_minute_returns(ticks_of([(0, 5000), (9000, 5000)])).returns
        assert r.shape == (70,)
        assert np.all(r == 0.0)

    def test_doubling_each_mark(self):
        ticks = ticks_of([(300 * k, 2**k) for k in range(71)])
        r = build_five_minute_returns(ticks).returns
        assert np.all(r == math.log(2.0))

    def test_requires_open_price(self):
        with pytest.raises(NoPriceYet):
            build_five_minute_returns(ticks_of([(1, 100)]))

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_matches_oracle(self, seed):
        ticks = synthetic_day(seed)
        five, _ = oracle_grids(ticks)
        got = build_five_minute_returns(ticks).returns
        # sampled prices agree exactly, so the ratio form reproduces bit for bit
        np.testing.assert_array_equal(got, np.log(five[1:] / five[:-1]))
        scalar = [math.log(five[k] / five[k - 1]) for k in range(1, 71)]
        np.testing.assert_allclose(got, scalar, rtol=1e-15, atol=1e-18)


class TestMinuteVector:
    def test_constant_price(self):
        v = build_minute_vector(ticks_of([(0, 777)])).values
        assert v.shape == (349,)
        assert np.all(v == math.log(777))

    def test_excludes_open_and_close(self):
        ticks = ticks_of([(0, 100), (1, 200), (20941, 300)])
        v = build_minute_vector(ticks).values
        assert np.all(v == math.log(200))

    def test_requires_first_minute_price(self):
        build_minute_vector(ticks_of([(60, 100)]))
        with pytest.raises(NoPriceYet):
            build_minute_vector(ticks_of([(61, 100)]))

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_matches_oracle(self, seed):
        ticks = synthetic_day(seed)
        _, minute = oracle_grids(ticks)
        got = build_minute_vector(ticks).values
        np.testing.assert_array_equal(np.exp(got).round(), minute)
        np.testing.assert_array_equal(got, np.log(minute))


class TestResampleDays:
    def test_batch_matches_single_day_and_reasons(self):
        days = weekdays(date(2015, 6, 1), date(2015, 6, 12))
        cfg = SynthConfig(n_stocks=1, days=days, seed=5, trade_rate=0.7)
        per_day = []
        for i in range(len(days)):
            d = simulate_day(cfg, 0, i)
            per_day.append(list(zip(d.times.tolist(), d.prices.tolist())))
        # day 3: drop the opening tick so only the minute grid survives
        per_day[3] = [(t, p) for t, p in per_day[3] if t > 0] or [(30, 100)]
        per_day[3] = [(30, per_day[3][0][1])] + per_day[3]
        # day 6: nothing before 61 s
        per_day[6] = [(t, p) for t, p in per_day[6] if t > 60]
        code = np.concatenate([np.full(len(p), i) for i, p in enumerate(per_day)])
        times = np.concatenate([[t for t, _ in p] for p in per_day]).astype(np.int64)
        prices = np.concatenate([[x for _, x in p] for p in per_day]).astype(float)
        grids = resample_days(code, times, prices)

        assert grids.reasons[3] == NO_PRICE_AT_OPEN
        assert grids.reasons[6] == NO_PRICE_AT_OPEN
        assert all(r is None for i, r in enumerate(grids.reasons) if i not in (3, 6))
        assert np.isnan(grids.returns[3]).all() and np.isnan(grids.log_prices[6]).all()
        for i, pairs in enumerate(per_day):
            if grids.reasons[i] is not None:
                continue
            ticks = ticks_of(pairs)
            np.testing.assert_array_equal(grids.returns[i], build_five_minute_returns(ticks).returns)
            np.testing.assert_array_equal(grids.log_prices[i], build_minute_vector(ticks).values)

    def test_open_price_implies_first_minute_price(self):
        # a trade at or before the open is also at or before 60 s
        grids = resample_days(np.array([0]), np.array([0]), np.array([5.0]))
        assert grids.reasons == [None]
        assert NO_PRICE_AT_FIRST_MINUTE not in grids.reasons


tick_times = st.lists(st.tuples(st.integers(0, 21000), st.integers(1, 10**6)),
                      min_size=1, max_size=60)


@settings(max_examples=80, deadline=None)
@given(tick_times, st.lists(st.integers(0, 21000), max_size=40))
def test_inserting_locf_consistent_ticks_is_invisible(pairs, extra_times):
    ticks = ticks_of([(0, 1000)] + sorted(pairs, key=lambda x: x[0]))
    grid_points = set(range(0, 21001, 300)) | set(range(60, 20941, 60))
    extra = []
    for t in extra_times:
        if t in grid_points:
            continue
        extra.append(Tick("A", DAY, t, locf_price(ticks, t), 1))
    # an extra tick must land after every original tick at the same second
    merged = sorted(ticks + extra, key=lambda k: k.time)
    r0, v0 = build_five_minute_returns(ticks).returns, build_minute_vector(ticks).values
    r1, v1 = build_five_minute_returns(merged).returns, build_minute_vector(merged).values
    np.testing.assert_array_equal(r0, r1)
    np.testing.assert_array_equal(v0, v1)


@settings(max_examples=80, deadline=None)
@given(tick_times, st.floats(0.01, 100.0))
def test_price_scaling(pairs, c):
    ticks = ticks_of([(0, 1000)] + pairs)
    times = np.array([t.time for t in ticks])
    prices = np.array([t.price for t in ticks], dtype=float)
    order = np.argsort(times, kind="stable")
    code = np.zeros(len(ticks), dtype=np.int64)
    base = resample_days(code, times[order], prices[order])
    scaled = resample_days(code, times[order], c * prices[order])
    np.testing.assert_allclose(scaled.log_prices, base.log_prices + math.log(c), rtol=0, atol=1e-12)
    np.testing.assert_allclose(scaled.returns, base.returns, rtol=0, atol=1e-12)
