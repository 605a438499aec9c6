import math
import statistics

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from specvol.event_study import (
    CrossSectionSummary, assemble_report, cross_section, frequency_profile, window_dirname,
)
from specvol.exceptions import InsufficientSampleError

values = st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=60)


def test_one_two_three():
    s = cross_section([1.0, 2.0, 3.0], "w")
    assert (s.n, s.mean, s.sd) == (3, 2.0, 1.0)
    assert s.se == pytest.approx(1 / math.sqrt(3), rel=1e-15)
    assert s.t_stat == pytest.approx(2 * math.sqrt(3), rel=1e-15)


def test_matches_statistics_module(rng):
    x = rng.normal(0.09, 0.05, 200)
    s = cross_section(x)
    assert s.mean == pytest.approx(statistics.fmean(x), rel=1e-14)
    assert s.sd == pytest.approx(statistics.stdev(x), rel=1e-13)
    assert s.t_stat == pytest.approx(statistics.fmean(x) / (statistics.stdev(x) / math.sqrt(200)),
                                     rel=1e-13)


def test_all_zero_is_degenerate():
    s = cross_section([0.0, 0.0, 0.0])
    assert s.degenerate and s.mean == 0.0 and math.isnan(s.t_stat)


def test_needs_two_values():
    with pytest.raises(InsufficientSampleError):
        cross_section([0.5])


def test_two_stock_profile():
    f = np.zeros((2, 174))
    f[:, 6] = [0.1, 0.3]
    f[1, :6] = 1e-3
    p = frequency_profile(f, "win")
    assert p.mean[6] == pytest.approx(0.2, rel=1e-15)
    assert p.sd[6] == pytest.approx(math.sqrt(0.02), rel=1e-14)
    assert p.se[6] == pytest.approx(0.1, rel=1e-14)
    assert p.lo[6] == pytest.approx(-0.03, abs=1e-14)
    assert p.hi[6] == pytest.approx(0.43, abs=1e-14)
    assert list(p.significant()) == []
    assert p.w[6] == 7


def test_identical_spectra_give_zero_mean():
    p = frequency_profile(np.zeros((5, 174)))
    assert np.all(p.mean == 0.0)


def test_nan_dropped_per_frequency():
    f = np.array([[0.1, np.nan], [0.2, 0.4], [0.3, 0.6]])
    p = frequency_profile(f)
    assert list(p.n) == [3, 2]
    assert p.mean[1] == pytest.approx(0.5)


def test_profile_names_thin_frequency():
    f = np.array([[0.1, np.nan], [0.2, np.nan], [0.3, 0.6]])
    with pytest.raises(InsufficientSampleError, match="w=2"):
        frequency_profile(f)


@settings(max_examples=100, deadline=None)
@given(values, st.floats(-10, 10))
def test_translation_equivariance(x, c):
    a, b = cross_section(x), cross_section([v + c for v in x])
    assert b.mean == pytest.approx(a.mean + c, abs=1e-12)
    assert b.sd == pytest.approx(a.sd, abs=1e-9)
    assert b.se == pytest.approx(a.se, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(values, st.floats(0.01, 100).flatmap(lambda c: st.sampled_from([c, -c])))
def test_t_stat_scale_invariant_up_to_sign(x, c):
    a = cross_section(x)
    assume(a.sd > 1e-6 * max(1.0, max(abs(v) for v in x)))
    b = cross_section([c * v for v in x])
    assert b.t_stat == pytest.approx(math.copysign(1, c) * a.t_stat, rel=1e-9, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4),
                min_size=2, max_size=20))
def test_k_zero_collapses_bounds(rows):
    p = frequency_profile(np.array(rows), k=0.0)
    assert np.array_equal(p.lo, p.mean) and np.array_equal(p.hi, p.mean)


def test_report_files(tmp_path, rng):
    label = "2015-01-05..2015-12-30"
    f = rng.normal(size=(3, 174))
    s = cross_section([0.1, 0.2, 0.4], label)
    written = assemble_report(tmp_path, [s], [frequency_profile(f, label)], {})
    assert [p.relative_to(tmp_path).as_posix() for p in written] == [
        "summary.csv", "profile.csv", "2015-01-05_to_2015-12-30/exclusions.csv"]
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0] == "window_label,n,mean,sd,se,t_stat"
    assert len(summary) == 2 and summary[1].startswith(label + ",3,")
    fields = summary[1].split(",")
    assert float(fields[2]) == s.mean and float(fields[5]) == s.t_stat
    profile = (tmp_path / "profile.csv").read_text().splitlines()
    assert profile[0] == "window_label,w,n_w,mean_w,se_w,lo_w,hi_w"
    assert len(profile) == 175
    assert profile[-1].startswith(label + ",174,3,")
    assert (tmp_path / window_dirname(label) / "exclusions.csv").read_text() == "symbol,day,reason\n"


def test_exclusions_sorted(tmp_path):
    label = "a..b"
    s = CrossSectionSummary(label, 2, 0.0, 1.0, 1.0, 0.0)
    assemble_report(tmp_path, [s], [], {label: [("B", "", "no_ticks"),
                                                ("A", "2015-06-16", "no_price_at_open")]})
    lines = (tmp_path / "a_to_b" / "exclusions.csv").read_text().splitlines()
    assert lines == ["symbol,day,reason", "A,2015-06-16,no_price_at_open", "B,,no_ticks"]
