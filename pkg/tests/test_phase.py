import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypofhr.core import Recording, TimeSpan
from hypofhr.phase import (
    Phase,
    boxplot_summary,
    cohort_phase_report,
    phase_windows,
    window_stats,
)

from conftest import ev, fhr, spo2


class TestWindows:
    def test_basic(self):
        w = phase_windows(TimeSpan(50, 80), TimeSpan(0, 1000))
        assert (w.pre, w.during, w.post) == (TimeSpan(40, 50), TimeSpan(50, 80), TimeSpan(80, 90))
        assert not w.pre_clipped and not w.post_clipped

    def test_pre_clipped(self):
        w = phase_windows(TimeSpan(5, 30), TimeSpan(0, 1000))
        assert w.pre == TimeSpan(0, 5) and w.pre_clipped

    def test_post_empty(self):
        w = phase_windows(TimeSpan(950, 1000), TimeSpan(0, 1000))
        assert w.post.duration() == 0 and w.post_clipped

    @settings(max_examples=1000, deadline=None)
    @given(st.floats(0, 900), st.floats(0.5, 100))
    def test_tiling(self, s, d):
        w = phase_windows(TimeSpan(s, s + d), TimeSpan(0, 1000))
        assert w.pre.end == w.during.start and w.during.end == w.post.start


class TestWindowStats:
    def test_constant(self):
        st_ = window_stats(fhr(np.full(40, 140.0)), TimeSpan(0, 10))
        assert (st_.mean, st_.std, st_.cv) == (140, 0, 0)

    def test_two_point(self):
        st_ = window_stats(fhr([130, 150], rate=1), TimeSpan(0, 2))
        assert st_.mean == 140 and st_.std == 10
        assert st_.cv == pytest.approx(1 / 14, abs=1e-15)

    def test_mostly_invalid(self):
        vals = np.full(10, 140.0)
        vals[:6] = np.nan
        st_ = window_stats(fhr(vals, rate=1), TimeSpan(0, 10))
        assert not st_.available and st_.n_valid == 4

    def test_empty(self):
        assert not window_stats(fhr([140.0] * 4), TimeSpan(5, 5)).available

    def test_sample_std_option(self):
        st_ = window_stats(fhr([130, 150], rate=1), TimeSpan(0, 2), ddof=1)
        assert st_.std == pytest.approx(math.sqrt(200))

    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.floats(60, 220), min_size=4, max_size=40), st.randoms(use_true_random=False))
    def test_permutation_and_cv(self, values, rnd):
        a = window_stats(fhr(values, rate=1), TimeSpan(0, len(values)))
        shuffled = list(values)
        rnd.shuffle(shuffled)
        b = window_stats(fhr(shuffled, rate=1), TimeSpan(0, len(values)))
        assert a.mean == pytest.approx(b.mean, rel=1e-12)
        assert a.std == pytest.approx(b.std, rel=1e-9, abs=1e-9)
        assert abs(a.cv - a.std / a.mean) <= 1e-12
        assert a.n_valid <= len(values)


class TestBoxplot:
    def test_five(self):
        b = boxplot_summary([1, 2, 3, 4, 5])
        assert (b.q1, b.median, b.q3, b.outliers) == (2, 3, 4, ())

    def test_outlier(self):
        b = boxplot_summary([1, 1, 1, 1, 100])
        assert b.outliers == (100,) and b.whisker_high == 1

    def test_single(self):
        b = boxplot_summary([7])
        assert {b.q1, b.median, b.q3, b.whisker_low, b.whisker_high} == {7}

    def test_empty(self):
        with pytest.raises(ValueError):
            boxplot_summary([])

    def test_matches_numpy_linear_quantiles(self):
        data = [3.1, 9, 2, 7.5, 4, 4, 11, 0.5]
        b = boxplot_summary(data)
        q1, med, q3 = np.quantile(data, [0.25, 0.5, 0.75], method="linear")
        assert (b.q1, b.median, b.q3) == (q1, med, q3)

    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=41).filter(lambda v: len(v) % 2 == 1))
    def test_invariants(self, values):
        b = boxplot_summary(values)
        assert b.q1 <= b.median <= b.q3
        assert min(values) <= b.whisker_low <= b.whisker_high <= max(values)
        assert boxplot_summary(values + [b.median]).median == b.median


class TestCohortReport:
    def test_accelerating_pattern(self):
        x = np.full(4 * 400, 140.0)
        x[4 * 100:4 * 130] = 150.0
        rec = Recording("P1", "A", spo2(np.full(400, 97.0)), fhr(x), (ev("hypoxia", 100, 130),))
        rep = cohort_phase_report([rec], {"P1": rec.events(rec.annotations[0].kind)})
        assert rep.n_events == 1
        assert rep.grand_means["pre"]["mean"] == 140
        assert rep.grand_means["during"]["mean"] == 150
        assert rep.grand_means["post"]["mean"] == 140
        d = rep.to_dict()
        assert set(d["phases"]) == {"pre", "during", "post"}
        assert d["phases"]["during"]["mean"]["box"]["median"] == 150

    def test_empty(self):
        rec = Recording("P1", "A", spo2(np.full(100, 97.0)), fhr(np.full(400, 140.0)))
        rep = cohort_phase_report([rec], {})
        assert rep.empty and rep.reason

    def test_phase_enum_values(self):
        assert [p.value for p in Phase] == ["pre", "during", "post"]
