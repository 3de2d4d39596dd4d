"""Tests for ``segmentation.py``."""

import numpy as np
import pytest
from astropy.utils.exceptions import AstropyUserWarning
from numpy.testing import assert_allclose

from ..dataset import Activity, SensorSession, downsample
from ..logger import log
from ..segmentation import (Window, WindowSpec, activity_runs, cap_instances,
                            instance_target, largest_remainder,
                            reference_distribution, rescale_window, segment,
                            window_plan)
from .helpers import make_session, make_sessions


def _windows(counts, user_id=1):
    """Dummy windows, ``counts`` maps activity to number of windows."""
    out = []
    for a, n in counts.items():
        for i in range(n):
            out.append(Window(user_id=user_id, activity=Activity(a),
                              start_index=10 * i,
                              samples=np.zeros((2, 27))))
    return out


class TestWindowSpec(object):
    @pytest.mark.parametrize(
        ('size', 'overlap', 'raw_step', 'step'),
        [(500, 0.5, 250, 250),
         (250, 0.8, 50, 50),
         (900, 0.0, 900, 900),
         (3, 0.9, 0, 1),
         (100, 0.7, 30, 30)])
    def test_step(self, size, overlap, raw_step, step):
        spec = WindowSpec(size, overlap)
        assert spec.raw_step == raw_step
        assert spec.step == step

    @pytest.mark.parametrize(('size', 'overlap'),
                             [(0, 0.5), (2.5, 0.5), (10, 1.0), (10, -0.1)])
    def test_invalid(self, size, overlap):
        with pytest.raises(ValueError):
            WindowSpec(size, overlap)

    @pytest.mark.parametrize(
        ('size', 'hz', 'ans'),
        [(900, 100, 900), (900, 1, 9), (50, 1, 0), (250, 12.5, 31),
         (150, 1, 1), (300, 5, 15)])
    def test_rescale(self, size, hz, ans):
        assert rescale_window(size, hz) == ans


class TestWindowPlan(object):
    @pytest.mark.parametrize(
        ('run_length', 'size', 'overlap', 'ans'),
        [(1000, 500, 0.5, [0, 250, 500]),
         (50, 50, 0.0, [0]),
         (49, 50, 0.0, []),
         (120, 50, 0.0, [0, 50]),
         (5, 3, 0.9, [0, 1, 2])])
    def test_examples(self, run_length, size, overlap, ans):
        assert window_plan(run_length, WindowSpec(size, overlap)) == ans

    @pytest.mark.parametrize('size', range(50, 901, 50))
    def test_brute_force(self, size):
        rng = np.random.default_rng(size)
        for overlap in range(10):
            spec = WindowSpec(size, overlap / 10)
            for run_length in rng.integers(0, 10001, 100):
                starts = np.arange(run_length)
                ans = starts[(starts % spec.step == 0) &
                             (starts + size <= run_length)]
                assert window_plan(int(run_length), spec) == list(ans)


class TestSegment(object):
    def test_runs(self):
        session = make_session(1, [(2, 100), (5, 120)])
        windows = segment([session], WindowSpec(50, 0))
        assert len(windows) == 4
        assert [w.activity for w in windows] == [Activity.A2] * 2 + \
            [Activity.A5] * 2
        assert [w.start_index for w in windows] == [0, 50, 100, 150]
        for w in windows:
            assert w.samples.shape == (50, 27)
            assert np.all(session.labels[w.start_index:w.start_index + 50] ==
                          int(w.activity))

    def test_short_run(self):
        session = make_session(1, [(2, 40), (5, 60)])
        windows = segment([session], WindowSpec(50, 0))
        assert [w.activity for w in windows] == [Activity.A5]

    def test_overlap(self):
        spec = WindowSpec(200, 0.7)
        windows = segment([make_session(1, [(9, 1000)])], spec)
        for a, b in zip(windows[:-1], windows[1:]):
            shared = a.start_index + spec.size - b.start_index
            assert shared == spec.size - spec.step

    def test_gap_splits_run(self):
        base = make_session(1, [(2, 100)])
        timestamps = base.timestamps.copy()
        timestamps[60:] += 5
        session = SensorSession(user_id=1, frequency_hz=100,
                                channels=base.channels, labels=base.labels,
                                timestamps=timestamps)
        assert activity_runs(session) == [(0, 60, Activity.A2),
                                          (60, 100, Activity.A2)]
        assert len(segment([session], WindowSpec(70, 0))) == 0
        assert len(segment([base], WindowSpec(70, 0))) == 1

    def test_mixed_frequencies(self):
        sessions = make_sessions(users=(1, 2), run_length=100)
        sessions[1] = downsample(sessions[1], 50)
        with pytest.raises(ValueError, match='mixed frequencies'):
            segment(sessions, WindowSpec(10, 0))

    def test_empty(self):
        assert segment([], WindowSpec(10, 0)) == []


class TestCapInstances(object):
    def test_example(self):
        windows = _windows({1: 6, 2: 4})
        dist = {Activity.A1: 0.6, Activity.A2: 0.4}
        selected = cap_instances(windows, 5, dist, seed=0)
        acts = [w.activity for w in selected]
        assert acts.count(Activity.A1) == 3
        assert acts.count(Activity.A2) == 2
        assert [w.sort_key for w in selected] == \
            sorted(w.sort_key for w in selected)

    def test_identity(self):
        windows = _windows({1: 3, 2: 2})
        dist = {Activity.A1: 0.6, Activity.A2: 0.4}
        assert cap_instances(windows, 5, dist, seed=0) is windows
        assert cap_instances(windows, 50, dist, seed=0) is windows

    def test_order_invariant(self):
        windows = _windows({1: 20, 2: 10}, user_id=3) + _windows({1: 7})
        dist = reference_distribution(windows)
        ans = [w.sort_key for w in cap_instances(windows, 12, dist, seed=7)]
        rng = np.random.default_rng(0)
        for _ in range(5):
            shuffled = [windows[i] for i in rng.permutation(len(windows))]
            got = cap_instances(shuffled, 12, dist, seed=7)
            assert [w.sort_key for w in got] == ans

    def test_seed(self):
        windows = _windows({1: 50, 2: 50})
        dist = reference_distribution(windows)
        a = cap_instances(windows, 10, dist, seed=1)
        b = cap_instances(windows, 10, dist, seed=1)
        assert [w.sort_key for w in a] == [w.sort_key for w in b]

    def test_shortfall_redistributed(self):
        windows = _windows({1: 8, 2: 1})
        dist = {Activity.A1: 0.5, Activity.A2: 0.5}
        acts = [w.activity for w in cap_instances(windows, 6, dist, seed=0)]
        assert acts.count(Activity.A1) == 5
        assert acts.count(Activity.A2) == 1

    def test_shortfall_warns(self):
        windows = _windows({1: 2, 2: 2, 3: 5})
        dist = {Activity.A1: 0.5, Activity.A2: 0.5}
        with pytest.warns(AstropyUserWarning, match='Only 4 windows'):
            selected = cap_instances(windows, 6, dist, seed=0)
        assert len(selected) == 4

    def test_excluded_activity_logged(self):
        windows = _windows({1: 6, 2: 4, 3: 3})
        dist = {Activity.A1: 0.5, Activity.A2: 0.5}
        level = log.level
        log.setLevel('INFO')
        try:
            with log.log_to_list() as messages:
                selected = cap_instances(windows, 6, dist, seed=0)
        finally:
            log.setLevel(level)
        assert {w.activity for w in selected} == {Activity.A1, Activity.A2}
        assert any('windows discarded: A3 (3)' in m.getMessage()
                   for m in messages)

    @pytest.mark.parametrize(
        ('target', 'dist', 'match'),
        [(5, {Activity.A1: 0.5, Activity.A2: 0.4}, 'sum to 1'),
         (1, {Activity.A1: 0.5, Activity.A2: 0.5}, 'below the number'),
         (5, {Activity.A1: 0.5, Activity.A3: 0.5}, 'A3')])
    def test_errors(self, target, dist, match):
        windows = _windows({1: 6, 2: 4})
        with pytest.raises(ValueError, match=match):
            cap_instances(windows, target, dist, seed=0)


class TestApportionment(object):
    @pytest.mark.parametrize(
        ('total', 'weights', 'ans'),
        [(5, {1: 0.6, 2: 0.4}, {1: 3, 2: 2}),
         (10, {1: 1, 2: 1, 3: 1}, {1: 4, 2: 3, 3: 3}),
         (7, {1: 0.5, 2: 0.25, 3: 0.25}, {1: 3, 2: 2, 3: 2}),
         (0, {1: 0.5, 2: 0.5}, {1: 0, 2: 0})])
    def test_largest_remainder(self, total, weights, ans):
        assert largest_remainder(total, weights) == ans

    def test_sums_to_total(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            weights = dict(enumerate(rng.random(12)))
            total = int(rng.integers(0, 3000))
            seats = largest_remainder(total, weights)
            assert sum(seats.values()) == total
            exact = total * np.array(list(weights.values())) / \
                sum(weights.values())
            assert np.all(np.abs(np.array(list(seats.values())) - exact) < 1)

    def test_zero_weights(self):
        with pytest.raises(ValueError):
            largest_remainder(3, {1: 0})

    def test_distribution(self):
        dist = reference_distribution(_windows({1: 3, 4: 1}))
        assert list(dist) == [Activity.A1, Activity.A4]
        assert_allclose(list(dist.values()), [0.75, 0.25])
        with pytest.raises(ValueError):
            reference_distribution([])


class TestInstanceTarget(object):
    @pytest.mark.parametrize('hz', [100, 50, 12.5])
    def test_reference(self, hz):
        sessions = [downsample(s, hz)
                    for s in make_sessions(users=(1, 2), run_length=1000)]
        count, dist = instance_target(sessions)
        assert count == 6
        assert list(dist) == [Activity.A2, Activity.A5, Activity.A9]
        assert_allclose(list(dist.values()), [1 / 3] * 3)

    def test_too_short(self):
        with pytest.raises(ValueError):
            instance_target(make_sessions(users=(1,), run_length=500))
