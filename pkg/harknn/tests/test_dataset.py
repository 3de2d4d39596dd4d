"""Tests for ``dataset.py``."""

import numpy as np
import pytest
from astropy.utils.exceptions import AstropyUserWarning
from numpy.testing import assert_allclose, assert_array_equal

from ..dataset import (CHANNEL_NAMES, FREQUENCIES, Activity, ActivityTable,
                       PAMAP2ParseError, SensorSession, activity_table, clean,
                       downsample, load_pamap2, load_sessions, save_sessions,
                       split_loso, summarize)
from .helpers import make_session, make_sessions, pamap2_rows, write_pamap2


class TestActivityTable(object):
    def setup_class(self):
        self.table = activity_table()

    @pytest.mark.parametrize(
        ('dataset_id', 'code', 'name'),
        [(12, Activity.A1, 'ascending stairs'),
         (6, Activity.A2, 'cycling'),
         (1, Activity.A5, 'lying'),
         (24, Activity.A7, 'rope jumping'),
         (4, Activity.A12, 'walking')])
    def test_mapping(self, dataset_id, code, name):
        assert self.table.from_dataset_id(dataset_id) is code
        assert self.table.to_dataset_id(code) == dataset_id
        assert code.label == name

    def test_bijective(self):
        ids = [self.table.to_dataset_id(a) for a in Activity]
        assert len(set(ids)) == 12
        assert [self.table.from_dataset_id(i) for i in ids] == list(Activity)
        assert self.table.transient_id not in ids

    def test_dataset_ids(self):
        assert self.table.dataset_ids == (1, 2, 3, 4, 5, 6, 7, 12, 13, 16, 17,
                                          24)

    def test_lookup_array(self):
        lut = self.table.lookup_array()
        assert lut[0] == 0
        assert lut[17] == Activity.A4
        assert lut[8] == -1

    def test_unknown(self):
        with pytest.raises(ValueError, match='Unknown activity ID 9'):
            self.table.from_dataset_id(9)

    def test_bad_definition(self, tmpdir):
        fname = str(tmpdir.join('act.txt'))
        with open(fname, 'w') as fout:
            fout.write('# TRANSIENT_ID = 0\nCODE ACTIVITY_ID NAME\n'
                       'A1 12 stairs\nA2 12 cycling\n')
        with pytest.raises(ValueError):
            ActivityTable(fname)


class TestLoadPamap2(object):
    def test_transient_removed(self, tmpdir):
        session = make_session(1, [(2, 3)])
        rows = pamap2_rows(session)
        rows[1, 1] = 0
        np.savetxt(str(tmpdir.join('subject101.dat')), rows, fmt='%.17g')

        sessions = load_pamap2(str(tmpdir))
        assert len(sessions) == 1
        s = sessions[0]
        assert s.user_id == 1
        assert s.frequency_hz == 100
        assert len(s) == 2
        assert_array_equal(s.labels, [2, 2])
        assert_array_equal(s.timestamps, session.timestamps[[0, 2]])
        assert_array_equal(s.channels, session.channels[[0, 2]])

    def test_empty_dir(self, tmpdir):
        assert load_pamap2(str(tmpdir)) == []

    def test_users_sorted(self, tmpdir):
        write_pamap2(tmpdir, make_sessions(users=(3, 1, 2), run_length=10))
        sessions = load_pamap2(str(tmpdir), max_workers=2)
        assert [s.user_id for s in sessions] == [1, 2, 3]
        assert sessions[0].channel_names == CHANNEL_NAMES

    def test_bad_width(self, tmpdir):
        fname = str(tmpdir.join('subject102.dat'))
        rows = pamap2_rows(make_session(2, [(5, 4)]))
        np.savetxt(fname, rows, fmt='%.17g')
        with open(fname, 'a') as fout:
            fout.write('1.0 1 2.0\n')
        with pytest.raises(PAMAP2ParseError) as exc:
            load_pamap2(str(tmpdir))
        assert exc.value.lineno == 5
        assert exc.value.filename == fname
        assert 'subject102.dat:5' in str(exc.value)

    def test_unknown_activity(self, tmpdir):
        rows = pamap2_rows(make_session(2, [(5, 4)]))
        rows[2, 1] = 9
        np.savetxt(str(tmpdir.join('subject102.dat')), rows, fmt='%.17g')
        with pytest.raises(PAMAP2ParseError,
                           match=r'ID 9 \(known: 1, 2, 3, 4, 5, 6, 7, 12, 13'):
            load_pamap2(str(tmpdir))

    def test_empty_file(self, tmpdir):
        tmpdir.join('subject104.dat').write('')
        with pytest.warns(AstropyUserWarning, match='no data rows'):
            assert load_pamap2(str(tmpdir)) == []


def _session_with(column, values, frequency_hz=100.0):
    n = len(values)
    channels = np.ones((n, 27))
    channels[:, column] = values
    return SensorSession(user_id=1, frequency_hz=frequency_hz,
                         channels=channels, labels=np.full(n, 2),
                         timestamps=np.arange(n) / frequency_hz)


class TestClean(object):
    @pytest.mark.parametrize(
        ('values', 'ans'),
        [((1.0, np.nan, 3.0), (1.0, 2.0, 3.0)),
         ((np.nan, 5.0), (5.0, 5.0)),
         ((4.0, 6.0, np.nan), (4.0, 6.0, 6.0)),
         ((np.nan, 7.0, np.nan), (7.0, 7.0, 7.0))])
    def test_linear(self, values, ans):
        cleaned = clean(_session_with(4, values))
        assert_allclose(cleaned.channels[:, 4], ans)
        assert not np.isnan(cleaned.channels).any()

    def test_unchanged(self):
        session = make_session(1, [(2, 20)])
        assert clean(session) is session

    @pytest.mark.parametrize(
        ('policy', 'ans'),
        [('nearest', (1.0, 1.0, 3.0, 3.0)),
         ('previous', (1.0, 1.0, 1.0, 3.0))])
    def test_other_policies(self, policy, ans):
        cleaned = clean(_session_with(0, (1.0, np.nan, np.nan, 3.0)),
                        policy=policy)
        assert_allclose(cleaned.channels[:, 0], ans)

    def test_drop(self):
        cleaned = clean(_session_with(0, (1.0, np.nan, np.nan, 3.0)),
                        policy='drop')
        assert len(cleaned) == 2
        assert_array_equal(cleaned.timestamps, [0, 0.03])

    def test_all_nan_channel(self):
        with pytest.raises(ValueError, match='chest_gyro_y'):
            clean(_session_with(13, (np.nan, np.nan)))

    def test_bad_policy(self):
        with pytest.raises(ValueError):
            clean(_session_with(0, (1.0, np.nan)), policy='cubic')

    def test_long_gap_dropped(self):
        session = make_session(1, [(2, 300)])
        channels = session.channels.copy()
        channels[100:250, 18:21] = np.nan  # ankle accelerometer, 1.5 s
        channels[10:20, 0] = np.nan  # short single-axis gap
        session = SensorSession(user_id=1, frequency_hz=100.0,
                                channels=channels, labels=session.labels,
                                timestamps=session.timestamps)
        cleaned = clean(session)
        assert len(cleaned) == 150
        assert not np.isnan(cleaned.channels).any()

        cleaned = clean(session, max_gap_seconds=2)
        assert len(cleaned) == 300

    @pytest.mark.parametrize('policy', ['linear', 'previous', 'drop'])
    def test_valid_only_in_dropped_rows(self, policy):
        session = make_session(1, [(2, 400)])
        channels = session.channels.copy()
        channels[:150, 0:3] = np.nan  # wrist accelerometer out for 1.5 s
        channels[150:, 3] = np.nan  # wrist_gyro_x valid only in that outage
        session = SensorSession(user_id=1, frequency_hz=100.0,
                                channels=channels, labels=session.labels,
                                timestamps=session.timestamps)
        with pytest.raises(ValueError,
                           match='Channel wrist_gyro_x of user 1 has no '
                                 'valid value'):
            clean(session, policy=policy)
        # with a 2 s limit the outage is filled, or dropped row by row
        cleaned = clean(session, policy=policy, max_gap_seconds=2)
        assert not np.isnan(cleaned.channels).any()
        assert len(cleaned) == (0 if policy == 'drop' else 400)


class TestDownsample(object):
    def setup_class(self):
        self.session = make_session(1, [(2, 80), (5, 157)])

    @pytest.mark.parametrize('target', FREQUENCIES)
    def test_length(self, target):
        r = int(round(100 / target))
        out = downsample(self.session, target)
        n = len(self.session)
        assert len(out) == (n - 1) // r + 1
        assert out.frequency_hz == target
        assert_array_equal(out.labels, self.session.labels[np.arange(0, n, r)])
        assert_array_equal(out.timestamps,
                           self.session.timestamps[np.arange(0, n, r)])

    def test_12_5(self):
        session = make_session(1, [(2, 80)])
        out = downsample(session, 12.5)
        assert len(out) == 10
        assert_array_equal(out.channels, session.channels[0:80:8])

    def test_identity(self):
        assert downsample(self.session, 100) is self.session

    def test_composition(self):
        session = make_session(1, [(2, 200)])
        twice = downsample(downsample(session, 50), 25)
        assert_array_equal(twice.channels, downsample(session, 25).channels)

    @pytest.mark.parametrize('target', [30, 200])
    def test_unsupported(self, target):
        with pytest.raises(ValueError):
            downsample(self.session, target)

    def test_non_integral(self):
        with pytest.raises(ValueError, match='ratio'):
            downsample(downsample(self.session, 12.5), 5)


class TestCollection(object):
    def setup_class(self):
        self.sessions = make_sessions(users=(1, 2, 3), run_length=50)

    @pytest.mark.parametrize('user', [1, 2, 3])
    def test_split_loso(self, user):
        train, test = split_loso(self.sessions, user)
        assert test.user_id == user
        assert sorted([s.user_id for s in train] + [user]) == [1, 2, 3]
        assert user not in [s.user_id for s in train]

    def test_split_unknown(self):
        with pytest.raises(ValueError, match='User 9'):
            split_loso(self.sessions, 9)

    def test_cache(self, tmpdir):
        save_sessions(self.sessions, str(tmpdir))
        loaded = load_sessions(str(tmpdir))
        assert [s.user_id for s in loaded] == [1, 2, 3]
        assert_array_equal(loaded[1].channels, self.sessions[1].channels)
        assert_array_equal(loaded[1].labels, self.sessions[1].labels)

    def test_load_raw(self, tmpdir):
        write_pamap2(tmpdir, self.sessions)
        loaded = load_sessions(str(tmpdir))
        assert len(loaded) == 3
        assert_array_equal(loaded[0].channels, self.sessions[0].channels)

    def test_summarize(self):
        tab = summarize(self.sessions)
        assert list(tab['user_id']) == [1, 2, 3]
        assert list(tab['n_samples']) == [150] * 3
        assert list(tab['A2']) == [50] * 3
        assert list(tab['A1']) == [0] * 3

    def test_read_only(self):
        with pytest.raises(ValueError):
            self.sessions[0].channels[0, 0] = 1
