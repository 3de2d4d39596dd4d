"""Loading, cleaning and resampling of PAMAP2 recordings.

A PAMAP2 "Protocol" file is a space-separated text table with 54 columns:
timestamp (s), activity ID, heart rate, then three 17-column IMU blocks
(hand, chest, ankle). Each IMU block holds temperature, 16g accelerometer,
6g accelerometer, gyroscope, magnetometer and orientation.

Only the 16g accelerometer, gyroscope and magnetometer are kept, giving
27 channels ordered placement-major (wrist, chest, ankle), then sensor
(acc, gyro, mag), then axis (x, y, z).

"""
# STDLIB
import enum
import functools
import io
import os
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

# THIRD-PARTY
import numpy as np
import pandas as pd
from astropy.io import ascii
from astropy.table import Table
from astropy.utils.data import get_pkg_data_filename
from astropy.utils.exceptions import AstropyUserWarning
from scipy.interpolate import interp1d

# HARKNN
from . import conf
from .logger import log

__all__ = ['Activity', 'ActivityTable', 'activity_table', 'SensorSession',
           'PAMAP2ParseError', 'load_pamap2', 'clean', 'downsample',
           'split_loso', 'save_sessions', 'load_sessions', 'summarize',
           'PLACEMENTS', 'SENSORS', 'AXES', 'CHANNEL_NAMES', 'FREQUENCIES',
           'BASE_FREQUENCY']

PLACEMENTS = ('wrist', 'chest', 'ankle')
SENSORS = ('acc', 'gyro', 'mag')
AXES = ('x', 'y', 'z')
CHANNEL_NAMES = tuple(f'{p}_{s}_{a}'
                      for p in PLACEMENTS for s in SENSORS for a in AXES)

BASE_FREQUENCY = 100.0
FREQUENCIES = (100.0, 50.0, 25.0, 12.5, 5.0, 1.0)

N_COLUMNS = 54
_TIMESTAMP_COL = 0
_ACTIVITY_COL = 1
_IMU_BLOCK_START = (3, 20, 37)  # hand (wrist), chest, ankle
_SENSOR_OFFSET = {'acc': 1, 'gyro': 7, 'mag': 10}  # acc is the 16g unit
_CHANNEL_COLUMNS = tuple(
    start + _SENSOR_OFFSET[s] + i
    for start in _IMU_BLOCK_START for s in SENSORS for i in range(3))


class Activity(enum.IntEnum):
    """The 12 protocol activities, in canonical (alphabetical) order."""
    A1 = 1
    A2 = 2
    A3 = 3
    A4 = 4
    A5 = 5
    A6 = 6
    A7 = 7
    A8 = 8
    A9 = 9
    A10 = 10
    A11 = 11
    A12 = 12

    @property
    def label(self):
        """Human-readable activity name, e.g., ``'cycling'``."""
        return activity_table().name_of(self)


class ActivityTable(object):
    """Mapping between PAMAP2 activity IDs and canonical activities.

    **Definition Table**

    An ASCII table with optional ``# KEY = VALUE`` metadata comments and
    three columns:

    1. ``CODE``, canonical code ``A1`` ... ``A12``.
    2. ``ACTIVITY_ID``, the numeric ID used in the data files.
    3. ``NAME``, the activity name.

    The ``TRANSIENT_ID`` metadata gives the ID of samples to discard.

    Parameters
    ----------
    definition_file : str or `None`
        Table to read. Defaults to the one shipped with the package.

    Raises
    ------
    ValueError
        The mapping is not one-to-one over the 12 activities.

    """
    def __init__(self, definition_file=None):
        if definition_file is None:
            definition_file = get_pkg_data_filename(
                'data/pamap2_activities.txt', package='harknn')

        self.tab = ascii.read(os.path.expanduser(definition_file),
                              format='basic')
        self.metadata = ascii.read(self.tab.meta['comments'], delimiter='=',
                                   format='no_header', names=['key', 'val'])
        meta = {str(row['key']).strip(): str(row['val']).strip()
                for row in self.metadata}
        self.transient_id = int(meta.get('TRANSIENT_ID', 0))

        codes = [str(c) for c in self.tab['CODE']]
        ids = [int(i) for i in self.tab['ACTIVITY_ID']]
        if sorted(codes) != sorted(a.name for a in Activity):
            raise ValueError(f'{definition_file} must list exactly the codes '
                             'A1 to A12')
        if len(set(ids)) != len(ids) or self.transient_id in ids:
            raise ValueError(f'{definition_file} has duplicate activity IDs')

        self._by_id = {i: Activity[c] for i, c in zip(ids, codes)}
        self._names = {Activity[c]: str(n)
                       for c, n in zip(codes, self.tab['NAME'])}

    @property
    def dataset_ids(self):
        """Known (non-transient) dataset IDs."""
        return tuple(sorted(self._by_id))

    def from_dataset_id(self, activity_id):
        """Return the `Activity` for a dataset ID."""
        try:
            return self._by_id[int(activity_id)]
        except KeyError:
            raise ValueError(f'Unknown activity ID {activity_id}') from None

    def to_dataset_id(self, activity):
        """Return the dataset ID of an `Activity`."""
        for key, val in self._by_id.items():
            if val == activity:
                return key
        raise ValueError(f'Unknown activity {activity}')

    def name_of(self, activity):
        return self._names[Activity(activity)]

    def lookup_array(self):
        """Array ``a`` such that ``a[dataset_id]`` is the activity code,
        0 for transient and -1 for unknown IDs."""
        lut = np.full(max(self._by_id) + 1, -1, dtype=int)
        lut[self.transient_id] = 0
        for key, val in self._by_id.items():
            lut[key] = int(val)
        return lut


@functools.lru_cache(maxsize=None)
def activity_table():
    """The shipped `ActivityTable`, read once."""
    return ActivityTable()


class PAMAP2ParseError(ValueError):
    """Malformed PAMAP2 file.

    Parameters
    ----------
    msg : str
        Problem description.

    filename : str
        File being parsed.

    lineno : int or `None`
        1-based line number, if known.

    """
    def __init__(self, msg, filename, lineno=None):
        self.filename = filename
        self.lineno = lineno
        where = filename if lineno is None else f'{filename}:{lineno}'
        super().__init__(f'{where}: {msg}')


@dataclass(frozen=True, eq=False)
class SensorSession:
    """One user's time-aligned, labeled recording at a known frequency.

    Arrays are copied and made read-only, so a session can be shared
    between concurrent evaluators.

    """
    user_id: int
    frequency_hz: float
    channels: np.ndarray
    labels: np.ndarray
    timestamps: np.ndarray
    channel_names: tuple = field(default=CHANNEL_NAMES, repr=False)

    def __post_init__(self):
        channels = np.array(self.channels, dtype=float, ndmin=2)
        if channels.size == 0:
            channels = channels.reshape(0, len(self.channel_names))
        labels = np.array(self.labels, dtype=int).ravel()
        timestamps = np.array(self.timestamps, dtype=float).ravel()

        if channels.shape[1] != len(self.channel_names):
            raise ValueError(f'Expected {len(self.channel_names)} channels, '
                             f'got {channels.shape[1]}')
        if not (len(channels) == len(labels) == len(timestamps)):
            raise ValueError('Channels, labels, and timestamps must have '
                             'equal length')
        if self.frequency_hz <= 0:
            raise ValueError(f'Invalid frequency {self.frequency_hz}')

        for arr in (channels, labels, timestamps):
            arr.flags.writeable = False
        object.__setattr__(self, 'user_id', int(self.user_id))
        object.__setattr__(self, 'frequency_hz', float(self.frequency_hz))
        object.__setattr__(self, 'channels', channels)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'timestamps', timestamps)

    def __len__(self):
        return len(self.labels)

    def _subset(self, index, **kwargs):
        return SensorSession(
            user_id=self.user_id,
            frequency_hz=kwargs.get('frequency_hz', self.frequency_hz),
            channels=kwargs.get('channels', self.channels[index]),
            labels=self.labels[index], timestamps=self.timestamps[index],
            channel_names=self.channel_names)


def _user_from_filename(filename):
    """``subject105.dat`` -> 5."""
    digits = re.findall(r'\d+', os.path.basename(filename))
    if not digits:
        raise PAMAP2ParseError('cannot infer user ID from file name',
                               filename)
    user_id = int(digits[-1])
    if user_id >= 100:
        user_id -= 100
    return user_id


def _read_pamap2_file(filename):
    """Parse one PAMAP2 file into a 100 Hz `SensorSession`."""
    with open(filename) as fin:
        text = fin.read()

    linenos = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        ncol = len(line.split())
        if ncol == 0:
            continue
        if ncol != N_COLUMNS:
            raise PAMAP2ParseError(
                f'expected {N_COLUMNS} columns, found {ncol}', filename,
                lineno)
        linenos.append(lineno)

    user_id = _user_from_filename(filename)
    if not linenos:
        warnings.warn(f'{filename} has no data rows, skipped',
                      AstropyUserWarning)
        return None

    try:
        data = pd.read_csv(io.StringIO(text), sep=r'\s+', header=None,
                           dtype=float, engine='c').to_numpy()
    except ValueError as exc:
        raise PAMAP2ParseError(f'non-numeric value ({exc})', filename) from exc

    ids = data[:, _ACTIVITY_COL]
    lut = activity_table().lookup_array()
    bad = ~np.isfinite(ids) | (ids < 0) | (ids >= len(lut))
    codes = np.full(len(ids), -1, dtype=int)
    codes[~bad] = lut[ids[~bad].astype(int)]
    bad |= codes < 0
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        known = ', '.join(str(k) for k in activity_table().dataset_ids)
        raise PAMAP2ParseError(f'unknown activity ID {ids[i]:g} (known: '
                               f'{known})', filename, linenos[i])

    keep = codes != 0
    log.debug(f'{filename}: {len(codes)} rows, {int(keep.sum())} labeled')
    return SensorSession(
        user_id=user_id, frequency_hz=BASE_FREQUENCY,
        channels=data[keep][:, _CHANNEL_COLUMNS], labels=codes[keep],
        timestamps=data[keep, _TIMESTAMP_COL])


def load_pamap2(directory_path, max_workers=None):
    """Load every PAMAP2 file (``*.dat``) in a directory.

    Transient samples (activity ID 0) are removed and only the
    accelerometer (16g), gyroscope, and magnetometer channels are kept.
    Missing values are left as NaN; see :func:`clean`.

    Parameters
    ----------
    directory_path : str
        Directory with one file per user, e.g., ``PAMAP2_Dataset/Protocol``.

    max_workers : int or `None`
        Parse files in this many threads. Sequential if `None`.

    Returns
    -------
    sessions : list of `SensorSession`
        One session per user at 100 Hz, sorted by user ID.

    Raises
    ------
    PAMAP2ParseError
        Malformed row or unknown activity ID.

    """
    filenames = sorted(
        os.path.join(directory_path, f) for f in os.listdir(directory_path)
        if f.endswith('.dat'))

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            sessions = list(pool.map(_read_pamap2_file, filenames))
    else:
        sessions = [_read_pamap2_file(f) for f in filenames]

    sessions = [s for s in sessions if s is not None]
    user_ids = [s.user_id for s in sessions]
    if len(set(user_ids)) != len(user_ids):
        raise ValueError(f'{directory_path} has more than one file per user')

    log.info(f'Loaded {len(sessions)} session(s) from {directory_path}')
    return sorted(sessions, key=lambda s: s.user_id)


def _true_runs(mask):
    """Start and stop indices of runs of `True` in a boolean array."""
    padded = np.concatenate(([0], np.asarray(mask, dtype=np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return edges[::2], edges[1::2]


def _check_channels(missing, session):
    """Raise if a channel of a non-empty ``missing`` mask is all `True`."""
    if len(missing) == 0:
        return
    empty = missing.all(axis=0)
    if empty.any():
        name = session.channel_names[int(np.flatnonzero(empty)[0])]
        raise ValueError(f'Channel {name} of user {session.user_id} '
                         'has no valid value')


def clean(session, policy=None, max_gap_seconds=None):
    """Fill missing sensor values.

    Rows where all three axes of one sensor are missing for longer than
    ``max_gap_seconds`` are dropped. Remaining gaps are then filled
    channel by channel.

    Parameters
    ----------
    session : `SensorSession`
        Session at its original frequency.

    policy : {'linear', 'nearest', 'previous', 'drop'} or `None`
        Filling method. ``'linear'`` interpolates inside a gap and repeats
        the nearest valid value at the edges; ``'drop'`` removes every row
        with a missing value. Default is ``conf.clean_policy``.

    max_gap_seconds : float or `None`
        Default is ``conf.max_gap_seconds``.

    Returns
    -------
    cleaned : `SensorSession`
        Session without NaN.

    Raises
    ------
    ValueError
        Invalid policy or a channel with no valid value at all.

    """
    if policy is None:
        policy = conf.clean_policy
    if max_gap_seconds is None:
        max_gap_seconds = conf.max_gap_seconds
    policy = policy.lower()
    if policy not in ('linear', 'nearest', 'previous', 'drop'):
        raise ValueError(f'{policy} is not a valid clean policy')

    missing = np.isnan(session.channels)
    if not missing.any():
        return session

    _check_channels(missing, session)

    # Long outages of a whole sensor
    keep = np.ones(len(session), dtype=bool)
    max_run = max_gap_seconds * session.frequency_hz
    for i in range(0, missing.shape[1], 3):
        starts, stops = _true_runs(missing[:, i:i + 3].all(axis=1))
        for start, stop in zip(starts, stops):
            if stop - start > max_run:
                keep[start:stop] = False
    # a channel may have had valid values only inside the dropped rows
    _check_channels(missing[keep], session)

    if policy == 'drop':
        keep &= ~missing.any(axis=1)
        cleaned = session._subset(keep)
        log.debug(f'User {session.user_id}: dropped {int((~keep).sum())} '
                  'rows with missing values')
        return cleaned

    channels = session.channels[keep].copy()
    t = session.timestamps[keep]
    for j in range(channels.shape[1]):
        y = channels[:, j]
        bad = np.isnan(y)
        if not bad.any():
            continue
        good = ~bad
        if good.sum() == 1:
            y[bad] = y[good][0]
            continue
        func = interp1d(t[good], y[good], kind=policy, bounds_error=False,
                        fill_value=(y[good][0], y[good][-1]),
                        assume_sorted=True)
        y[bad] = func(t[bad])

    log.debug(f'User {session.user_id}: dropped {int((~keep).sum())} rows, '
              f'filled {int(np.isnan(session.channels[keep]).sum())} values')
    return session._subset(keep, channels=channels)


def downsample(session, target_hz):
    """Decimate a session by keeping every r-th sample, starting at 0.

    Parameters
    ----------
    session : `SensorSession`
        Input session.

    target_hz : float
        One of `FREQUENCIES`.

    Returns
    -------
    decimated : `SensorSession`
        Session at ``target_hz``; the input itself if already there.

    Raises
    ------
    ValueError
        Unsupported frequency or non-integral ratio.

    """
    target_hz = float(target_hz)
    if target_hz not in FREQUENCIES:
        raise ValueError(f'{target_hz} Hz is not a supported frequency')

    ratio = session.frequency_hz / target_hz
    r = int(round(ratio))
    if r < 1 or abs(ratio - r) > 1e-9:
        raise ValueError(f'Cannot decimate {session.frequency_hz} Hz to '
                         f'{target_hz} Hz (ratio {ratio:g})')
    if r == 1:
        return session

    index = slice(None, None, r)
    return session._subset(index, frequency_hz=target_hz)


def split_loso(sessions, test_user):
    """Leave-one-subject-out split.

    Parameters
    ----------
    sessions : list of `SensorSession`
        All users.

    test_user : int
        User to hold out.

    Returns
    -------
    train : list of `SensorSession`
        Every other user, in input order.

    test : `SensorSession`
        The held-out user.

    Raises
    ------
    ValueError
        ``test_user`` is not in ``sessions``.

    """
    test = [s for s in sessions if s.user_id == test_user]
    if not test:
        raise ValueError(f'User {test_user} is not in the collection')
    train = [s for s in sessions if s.user_id != test_user]
    return train, test[0]


def save_sessions(sessions, out_dir):
    """Write sessions as ``user_<id>.npz`` files in ``out_dir``.

    Returns
    -------
    filenames : list of str

    """
    os.makedirs(out_dir, exist_ok=True)
    filenames = []
    for s in sessions:
        fname = os.path.join(out_dir, f'user_{s.user_id}.npz')
        np.savez(fname, user_id=s.user_id, frequency_hz=s.frequency_hz,
                 channels=s.channels, labels=s.labels,
                 timestamps=s.timestamps)
        filenames.append(fname)
    return filenames


def load_sessions(path, policy=None):
    """Load cleaned sessions from an ingest cache or a raw PAMAP2 directory.

    A directory containing ``user_<id>.npz`` files is treated as a cache
    written by :func:`save_sessions`; otherwise it is parsed with
    :func:`load_pamap2` and each session is passed through :func:`clean`.

    """
    cached = sorted(f for f in os.listdir(path)
                    if re.fullmatch(r'user_\d+\.npz', f))
    if not cached:
        return [clean(s, policy=policy) for s in load_pamap2(path)]

    sessions = []
    for fname in cached:
        with np.load(os.path.join(path, fname)) as npz:
            sessions.append(SensorSession(
                user_id=int(npz['user_id']),
                frequency_hz=float(npz['frequency_hz']),
                channels=npz['channels'], labels=npz['labels'],
                timestamps=npz['timestamps']))
    log.info(f'Loaded {len(sessions)} cached session(s) from {path}')
    return sorted(sessions, key=lambda s: s.user_id)


def summarize(sessions):
    """Per-user sample and per-activity counts.

    Returns
    -------
    tab : ``astropy.table.Table``
        Columns ``user_id``, ``n_samples``, ``frequency_hz``, and one count
        column per activity code.

    """
    rows = []
    for s in sessions:
        counts = np.bincount(s.labels, minlength=len(Activity) + 1)
        rows.append([s.user_id, len(s), s.frequency_hz] +
                    [int(counts[a]) for a in Activity])
    names = ['user_id', 'n_samples', 'frequency_hz'] + [a.name
                                                        for a in Activity]
    if not rows:
        return Table(names=names, dtype=[int, int, float] + [int] * 12)
    return Table(rows=rows, names=names)
