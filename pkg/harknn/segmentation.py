"""Sliding-window segmentation and activity-stratified instance capping."""
# STDLIB
import math
import warnings
from dataclasses import dataclass

# THIRD-PARTY
import numpy as np
from astropy.utils.exceptions import AstropyUserWarning

# HARKNN
from .dataset import BASE_FREQUENCY, Activity
from .logger import log

__all__ = ['WindowSpec', 'Window', 'window_plan', 'segment', 'activity_runs',
           'cap_instances', 'largest_remainder', 'reference_distribution',
           'reference_windows', 'instance_target', 'rescale_window',
           'REFERENCE_WINDOW']

# Window (in 100 Hz samples) whose non-overlapping segmentation fixes the
# number of training instances.
REFERENCE_WINDOW = 900


def rescale_window(size, frequency_hz, base_hz=BASE_FREQUENCY):
    """Number of samples covering the same duration as ``size`` samples
    at ``base_hz``, rounded down."""
    return int(math.floor(round(size * frequency_hz / base_hz, 9)))


@dataclass(frozen=True)
class WindowSpec:
    """Window size in samples and overlap fraction.

    ``raw_step`` may be 0 for tiny windows with large overlap; ``step``
    is clamped to 1.

    """
    size: int
    overlap: float

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f'Invalid window size {self.size}')
        if not 0 <= self.overlap < 1:
            raise ValueError(f'Overlap must be in [0, 1), got {self.overlap}')
        object.__setattr__(self, 'size', int(self.size))
        object.__setattr__(self, 'overlap', float(self.overlap))

    @property
    def raw_step(self):
        return int(math.floor(round(self.size * (1 - self.overlap), 9)))

    @property
    def step(self):
        return max(1, self.raw_step)


@dataclass(frozen=True, eq=False)
class Window:
    """Samples of one window, a view into its session's channel matrix."""
    user_id: int
    activity: Activity
    start_index: int
    samples: np.ndarray

    @property
    def sort_key(self):
        return (self.user_id, int(self.activity), self.start_index)


def window_plan(run_length, spec):
    """Start indices of the windows that fit in a run.

    Parameters
    ----------
    run_length : int
        Number of samples in the run.

    spec : `WindowSpec`

    Returns
    -------
    starts : list of int
        ``0, step, 2 * step, ...`` with ``start + size <= run_length``.
        Empty when the run is shorter than one window.

    """
    if run_length < spec.size:
        return []
    return list(range(0, run_length - spec.size + 1, spec.step))


def activity_runs(session):
    """Contiguous single-activity runs of a session.

    A run ends where the label changes or where consecutive timestamps
    are more than 1.5 sample periods apart.

    Returns
    -------
    runs : list of tuple
        ``(start, stop, activity)``, ``stop`` exclusive.

    """
    n = len(session)
    if n == 0:
        return []
    breaks = np.flatnonzero(
        (np.diff(session.labels) != 0) |
        (np.diff(session.timestamps) > 1.5 / session.frequency_hz)) + 1
    starts = np.concatenate(([0], breaks))
    stops = np.concatenate((breaks, [n]))
    return [(int(a), int(b), Activity(int(session.labels[a])))
            for a, b in zip(starts, stops)]


def segment(sessions, spec):
    """Cut sessions into windows confined to single-activity runs.

    Parameters
    ----------
    sessions : list of `SensorSession`
        Cleaned sessions, all at the same frequency.

    spec : `WindowSpec`

    Returns
    -------
    windows : list of `Window`
        In session, run, and start order.

    Raises
    ------
    ValueError
        Sessions at different frequencies.

    """
    freqs = {s.frequency_hz for s in sessions}
    if len(freqs) > 1:
        raise ValueError(f'Sessions have mixed frequencies {sorted(freqs)}')

    windows = []
    for s in sessions:
        for start, stop, activity in activity_runs(s):
            for offset in window_plan(stop - start, spec):
                i = start + offset
                windows.append(Window(
                    user_id=s.user_id, activity=activity, start_index=i,
                    samples=s.channels[i:i + spec.size]))

    log.debug(f'{len(windows)} windows of {spec.size} samples, '
              f'step {spec.step}')
    return windows


def reference_windows(sessions):
    """Windows of the reference (largest, non-overlapping) segmentation
    at the sessions' frequency. Their count and activity mix define the
    training-set size and composition for every configuration."""
    if not sessions:
        return []
    size = rescale_window(REFERENCE_WINDOW, sessions[0].frequency_hz)
    return segment(sessions, WindowSpec(max(size, 1), 0.0))


def reference_distribution(windows):
    """Fraction of windows per activity.

    Returns
    -------
    dist : dict
        `Activity` to proportion, activities in canonical order.

    """
    if not windows:
        raise ValueError('Cannot compute a distribution of no windows')
    counts = np.bincount([int(w.activity) for w in windows],
                         minlength=len(Activity) + 1)
    total = counts.sum()
    return {a: counts[a] / total for a in Activity if counts[a] > 0}


def largest_remainder(total, weights):
    """Apportion an integer total by largest remainders.

    Parameters
    ----------
    total : int

    weights : dict
        Key to nonnegative weight; need not be normalized.

    Returns
    -------
    seats : dict
        Key to integer count, summing to ``total``. Equal remainders are
        resolved in key order.

    """
    keys = sorted(weights)
    w = np.array([weights[k] for k in keys], dtype=float)
    if w.sum() <= 0:
        raise ValueError('Weights must have a positive sum')
    exact = np.round(total * w / w.sum(), 9)
    seats = np.floor(exact).astype(int)
    left = total - seats.sum()
    order = np.argsort(-(exact - seats), kind='stable')
    seats[order[:left]] += 1
    return {k: int(s) for k, s in zip(keys, seats)}


def cap_instances(windows, target_count, reference_distribution, seed):
    """Select a fixed number of windows with a fixed activity mix.

    Candidates are sorted by ``(user, activity, start)`` before sampling,
    so the result does not depend on input order. Per-activity quotas
    follow largest-remainder apportionment of ``target_count``; if an
    activity has fewer windows than its quota, all of them are taken and
    the shortfall is shared among the other activities. Windows of
    activities absent from ``reference_distribution`` are never selected;
    they are reported at INFO level.

    Parameters
    ----------
    windows : list of `Window`

    target_count : int

    reference_distribution : dict
        `Activity` to proportion, summing to 1.

    seed : int
        Seed of the sampling generator.

    Returns
    -------
    selected : list of `Window`
        ``min(target_count, len(windows))`` windows, sorted canonically,
        or fewer (with a warning) when the distribution's activities run
        out of windows. The input list itself if
        ``target_count >= len(windows)``.

    Raises
    ------
    ValueError
        Invalid distribution, target below the number of activities, or
        an activity of the distribution with no window.

    """
    dist = {Activity(a): float(p) for a, p in reference_distribution.items()
            if p > 0}
    if not math.isclose(sum(reference_distribution.values()), 1,
                        abs_tol=1e-6):
        raise ValueError('Reference distribution must sum to 1')
    present = {w.activity for w in windows}
    if target_count < len(present):
        raise ValueError(f'Target {target_count} is below the number of '
                         f'activities ({len(present)})')
    if target_count >= len(windows):
        return windows

    by_activity = {}
    for w in sorted(windows, key=lambda w: w.sort_key):
        by_activity.setdefault(w.activity, []).append(w)
    for a in dist:
        if a not in by_activity:
            raise ValueError(f'Activity {a.name} ({a.label}) has no window')
    excluded = sorted(set(by_activity) - set(dist))
    if excluded:
        log.info('Not in the reference distribution, windows discarded: '
                 + ', '.join(f'{a.name} ({len(by_activity[a])})'
                             for a in excluded))

    quotas = {}
    open_weights = dict(dist)
    remaining = target_count
    while open_weights:
        trial = largest_remainder(remaining, open_weights)
        short = [a for a, q in trial.items() if q > len(by_activity[a])]
        if not short:
            quotas.update(trial)
            break
        for a in short:
            quotas[a] = len(by_activity[a])
            remaining -= quotas[a]
            del open_weights[a]

    total = sum(quotas.values())
    if total < target_count:
        warnings.warn(f'Only {total} windows available for a target of '
                      f'{target_count}', AstropyUserWarning)

    rng = np.random.default_rng(seed)
    selected = []
    for a in sorted(quotas):
        group = by_activity[a]
        idx = np.sort(rng.choice(len(group), size=quotas[a], replace=False))
        selected.extend(group[i] for i in idx)

    log.debug(f'Capped {len(windows)} windows to {len(selected)}')
    return sorted(selected, key=lambda w: w.sort_key)


def instance_target(train_sessions):
    """Training-set size and activity mix shared by every configuration.

    Returns
    -------
    count : int
        Number of reference windows of the training sessions.

    distribution : dict
        Their activity proportions, see `reference_distribution`.

    Raises
    ------
    ValueError
        The training sessions yield no reference window.

    """
    windows = reference_windows(train_sessions)
    return len(windows), reference_distribution(windows)
