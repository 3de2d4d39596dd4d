"""Synthetic recordings shared by the tests."""
import os

import numpy as np

from ..dataset import N_COLUMNS, SensorSession, activity_table
from ..evaluation import EvaluationResult

# Activities used by the synthetic users: cycling, lying, sitting
ACTIVITIES = (2, 5, 9)


def make_session(user_id, runs, frequency_hz=100.0, noise=0.1, seed=0,
                 t0=0.0):
    """Session made of ``(activity, length)`` runs.

    Channel values are the activity code plus Gaussian noise, so
    activities are separable by their means.

    """
    rng = np.random.default_rng([seed, user_id])
    labels = np.concatenate([np.full(n, a, dtype=int) for a, n in runs])
    channels = labels[:, np.newaxis] + rng.normal(0, noise, (len(labels), 27))
    timestamps = t0 + np.arange(len(labels)) / frequency_hz
    return SensorSession(user_id=user_id, frequency_hz=frequency_hz,
                         channels=channels, labels=labels,
                         timestamps=timestamps)


def make_sessions(users=(1, 2, 3), run_length=1000, activities=ACTIVITIES,
                  seed=0):
    return [make_session(u, [(a, run_length) for a in activities], seed=seed)
            for u in users]


def pamap2_rows(session, transient_every=0):
    """54-column rows of a session, as in a PAMAP2 Protocol file.

    Each IMU block holds temperature, the 16g accelerometer (session
    channels), a distinct 6g accelerometer, gyroscope, magnetometer and
    orientation.

    """
    table = activity_table()
    n = len(session)
    rows = np.zeros((n, N_COLUMNS))
    rows[:, 0] = session.timestamps
    rows[:, 1] = [table.to_dataset_id(a) for a in session.labels]
    rows[:, 2] = np.nan  # heart rate
    for block, start in enumerate((3, 20, 37)):
        ch = session.channels[:, 9 * block:9 * block + 9]
        rows[:, start] = 30.0
        rows[:, start + 1:start + 4] = ch[:, 0:3]
        rows[:, start + 4:start + 7] = -999.0
        rows[:, start + 7:start + 10] = ch[:, 3:6]
        rows[:, start + 10:start + 13] = ch[:, 6:9]
        rows[:, start + 13:start + 17] = 1.0
    if transient_every:
        rows[::transient_every, 1] = 0
    return rows


def write_pamap2(directory, sessions, **kwargs):
    """Write ``subject1<user>.dat`` files; return their paths."""
    paths = []
    for s in sessions:
        path = os.path.join(str(directory), f'subject1{s.user_id:02d}.dat')
        np.savetxt(path, pamap2_rows(s, **kwargs), fmt='%.17g')
        paths.append(path)
    return paths


def fake_result(config, accuracy=0.5, mean_response_ms=1.0, test_user=1,
                power_watts=2.0):
    f1 = np.full(12, np.nan)
    f1[[1, 4, 8]] = accuracy
    return EvaluationResult(
        config=config, test_user=test_user, accuracy=accuracy,
        f1_per_activity=f1, macro_f1=accuracy,
        mean_response_ms=mean_response_ms,
        energy_mj=power_watts * mean_response_ms, n_train=6, n_test=27,
        stage_ms={'read': mean_response_ms, 'extract': 0.0, 'infer': 0.0})
