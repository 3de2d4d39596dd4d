"""Window features and Min-Max normalization.

Each of the 9 sensors (3 placements x accelerometer, gyroscope,
magnetometer) contributes 10 features, in this order::

    mean_x, mean_y, mean_z, mean_sum, std_x, std_y, std_z,
    corr_xy, corr_xz, corr_yz

giving a 90-value vector ordered wrist, chest, ankle and, within each
placement, acc, gyro, mag.

"""
# STDLIB
from dataclasses import dataclass

# THIRD-PARTY
import numpy as np
from astropy.table import Table

# HARKNN
from .dataset import PLACEMENTS, SENSORS
from .utils import write_table

__all__ = ['FeatureVector', 'Normalizer', 'window_features',
           'extract_features', 'extract_batch', 'fit_normalizer',
           'normalize', 'feature_names', 'write_feature_csv', 'N_FEATURES',
           'FEATURE_KINDS']

FEATURE_KINDS = ('mean_x', 'mean_y', 'mean_z', 'mean_sum', 'std_x', 'std_y',
                 'std_z', 'corr_xy', 'corr_xz', 'corr_yz')
N_FEATURES = len(PLACEMENTS) * len(SENSORS) * len(FEATURE_KINDS)


def feature_names():
    """Canonical names of the 90 features, e.g., ``'chest_gyro_std_y'``."""
    return [f'{p}_{s}_{f}'
            for p in PLACEMENTS for s in SENSORS for f in FEATURE_KINDS]


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Feature values of one window with its provenance."""
    values: np.ndarray
    label: int
    user_id: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if len(values) != N_FEATURES:
            raise ValueError(f'Expected {N_FEATURES} features, '
                             f'got {len(values)}')
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)


def _pearson(cx, cy, constant):
    """Correlation of centered series; 0 where either is constant."""
    sxy = (cx * cy).sum(axis=0)
    den = np.sqrt((cx * cx).sum(axis=0) * (cy * cy).sum(axis=0))
    out = np.zeros_like(sxy)
    np.divide(sxy, den, out=out, where=~constant & (den > 0))
    return np.clip(out, -1, 1)


def window_features(samples):
    """The 90 feature values of a ``(n, 27)`` sample matrix.

    Standard deviations use the ``n - 1`` denominator. Correlations are
    Pearson coefficients, defined as 0 when either axis is constant.

    Raises
    ------
    ValueError
        Fewer than 2 samples or wrong number of channels.

    """
    samples = np.asarray(samples, dtype=float)
    n_sensors = len(PLACEMENTS) * len(SENSORS)
    if samples.ndim != 2 or samples.shape[1] != n_sensors * 3:
        raise ValueError(f'Expected a (n, {n_sensors * 3}) sample matrix, '
                         f'got shape {samples.shape}')
    n = samples.shape[0]
    if n < 2:
        raise ValueError(f'A window needs at least 2 samples, got {n}')

    xyz = samples.reshape(n, n_sensors, 3)
    constant = np.ptp(xyz, axis=0) == 0  # (9, 3)

    means = xyz.mean(axis=0)
    mean_sum = xyz.sum(axis=2).mean(axis=0)
    centered = xyz - means
    centered[:, constant] = 0
    std = np.sqrt((centered ** 2).sum(axis=0) / (n - 1))

    cx, cy, cz = centered[:, :, 0], centered[:, :, 1], centered[:, :, 2]
    corr_xy = _pearson(cx, cy, constant[:, 0] | constant[:, 1])
    corr_xz = _pearson(cx, cz, constant[:, 0] | constant[:, 2])
    corr_yz = _pearson(cy, cz, constant[:, 1] | constant[:, 2])

    per_sensor = np.column_stack([means, mean_sum, std,
                                  corr_xy, corr_xz, corr_yz])  # (9, 10)
    return per_sensor.ravel()


def extract_features(window):
    """Compute the `FeatureVector` of a `~harknn.segmentation.Window`."""
    return FeatureVector(values=window_features(window.samples),
                         label=int(window.activity), user_id=window.user_id)


def extract_batch(windows):
    """Feature matrix of many windows.

    Returns
    -------
    values : ndarray
        ``(len(windows), 90)``, row ``i`` equal to
        ``extract_features(windows[i]).values``.

    labels, users : ndarray
        Activity code and user of each row.

    """
    values = np.empty((len(windows), N_FEATURES))
    for i, w in enumerate(windows):
        values[i] = window_features(w.samples)
    labels = np.array([int(w.activity) for w in windows], dtype=int)
    users = np.array([w.user_id for w in windows], dtype=int)
    return values, labels, users


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-dimension minimum and maximum of a training set."""
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        mn = np.array(self.minimum, dtype=float).ravel()
        mx = np.array(self.maximum, dtype=float).ravel()
        if mn.shape != mx.shape or np.any(mn > mx):
            raise ValueError('Normalizer needs min <= max per dimension')
        mn.flags.writeable = False
        mx.flags.writeable = False
        object.__setattr__(self, 'minimum', mn)
        object.__setattr__(self, 'maximum', mx)

    def transform(self, values):
        """Scale values (one vector or rows of a matrix) to [0, 1].

        Values outside the fitted range are clamped; dimensions with
        ``max == min`` map to 0.

        """
        values = np.asarray(values, dtype=float)
        span = self.maximum - self.minimum
        out = np.zeros(np.broadcast(values, span).shape)
        np.divide(values - self.minimum, span, out=out,
                  where=np.broadcast_to(span > 0, out.shape))
        return np.clip(out, 0, 1)


def fit_normalizer(train_vectors):
    """Fit a `Normalizer` on training vectors only.

    Parameters
    ----------
    train_vectors : list of `FeatureVector` or ndarray
        Vectors or a ``(n, d)`` matrix.

    Raises
    ------
    ValueError
        No training vector.

    """
    if len(train_vectors) == 0:
        raise ValueError('Cannot fit a normalizer on an empty training set')
    if isinstance(train_vectors[0], FeatureVector):
        values = np.vstack([v.values for v in train_vectors])
    else:
        values = np.atleast_2d(np.asarray(train_vectors, dtype=float))
    return Normalizer(minimum=values.min(axis=0), maximum=values.max(axis=0))


def normalize(vector, normalizer):
    """Min-Max scale a `FeatureVector` with a fitted `Normalizer`."""
    return FeatureVector(values=normalizer.transform(vector.values),
                         label=vector.label, user_id=vector.user_id)


def write_feature_csv(vectors, filename, overwrite=False):
    """Write feature vectors as CSV: 90 named columns, label, user."""
    if vectors:
        data = np.vstack([v.values for v in vectors])
    else:
        data = np.empty((0, N_FEATURES))
    tab = Table(data, names=feature_names())
    tab['label'] = [v.label for v in vectors]
    tab['user'] = [v.user_id for v in vectors]
    write_table(tab, filename, overwrite=overwrite)
