"""Brute-force k-nearest-neighbors classifier."""
# STDLIB
from dataclasses import dataclass

# THIRD-PARTY
import numpy as np
from astropy.table import Table

# HARKNN
from .features import N_FEATURES, FeatureVector, feature_names
from .utils import read_table, write_table

__all__ = ['KnnModel', 'build', 'distance', 'predict', 'predict_batch',
           'dump_model', 'load_model', 'DISTANCES']

DISTANCES = ('euclidean', 'manhattan', 'chebyshev')


def _check_metric(metric):
    metric = str(metric).lower()
    if metric not in DISTANCES:
        raise ValueError(f'{metric} is not a valid distance, '
                         f'use one of {DISTANCES}')
    return metric


def _distances(points, query, metric):
    """Distance from ``query`` to each row of ``points``."""
    diff = np.abs(points - query)
    if metric == 'euclidean':
        return np.sqrt((diff * diff).sum(axis=-1))
    if metric == 'manhattan':
        return diff.sum(axis=-1)
    return diff.max(axis=-1, initial=0.0)


def _as_values(vector):
    if isinstance(vector, FeatureVector):
        return vector.values
    return np.asarray(vector, dtype=float)


def distance(a, b, metric='euclidean'):
    """Distance between two vectors.

    Parameters
    ----------
    a, b : array-like or `~harknn.features.FeatureVector`
        Vectors of equal dimension.

    metric : {'euclidean', 'manhattan', 'chebyshev'}

    Returns
    -------
    d : float

    Raises
    ------
    ValueError
        Dimension mismatch or unknown metric.

    """
    metric = _check_metric(metric)
    a = np.ravel(_as_values(a))
    b = np.ravel(_as_values(b))
    if a.shape != b.shape:
        raise ValueError(f'Dimension mismatch: {a.shape[0]} vs {b.shape[0]}')
    return float(_distances(a[np.newaxis], b, metric)[0])


@dataclass(frozen=True, eq=False)
class KnnModel:
    """Memorized training instances.

    Parameters
    ----------
    values : ndarray
        ``(n, d)`` instance matrix.

    labels : ndarray
        Label of each instance.

    max_instances : int
        Bound on the number of stored instances.

    distance : str
        One of `DISTANCES`.

    """
    values: np.ndarray
    labels: np.ndarray
    max_instances: int
    distance: str = 'euclidean'

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        labels = np.array(self.labels, dtype=int).ravel()
        if values.ndim != 2 or len(values) == 0:
            raise ValueError('A model needs a non-empty (n, d) instance '
                             'matrix')
        if len(values) != len(labels):
            raise ValueError(f'{len(values)} instances but {len(labels)} '
                             'labels')
        if self.max_instances < 1:
            raise ValueError(f'Invalid max_instances {self.max_instances}')
        values = values[:self.max_instances]
        labels = labels[:self.max_instances]
        values.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'max_instances', int(self.max_instances))
        object.__setattr__(self, 'distance', _check_metric(self.distance))

    def __len__(self):
        return len(self.labels)

    @property
    def dimension(self):
        return self.values.shape[1]


def build(instances, max_instances=None, distance='euclidean'):
    """Store training instances in a `KnnModel`.

    Parameters
    ----------
    instances : list
        `~harknn.features.FeatureVector` objects or ``(values, label)``
        pairs, all of the same dimension.

    max_instances : int or `None`
        Keep only the first ``max_instances`` instances. All if `None`.

    distance : {'euclidean', 'manhattan', 'chebyshev'}

    Raises
    ------
    ValueError
        No instance or mixed dimensions.

    """
    if len(instances) == 0:
        raise ValueError('Cannot build a model without instances')
    pairs = [(v.values, v.label) if isinstance(v, FeatureVector) else v
             for v in instances]
    dims = {np.size(p[0]) for p in pairs}
    if len(dims) > 1:
        raise ValueError(f'Instances have mixed dimensions {sorted(dims)}')
    if max_instances is None:
        max_instances = len(pairs)
    return KnnModel(values=np.vstack([np.ravel(p[0]) for p in pairs]),
                    labels=[p[1] for p in pairs],
                    max_instances=max_instances, distance=distance)


def _vote(labels, dists):
    """Majority label; ties go to the label with the closest member,
    then to the lowest label."""
    uniq, counts = np.unique(labels, return_counts=True)
    tied = uniq[counts == counts.max()]
    if len(tied) == 1:
        return int(tied[0])
    best = min(tied, key=lambda lab: (dists[labels == lab].min(), lab))
    return int(best)


def predict(model, query, k):
    """Label of a query by majority vote of its ``k`` nearest instances.

    Distance ties are broken by lower instance index.

    Raises
    ------
    ValueError
        ``k`` outside ``[1, len(model)]`` or dimension mismatch.

    """
    if int(k) != k or not 1 <= k <= len(model):
        raise ValueError(f'k must be in [1, {len(model)}], got {k}')
    q = np.ravel(_as_values(query))
    if len(q) != model.dimension:
        raise ValueError(f'Dimension mismatch: model has {model.dimension}, '
                         f'query has {len(q)}')

    dists = _distances(model.values, q, model.distance)
    nearest = np.argsort(dists, kind='stable')[:int(k)]
    return _vote(model.labels[nearest], dists[nearest])


def predict_batch(model, queries, k):
    """Predict each query in order.

    Returns
    -------
    labels : ndarray of int

    """
    return np.array([predict(model, q, k) for q in queries], dtype=int)


def dump_model(model, filename, overwrite=False):
    """Write instances as CSV, one row per instance plus a ``label``
    column. Distance and bound are kept in the header comments."""
    if model.dimension == N_FEATURES:
        names = feature_names()
    else:
        names = [f'f{i}' for i in range(model.dimension)]
    tab = Table(np.array(model.values), names=names)
    tab['label'] = model.labels
    write_table(tab, filename, overwrite=overwrite,
                header={'DISTANCE': model.distance,
                        'MAX_INSTANCES': model.max_instances})


def load_model(filename, distance=None):
    """Read a model written by `dump_model`.

    Parameters
    ----------
    distance : str or `None`
        Override the distance stored in the file.

    """
    tab, meta = read_table(filename)
    names = [n for n in tab.colnames if n != 'label']
    values = np.column_stack([np.asarray(tab[n], dtype=float) for n in names])
    return KnnModel(
        values=values, labels=np.asarray(tab['label'], dtype=int),
        max_instances=int(meta.get('MAX_INSTANCES', len(tab))),
        distance=distance or meta.get('DISTANCE', 'euclidean'))
