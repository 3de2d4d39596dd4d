"""Configuration search and analysis of evaluated configurations.

The search space is the Cartesian grid of window size, overlap, k and
distance. This module enumerates it, searches it with NSGA-II, extracts
Pareto fronts, and analyzes the results (grid ANOVA importance, Pearson
correlations of fixed-value sweeps, train/test frequency matrices).

"""
# STDLIB
import itertools
import math
import warnings
from dataclasses import dataclass, field

# THIRD-PARTY
import numpy as np
from astropy.table import Table
from astropy.utils.exceptions import AstropyUserWarning
from scipy.stats import pearsonr

# HARKNN
from . import conf
from .dataset import Activity
from .evaluation import (RESULT_COLUMNS, Configuration, EvaluationResult,
                         NoInstancesError, results_table)
from .knn import DISTANCES
from .logger import log

__all__ = ['SearchSpace', 'ParetoPoint', 'Trial', 'ImportanceReport',
           'FrequencyMatrix', 'Sweep', 'ConstantMetricError',
           'enumerate_grid', 'nsga2_search', 'pareto_front',
           'non_dominated_mask', 'points_from_table', 'points_from_results',
           'front_summary', 'front_table', 'activity_report',
           'hyperparameter_importance', 'pearson_correlation',
           'fixed_value_sweep', 'sweep_correlations', 'frequency_matrix',
           'frequency_pareto', 'default_directions', 'AXES',
           'SWEEP_DEFAULTS']

AXES = ('window_size', 'overlap', 'k', 'distance')

_DIRECTIONS = {'accuracy': 'max', 'macro_f1': 'max',
               'mean_response_ms': 'min', 'energy_mJ': 'min'}

# Each sweep varies one axis, all others fixed.
SWEEP_DEFAULTS = {
    'window_size': ((100, 150, 250, 300, 350, 500, 550, 600, 650, 750, 800,
                     850, 900),
                    {'overlap': 0.5, 'k': 10, 'distance': 'manhattan'}),
    'overlap': ((0.0, 0.1, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9),
                {'window_size': 250, 'k': 9, 'distance': 'manhattan'}),
    'k': ((1, 2, 3, 5, 6, 9, 10),
          {'window_size': 250, 'overlap': 0.8, 'distance': 'manhattan'}),
}


class ConstantMetricError(ValueError):
    """A metric has no variance to decompose or correlate."""


def default_directions(objectives):
    """``'max'`` or ``'min'`` for each named objective."""
    try:
        return tuple(_DIRECTIONS[name] for name in objectives)
    except KeyError as exc:
        raise ValueError(f'No default direction for objective {exc}') from None


# ---------- Search space ----------

@dataclass(frozen=True)
class SearchSpace:
    """Values of each hyperparameter axis.

    The defaults span 18 window sizes, 10 overlaps, 10 values of k and 3
    distances, 5400 combinations.

    """
    window_sizes: tuple = tuple(range(50, 901, 50))
    overlaps: tuple = tuple(round(0.1 * i, 1) for i in range(10))
    ks: tuple = tuple(range(1, 11))
    distances: tuple = DISTANCES

    def __post_init__(self):
        for name in ('window_sizes', 'overlaps', 'ks', 'distances'):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f'Search space axis {name} is empty')
            if len(set(values)) != len(values):
                raise ValueError(f'Search space axis {name} has duplicates')
            object.__setattr__(self, name, values)
        object.__setattr__(self, 'overlaps',
                           tuple(round(float(v), 9) for v in self.overlaps))
        object.__setattr__(self, 'distances',
                           tuple(str(d).lower() for d in self.distances))

    @property
    def axes(self):
        return (self.window_sizes, self.overlaps, self.ks, self.distances)

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes)

    def __len__(self):
        return int(np.prod(self.shape))

    def config(self, genome, train_hz=100.0, test_hz=100.0):
        """`~harknn.evaluation.Configuration` at axis indices ``genome``."""
        ws, ov, k, dist = (axis[i] for axis, i in zip(self.axes, genome))
        return Configuration(
            window_size=ws, overlap=ov, k=k, distance=dist,
            train_hz=train_hz, test_hz=test_hz,
            config_id=int(np.ravel_multi_index(tuple(genome), self.shape)))

    def config_from_id(self, config_id, train_hz=100.0, test_hz=100.0):
        return self.config(np.unravel_index(config_id, self.shape),
                           train_hz=train_hz, test_hz=test_hz)

    def as_dict(self):
        return {name: list(values) for name, values in zip(
            ('window_sizes', 'overlaps', 'ks', 'distances'), self.axes)}


def enumerate_grid(space, train_hz=100.0, test_hz=100.0):
    """All configurations of a space in canonical order.

    Returns
    -------
    configs : list of `~harknn.evaluation.Configuration`
        ``configs[i].config_id == i``; window size varies slowest,
        distance fastest.

    """
    return [space.config(genome, train_hz=train_hz, test_hz=test_hz)
            for genome in itertools.product(*(range(n)
                                              for n in space.shape))]


# ---------- Pareto fronts ----------

@dataclass(frozen=True)
class ParetoPoint:
    config_id: int
    objectives: tuple


def _to_minimization(values, directions):
    values = np.asarray(values, dtype=float)
    signs = []
    for d in directions:
        if d not in ('max', 'min'):
            raise ValueError(f'Direction must be max or min, got {d}')
        signs.append(-1.0 if d == 'max' else 1.0)
    if values.ndim != 2 or values.shape[1] != len(signs):
        raise ValueError(f'Expected {len(signs)} objective(s) per point')
    return values * np.array(signs)


def non_dominated_mask(values, directions, block_size=256):
    """Boolean mask of the points not dominated by any other point.

    Point ``a`` dominates ``b`` if it is no worse in every objective and
    strictly better in at least one. Equal points do not dominate each
    other.

    Parameters
    ----------
    values : array-like
        ``(n, m)`` objective values.

    directions : sequence of {'max', 'min'}

    """
    f = _to_minimization(values, directions)
    n = len(f)
    mask = np.ones(n, dtype=bool)
    for start in range(0, n, block_size):
        block = f[start:start + block_size, np.newaxis, :]
        no_worse = (f[np.newaxis] <= block).all(axis=-1)
        better = (f[np.newaxis] < block).any(axis=-1)
        mask[start:start + block_size] = ~(no_worse & better).any(axis=1)
    return mask


def pareto_front(points, directions):
    """Non-dominated subset of evaluated points.

    Parameters
    ----------
    points : list of `ParetoPoint`

    directions : sequence of {'max', 'min'}
        One per objective.

    Returns
    -------
    front : list of `ParetoPoint`
        Sorted by increasing first objective, ties in input order.

    """
    if not points:
        return []
    values = np.array([p.objectives for p in points], dtype=float)
    keep = np.flatnonzero(non_dominated_mask(values, directions))
    order = keep[np.argsort(values[keep, 0], kind='stable')]
    return [points[i] for i in order]


def points_from_table(tab, objectives=('accuracy', 'mean_response_ms')):
    """`ParetoPoint` list from a results table."""
    cols = [np.asarray(tab[name], dtype=float) for name in objectives]
    return [ParetoPoint(config_id=int(cid),
                        objectives=tuple(float(c[i]) for c in cols))
            for i, cid in enumerate(tab['config_id'])]


def points_from_results(results, objectives=('accuracy', 'mean_response_ms')):
    return points_from_table(results_table(results), objectives)


def front_table(front, objectives):
    """Front as a table of ``config_id`` and objective columns."""
    tab = Table(names=['config_id'] + list(objectives),
                dtype=[int] + [float] * len(objectives))
    for p in front:
        tab.add_row([p.config_id] + list(p.objectives))
    return tab


def front_summary(front, objectives):
    """Ranges of each objective over a front and its extreme configurations.

    Returns
    -------
    summary : dict
        ``n_points``, ``ranges`` (objective to ``[min, max]``), and
        ``lower_config_id`` / ``upper_config_id``, the configurations with
        the lowest and highest first objective.

    """
    if not front:
        return {'n_points': 0, 'ranges': {}, 'lower_config_id': None,
                'upper_config_id': None}
    values = np.array([p.objectives for p in front], dtype=float)
    lo = int(np.argmin(values[:, 0]))
    hi = int(np.argmax(values[:, 0]))
    return {
        'n_points': len(front),
        'ranges': {name: [float(values[:, i].min()), float(values[:, i].max())]
                   for i, name in enumerate(objectives)},
        'lower_config_id': front[lo].config_id,
        'upper_config_id': front[hi].config_id}


def activity_report(tab, min_accuracy):
    """Per-activity F1 of the configurations reaching ``min_accuracy``."""
    f1_cols = [f'f1_{a.name}' for a in Activity]
    rows = tab[np.asarray(tab['accuracy']) >= min_accuracy]
    return rows[['config_id', 'test_user', 'accuracy', 'macro_f1'] + f1_cols]


# ---------- NSGA-II ----------

@dataclass(frozen=True, eq=False)
class Trial:
    """A distinct evaluated configuration."""
    config: Configuration
    objectives: tuple
    result: object = field(default=None, repr=False)


def _objectives_of(result, objectives):
    if isinstance(result, EvaluationResult):
        row = dict(zip(RESULT_COLUMNS, result.as_row()))
        return tuple(float(row[name]) for name in objectives)
    values = tuple(float(v) for v in result)
    if len(values) != len(objectives):
        raise ValueError(f'Evaluator returned {len(values)} objective(s), '
                         f'expected {len(objectives)}')
    return values


def _fast_non_dominated_sort(f):
    """Front rank (0 = non-dominated) of each row of a minimization
    matrix."""
    n = len(f)
    no_worse = (f[:, np.newaxis, :] <= f[np.newaxis, :, :]).all(axis=-1)
    better = (f[:, np.newaxis, :] < f[np.newaxis, :, :]).any(axis=-1)
    dominates = no_worse & better  # [i, j]: i dominates j
    n_dominators = dominates.sum(axis=0)
    rank = np.full(n, -1)
    current = np.flatnonzero(n_dominators == 0)
    level = 0
    while len(current):
        rank[current] = level
        n_dominators = n_dominators - dominates[current].sum(axis=0)
        n_dominators[rank >= 0] = -1
        current = np.flatnonzero(n_dominators == 0)
        level += 1
    return rank


def _crowding_distance(f):
    n, m = f.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for j in range(m):
        order = np.argsort(f[:, j], kind='stable')
        span = f[order[-1], j] - f[order[0], j]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (f[order[2:], j] - f[order[:-2], j]) / span
    return dist


def _rank_and_crowd(f):
    rank = _fast_non_dominated_sort(f)
    crowd = np.zeros(len(f))
    for level in np.unique(rank):
        members = np.flatnonzero(rank == level)
        crowd[members] = _crowding_distance(f[members])
    return rank, crowd


def _survivors(f, size):
    """Indices kept by elitist selection: whole fronts, then the least
    crowded members of the first front that does not fit."""
    rank, crowd = _rank_and_crowd(f)
    order = np.lexsort((-crowd, rank))
    return order[:size]


def nsga2_search(space, evaluator, trials=1000, population=None, seed=None,
                 crossover_rate=None, mutation_rate=None,
                 objectives=('accuracy', 'mean_response_ms'),
                 directions=None, initial=None):
    """Multi-objective search of a configuration space with NSGA-II.

    Every proposed genome counts as a trial; genomes seen before are not
    re-evaluated. Generation ``g`` draws from a generator seeded with
    ``(seed, g)``.

    Parameters
    ----------
    space : `SearchSpace`

    evaluator : callable
        Maps a `~harknn.evaluation.Configuration` to an
        `~harknn.evaluation.EvaluationResult` or to a sequence of
        objective values. An exception marks the trial invalid.

    trials : int
        Number of proposed genomes.

    population : int or `None`
        Default is ``conf.nsga_population``.

    seed : int or `None`
        Default is ``conf.default_seed``.

    crossover_rate : float or `None`
        Probability of uniform crossover. Default is
        ``conf.nsga_crossover_rate``.

    mutation_rate : float or `None`
        Per-gene probability of a random reset. Default is one over the
        number of axes.

    objectives : tuple of str
        Result columns to optimize.

    directions : tuple of {'max', 'min'} or `None`
        Default from the objective names.

    initial : list of tuple or `None`
        Genomes (axis indices) of the first generation. Random if `None`.

    Returns
    -------
    evaluated : list of `Trial`
        Distinct valid evaluations in order of first evaluation.

    Raises
    ------
    ValueError
        ``trials < population`` or ``population < 4``.

    """
    if population is None:
        population = conf.nsga_population
    if seed is None:
        seed = conf.default_seed
    if crossover_rate is None:
        crossover_rate = conf.nsga_crossover_rate
    if mutation_rate is None:
        mutation_rate = 1 / len(AXES)
    if directions is None:
        directions = default_directions(objectives)
    if population < 4 or trials < population:
        raise ValueError('Need trials >= population >= 4, got '
                         f'trials={trials}, population={population}')
    shape = np.array(space.shape)
    signs = np.array([-1.0 if d == 'max' else 1.0 for d in directions])

    cache = {}
    evaluated = []
    n_trials = 0

    def evaluate(genome):
        nonlocal n_trials
        n_trials += 1
        if genome in cache:
            return cache[genome]
        config = space.config(genome)
        try:
            result = evaluator(config)
            values = _objectives_of(result, objectives)
        except Exception as exc:
            log.warning(f'Trial on config {config.config_id} failed: {exc}')
            cache[genome] = None
            return None
        cache[genome] = values
        evaluated.append(Trial(config=config, objectives=values,
                               result=result))
        return values

    def random_genome(rng):
        return tuple(int(v) for v in rng.integers(shape))

    # Generation 0
    rng = np.random.default_rng([seed, 0])
    if initial is None:
        genomes = [random_genome(rng) for _ in range(population)]
    else:
        genomes = [tuple(int(i) for i in g) for g in initial]
    parents = []
    for g in genomes:
        if n_trials >= trials:
            break
        if evaluate(g) is not None and g not in parents:
            parents.append(g)

    generation = 0
    while n_trials < trials:
        generation += 1
        rng = np.random.default_rng([seed, generation])
        if not parents:
            parents = [random_genome(rng)]
            if evaluate(parents[0]) is None:
                parents = []
            continue

        f = np.array([cache[g] for g in parents]) * signs
        rank, crowd = _rank_and_crowd(f)

        def tournament():
            i, j = rng.integers(len(parents), size=2)
            if (rank[j], -crowd[j]) < (rank[i], -crowd[i]):
                return parents[j]
            return parents[i]

        offspring = []
        while len(offspring) < population and n_trials < trials:
            a, b = tournament(), tournament()
            if rng.random() < crossover_rate:
                pick = rng.random(len(AXES)) < 0.5
                child = [x if p else y for x, y, p in zip(a, b, pick)]
            else:
                child = list(a)
            for i in np.flatnonzero(rng.random(len(AXES)) < mutation_rate):
                child[i] = int(rng.integers(shape[i]))
            child = tuple(child)
            if evaluate(child) is not None:
                offspring.append(child)

        pool = list(dict.fromkeys(parents + offspring))
        f = np.array([cache[g] for g in pool]) * signs
        parents = [pool[i] for i in _survivors(f, population)]
        log.info(f'Generation {generation}: {n_trials} trials, '
                 f'{len(evaluated)} distinct configurations')

    return evaluated


# ---------- Importance ----------

@dataclass(frozen=True)
class ImportanceReport:
    """Variance shares of a metric over a full hyperparameter grid."""
    metric: str
    main: dict
    pairwise: dict
    residual: float
    total_variance: float

    def ranking(self):
        """Axes by decreasing main-effect share."""
        return sorted(self.main, key=lambda a: -self.main[a])

    def as_dict(self):
        return {'metric': self.metric, 'main': dict(self.main),
                'pairwise': {f'{a}:{b}': v
                             for (a, b), v in self.pairwise.items()},
                'residual': self.residual,
                'total_variance': self.total_variance}

    def as_table(self):
        names = list(self.main) + [f'{a}:{b}' for a, b in self.pairwise]
        shares = list(self.main.values()) + list(self.pairwise.values())
        return Table([names + ['residual'], shares + [self.residual]],
                     names=['effect', 'share'])


def hyperparameter_importance(tab, metric, axes=AXES):
    """Exact functional ANOVA of a metric over a full grid.

    Main effect of an axis is the variance of the metric averaged over
    all other axes; a pairwise effect is the variance of the 2-D marginal
    means once both main effects are removed. Shares are effects over the
    total variance, and the residual gathers higher-order interactions.

    Parameters
    ----------
    tab : ``astropy.table.Table``
        Results of one user and frequency pair, covering every
        combination of the ``axes`` values exactly once.

    metric : str
        Column to decompose.

    axes : tuple of str

    Raises
    ------
    ValueError
        Not a full grid, or results from several users or frequencies.

    ConstantMetricError
        The metric has no variance.

    """
    for col in ('test_user', 'train_hz', 'test_hz'):
        if col in tab.colnames and len(np.unique(tab[col])) > 1:
            raise ValueError(f'Importance needs a single {col}')

    levels = [np.unique(np.asarray(tab[a])) for a in axes]
    shape = tuple(len(lv) for lv in levels)
    index = tuple(np.searchsorted(lv, np.asarray(tab[a]))
                  for lv, a in zip(levels, axes))
    flat = np.ravel_multi_index(index, shape)
    if len(tab) != np.prod(shape) or len(np.unique(flat)) != len(tab):
        raise ValueError(f'{len(tab)} rows do not form a full '
                         f'{" x ".join(map(str, shape))} grid')

    y = np.empty(shape)
    y.flat[flat] = np.asarray(tab[metric], dtype=float)
    if np.ptp(y) == 0:
        raise ConstantMetricError(f'Metric {metric} is constant')

    mu = y.mean()
    total = np.mean((y - mu) ** 2)
    n = len(axes)
    effects = {}
    for i in range(n):
        others = tuple(a for a in range(n) if a != i)
        effects[i] = y.mean(axis=others) - mu
    main = {axes[i]: float(np.mean(effects[i] ** 2) / total)
            for i in range(n)}

    pairwise = {}
    for i, j in itertools.combinations(range(n), 2):
        others = tuple(a for a in range(n) if a not in (i, j))
        m_ij = y.mean(axis=others) if others else y
        f_ij = (m_ij - mu - effects[i][:, np.newaxis] -
                effects[j][np.newaxis, :])
        pairwise[axes[i], axes[j]] = float(np.mean(f_ij ** 2) / total)

    residual = 1.0 - sum(main.values()) - sum(pairwise.values())
    return ImportanceReport(metric=metric, main=main, pairwise=pairwise,
                            residual=float(residual),
                            total_variance=float(total))


# ---------- Correlations and sweeps ----------

def pearson_correlation(xs, ys):
    """Pearson correlation coefficient.

    Raises
    ------
    ValueError
        Lengths differ or fewer than 2 values.

    ConstantMetricError
        Either input is constant.

    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise ValueError('Need two 1-D inputs of equal length >= 2')
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        raise ConstantMetricError('Correlation of a constant input')
    r, _ = pearsonr(xs, ys)
    return float(np.clip(r, -1, 1))


@dataclass(frozen=True, eq=False)
class Sweep:
    """Results of a one-axis sweep, aligned with the swept values."""
    axis: str
    values: list
    results: list

    def metric(self, name):
        tab = results_table(self.results)
        return np.asarray(tab[name], dtype=float)


def fixed_value_sweep(axis, sweep_values, fixed_values, evaluator):
    """Evaluate one configuration per value of one axis.

    Parameters
    ----------
    axis : {'window_size', 'overlap', 'k'}

    sweep_values : sequence

    fixed_values : dict
        Values of the other `~harknn.evaluation.Configuration` fields.

    evaluator : callable
        Maps a configuration to an `~harknn.evaluation.EvaluationResult`.

    Returns
    -------
    sweep : `Sweep`
        Invalid combinations are skipped with a warning.

    """
    if axis not in ('window_size', 'overlap', 'k'):
        raise ValueError(f'Cannot sweep {axis}')
    values, results = [], []
    for v in sweep_values:
        params = dict(fixed_values)
        params[axis] = v
        config = Configuration(**params)
        if not config.is_valid():
            warnings.warn(f'Skipping {axis}={v}: window or step too small',
                          AstropyUserWarning)
            continue
        values.append(v)
        results.append(evaluator(config))
    return Sweep(axis=axis, values=values, results=results)


def sweep_correlations(sweep, metrics=('accuracy', 'mean_response_ms',
                                       'energy_mJ')):
    """Pearson r of the swept value against each metric; NaN where the
    metric is constant or the sweep has fewer than 2 values."""
    if len(sweep.values) < 2:
        log.warning(f'The {sweep.axis} sweep has {len(sweep.values)} '
                    'value(s), no correlation computed')
        return {name: math.nan for name in metrics}
    out = {}
    for name in metrics:
        try:
            out[name] = pearson_correlation(sweep.values, sweep.metric(name))
        except ConstantMetricError:
            log.warning(f'{name} is constant over the {sweep.axis} sweep')
            out[name] = math.nan
    return out


# ---------- Frequencies ----------

@dataclass(frozen=True, eq=False)
class FrequencyMatrix:
    """Accuracy of one user for each train and test frequency.

    Invalid cells (window or step too small, or no instances) are NaN.

    """
    user: int
    train_freqs: tuple
    test_freqs: tuple
    accuracy: np.ndarray
    results: dict = field(default_factory=dict, repr=False)

    @property
    def valid(self):
        return ~np.isnan(self.accuracy)

    def _cells(self, func):
        if not self.valid.any():
            return []
        best = func(self.accuracy[self.valid])
        rows, cols = np.nonzero(self.valid & (self.accuracy == best))
        return [(self.train_freqs[i], self.test_freqs[j])
                for i, j in zip(rows, cols)]

    @property
    def argmax(self):
        """(train, test) frequency pairs of the highest accuracy."""
        return self._cells(np.max)

    @property
    def argmin(self):
        return self._cells(np.min)

    def as_table(self):
        """Train frequencies along rows, one column per test frequency."""
        tab = Table([list(self.train_freqs)], names=['train_hz'])
        for j, hz in enumerate(self.test_freqs):
            tab[f'test_{hz:g}'] = self.accuracy[:, j]
        return tab


def frequency_matrix(users, train_freqs, test_freqs, config, evaluator):
    """Accuracy matrices of a configuration over frequency pairs.

    Parameters
    ----------
    users : sequence of int

    train_freqs, test_freqs : sequence of float

    config : `~harknn.evaluation.Configuration`
        Window size given at 100 Hz.

    evaluator : `~harknn.evaluation.Evaluator`

    Returns
    -------
    matrices : dict
        User to `FrequencyMatrix`.

    """
    train_freqs = tuple(float(f) for f in train_freqs)
    test_freqs = tuple(float(f) for f in test_freqs)
    matrices = {}
    for user in users:
        acc = np.full((len(train_freqs), len(test_freqs)), np.nan)
        results = {}
        for i, tr in enumerate(train_freqs):
            for j, te in enumerate(test_freqs):
                cell = config.with_frequencies(tr, te)
                if not cell.is_valid():
                    continue
                try:
                    res = evaluator.evaluate(cell, user)
                except NoInstancesError as exc:
                    log.warning(f'User {user}, {tr:g}/{te:g} Hz: {exc}')
                    continue
                acc[i, j] = res.accuracy
                results[tr, te] = res
        matrices[user] = FrequencyMatrix(user=user, train_freqs=train_freqs,
                                         test_freqs=test_freqs, accuracy=acc,
                                         results=results)
    return matrices


def frequency_pareto(configs, user, test_freqs, evaluator,
                     objectives=('accuracy', 'mean_response_ms'),
                     directions=None):
    """Pareto front of configurations trained at 100 Hz and tested at
    each frequency.

    Returns
    -------
    fronts : dict
        Test frequency to ``(front, summary, results)``. Configurations
        invalid at a frequency are left out.

    """
    if directions is None:
        directions = default_directions(objectives)
    fronts = {}
    for hz in test_freqs:
        results = []
        for c in configs:
            cell = c.with_frequencies(100.0, hz)
            if not cell.is_valid():
                continue
            try:
                results.append(evaluator.evaluate(cell, user))
            except NoInstancesError as exc:
                log.warning(f'Config {c.config_id} at {hz:g} Hz: {exc}')
        front = pareto_front(points_from_results(results, objectives),
                             directions)
        fronts[float(hz)] = (front, front_summary(front, objectives), results)
        log.info(f'{hz:g} Hz: {len(results)} valid configurations, '
                 f'{len(front)} on the front')
    return fronts
