"""Leave-one-subject-out evaluation of one configuration.

A result holds accuracy, per-activity F1, mean response time per
inference and modeled energy. Response time covers three stages, timed
separately for each test window:

* ``read``: parse the window's rows from the rendered test recording;
* ``extract``: compute and normalize the feature vector;
* ``infer``: kNN prediction.

"""
# STDLIB
import abc
import dataclasses
import io
import math
import time
from dataclasses import dataclass, field

# THIRD-PARTY
import numpy as np
from astropy.table import Table

# HARKNN
from . import conf
from .dataset import (FREQUENCIES, Activity, activity_table, downsample,
                      split_loso)
from .features import extract_batch, fit_normalizer, window_features
from .knn import DISTANCES, KnnModel, predict
from .logger import log
from .segmentation import (WindowSpec, cap_instances, instance_target,
                           rescale_window, segment)
from .utils import read_table, write_table

__all__ = ['Configuration', 'EvaluationResult', 'F1Scores', 'EnergyMeter',
           'ConstantPowerMeter', 'MeterConfigurationError', 'NoInstancesError',
           'TestStream', 'InferencePipeline', 'ResponseTiming', 'Evaluator',
           'evaluate_config', 'f1_scores', 'confusion_matrix',
           'measure_response', 'estimate_energy', 'count_valid',
           'results_table', 'write_results', 'read_results', 'RESULT_COLUMNS',
           'STAGES']

STAGES = ('read', 'extract', 'infer')

RESULT_COLUMNS = (
    ['config_id', 'window_size', 'overlap', 'k', 'distance', 'train_hz',
     'test_hz', 'test_user', 'accuracy', 'macro_f1'] +
    [f'f1_{a.name}' for a in Activity] +
    ['mean_response_ms', 'energy_mJ', 'n_train', 'n_test'] +
    [f'{s}_ms' for s in STAGES])


class NoInstancesError(ValueError):
    """A configuration produces no window to train or test on."""


class MeterConfigurationError(ValueError):
    """An energy meter is configured with invalid parameters."""


@dataclass(frozen=True)
class Configuration:
    """One point of the hyperparameter grid.

    ``window_size`` is in samples at 100 Hz. At other frequencies it is
    rescaled so that windows keep the same duration.

    """
    window_size: int
    overlap: float
    k: int
    distance: str
    train_hz: float = 100.0
    test_hz: float = 100.0
    config_id: int = -1

    def __post_init__(self):
        if int(self.window_size) != self.window_size or self.window_size < 1:
            raise ValueError(f'Invalid window size {self.window_size}')
        if not 0 <= self.overlap < 1:
            raise ValueError(f'Overlap must be in [0, 1), got {self.overlap}')
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f'k must be a positive integer, got {self.k}')
        distance = str(self.distance).lower()
        if distance not in DISTANCES:
            raise ValueError(f'{self.distance} is not a valid distance')
        for hz in (self.train_hz, self.test_hz):
            if float(hz) not in FREQUENCIES:
                raise ValueError(f'{hz} Hz is not a supported frequency')
        object.__setattr__(self, 'window_size', int(self.window_size))
        object.__setattr__(self, 'overlap', round(float(self.overlap), 9))
        object.__setattr__(self, 'k', int(self.k))
        object.__setattr__(self, 'distance', distance)
        object.__setattr__(self, 'train_hz', float(self.train_hz))
        object.__setattr__(self, 'test_hz', float(self.test_hz))
        object.__setattr__(self, 'config_id', int(self.config_id))

    def rescaled_window(self, frequency_hz):
        """Window size in samples at ``frequency_hz``."""
        return rescale_window(self.window_size, frequency_hz)

    def window_spec(self, frequency_hz):
        """`~harknn.segmentation.WindowSpec` at ``frequency_hz``."""
        return WindowSpec(self.rescaled_window(frequency_hz), self.overlap)

    def is_valid(self):
        """Whether both the train and test windows have at least 2 samples
        and an unclamped step of at least 1 sample."""
        for hz in (self.train_hz, self.test_hz):
            size = self.rescaled_window(hz)
            if size < 2 or WindowSpec(size, self.overlap).raw_step < 1:
                return False
        return True

    def with_frequencies(self, train_hz, test_hz):
        return dataclasses.replace(self, train_hz=train_hz, test_hz=test_hz)

    def as_dict(self):
        return dataclasses.asdict(self)


def count_valid(configs, frequency_hz=None):
    """Number of valid configurations, optionally after moving both train
    and test to ``frequency_hz``."""
    if frequency_hz is not None:
        configs = [c.with_frequencies(frequency_hz, frequency_hz)
                   for c in configs]
    return sum(c.is_valid() for c in configs)


@dataclass(frozen=True, eq=False)
class EvaluationResult:
    """Metrics of one configuration on one held-out user.

    ``f1_per_activity`` has one entry per `~harknn.dataset.Activity`, NaN
    for activities absent from the test user's windows.

    """
    config: Configuration
    test_user: int
    accuracy: float
    f1_per_activity: np.ndarray
    macro_f1: float
    mean_response_ms: float
    energy_mj: float
    n_train: int
    n_test: int
    stage_ms: dict = field(default_factory=dict)
    confusion: np.ndarray = field(default=None, repr=False)

    @property
    def config_id(self):
        return self.config.config_id

    def as_row(self):
        """Values in `RESULT_COLUMNS` order."""
        c = self.config
        return ([c.config_id, c.window_size, c.overlap, c.k, c.distance,
                 c.train_hz, c.test_hz, self.test_user, self.accuracy,
                 self.macro_f1] +
                [float(v) for v in self.f1_per_activity] +
                [self.mean_response_ms, self.energy_mj, self.n_train,
                 self.n_test] +
                [self.stage_ms.get(s, math.nan) for s in STAGES])


# ---------- Metrics ----------

@dataclass(frozen=True)
class F1Scores:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    macro: float


def confusion_matrix(truth, predicted, n_classes=len(Activity)):
    """Counts with truth along rows and predictions along columns.

    Labels are 1-based class codes.

    """
    truth = np.asarray(truth, dtype=int) - 1
    predicted = np.asarray(predicted, dtype=int) - 1
    cm = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(cm, (truth, predicted), 1)
    return cm


def f1_scores(confusion):
    """Per-class precision, recall and F1 of a confusion matrix.

    Precision of a never-predicted class is 0, so a present class that is
    never predicted has F1 0. Classes absent from the truth (zero row)
    have undefined recall and F1 (NaN) and are left out of the macro
    average.

    Parameters
    ----------
    confusion : array-like
        Square matrix, truth along rows.

    Returns
    -------
    scores : `F1Scores`

    """
    cm = np.asarray(confusion)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or np.any(cm < 0):
        raise ValueError('Confusion matrix must be square and nonnegative')
    tp = np.diag(cm).astype(float)
    support = cm.sum(axis=1)
    predicted = cm.sum(axis=0)

    precision = np.zeros_like(tp)
    np.divide(tp, predicted, out=precision, where=predicted > 0)
    recall = np.full_like(tp, np.nan)
    np.divide(tp, support, out=recall, where=support > 0)

    f1 = np.full_like(tp, np.nan)
    present = support > 0
    pr = precision + np.where(present, recall, 0)
    f1[present] = 0.0
    ok = present & (pr > 0)
    f1[ok] = 2 * precision[ok] * recall[ok] / pr[ok]

    macro = float(f1[present].mean()) if present.any() else math.nan
    return F1Scores(precision=precision, recall=recall, f1=f1,
                    support=support, macro=macro)


# ---------- Energy ----------

class EnergyMeter(abc.ABC):
    """Converts a mean response time into energy per inference."""

    @abc.abstractmethod
    def energy_mj(self, mean_response_ms):
        """Energy in millijoules for one inference."""


class ConstantPowerMeter(EnergyMeter):
    """Constant average power draw.

    Parameters
    ----------
    power_watts : float or `None`
        Default is ``conf.power_watts``.

    Raises
    ------
    MeterConfigurationError
        Nonpositive power.

    """
    def __init__(self, power_watts=None):
        if power_watts is None:
            power_watts = conf.power_watts
        if not power_watts > 0:
            raise MeterConfigurationError(
                f'Power must be positive, got {power_watts} W')
        self.power_watts = float(power_watts)

    def energy_mj(self, mean_response_ms):
        # W x ms = mJ
        return self.power_watts * mean_response_ms

    def __repr__(self):
        return f'ConstantPowerMeter(power_watts={self.power_watts})'


def estimate_energy(mean_response_ms, meter):
    """Energy in mJ of an inference taking ``mean_response_ms``."""
    if mean_response_ms < 0:
        raise ValueError(f'Negative response time {mean_response_ms}')
    return meter.energy_mj(mean_response_ms)


# ---------- Response time ----------

class TestStream(object):
    """Test recording rendered as text rows, one row per sample.

    Each row is ``timestamp activity_id channel...``, as in a PAMAP2 file
    limited to the kept channels. Values are written with enough digits
    to read back exactly.

    Parameters
    ----------
    session : `~harknn.dataset.SensorSession`
        Test session at the test frequency.

    windows : list of `~harknn.segmentation.Window`
        Windows of ``session`` to infer.

    rows : list of str or `None`
        Rendered rows of ``session``, to share between streams.

    """
    __test__ = False  # not a pytest class

    def __init__(self, session, windows, rows=None):
        self.session = session
        self.windows = list(windows)
        self.rows = self.render(session) if rows is None else rows
        self._n_channels = session.channels.shape[1]

    @staticmethod
    def render(session):
        ids = activity_table()
        codes = np.array([ids.to_dataset_id(Activity(a))
                          for a in range(1, len(Activity) + 1)])
        data = np.column_stack([session.timestamps,
                                codes[session.labels - 1], session.channels])
        buf = io.StringIO()
        np.savetxt(buf, data, fmt='%.17g')
        return buf.getvalue().splitlines()

    def __len__(self):
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    def read(self, window):
        """Parse the samples of a window from the rendered rows."""
        n = len(window.samples)
        rows = self.rows[window.start_index:window.start_index + n]
        return np.loadtxt(rows, usecols=range(2, 2 + self._n_channels),
                          ndmin=2)


class InferencePipeline(object):
    """The three timed stages applied to each test window."""

    def __init__(self, model, normalizer, k):
        self.model = model
        self.normalizer = normalizer
        self.k = k

    def read(self, stream, window):
        return stream.read(window)

    def extract(self, samples):
        return self.normalizer.transform(window_features(samples))

    def infer(self, features):
        return predict(self.model, features, self.k)


@dataclass(frozen=True)
class ResponseTiming:
    mean_ms: float
    stage_ms: dict
    predictions: np.ndarray


def measure_response(pipeline, test_stream, warmup=None):
    """Mean per-inference response time of a pipeline over a stream.

    The first ``warmup`` inferences (cycling over the stream) are run and
    discarded, then every window is timed once with
    `time.perf_counter`.

    Parameters
    ----------
    pipeline
        Object with ``read(stream, window)``, ``extract(samples)`` and
        ``infer(features)`` methods.

    test_stream : `TestStream`

    warmup : int or `None`
        Default is ``conf.warmup_inferences``.

    Returns
    -------
    timing : `ResponseTiming`
        Mean total and per-stage milliseconds, and the prediction of each
        window in stream order.

    Raises
    ------
    ValueError
        Empty stream.

    """
    if warmup is None:
        warmup = conf.warmup_inferences
    windows = list(test_stream)
    n = len(windows)
    if n == 0:
        raise ValueError('Cannot measure response time without inferences')

    for i in range(warmup):
        w = windows[i % n]
        pipeline.infer(pipeline.extract(pipeline.read(test_stream, w)))

    totals = np.zeros(len(STAGES))
    predictions = np.empty(n, dtype=int)
    clock = time.perf_counter
    for i, w in enumerate(windows):
        t0 = clock()
        samples = pipeline.read(test_stream, w)
        t1 = clock()
        features = pipeline.extract(samples)
        t2 = clock()
        predictions[i] = pipeline.infer(features)
        t3 = clock()
        totals += (t1 - t0, t2 - t1, t3 - t2)

    stage_ms = {s: 1000 * t / n for s, t in zip(STAGES, totals)}
    return ResponseTiming(mean_ms=sum(stage_ms.values()), stage_ms=stage_ms,
                          predictions=predictions)


# ---------- Evaluation ----------

@dataclass(frozen=True, eq=False)
class _TrainingSet:
    values: np.ndarray
    labels: np.ndarray
    normalizer: object


class Evaluator(object):
    """LOSO evaluator bound to a dataset.

    Downsampled sessions, reference instance targets, normalized training
    sets and rendered test recordings are cached, so evaluating several
    ``k`` and distance values of one window setting segments and extracts
    only once.

    Parameters
    ----------
    sessions : list of `~harknn.dataset.SensorSession`
        Cleaned sessions at 100 Hz, one per user.

    meter : `EnergyMeter` or `None`
        Default is a `ConstantPowerMeter` at ``conf.power_watts``.

    seed : int or `None`
        Seed of instance capping. Default is ``conf.default_seed``.

    warmup : int or `None`
        Default is ``conf.warmup_inferences``.

    """
    def __init__(self, sessions, meter=None, seed=None, warmup=None):
        self.sessions = {s.user_id: s for s in sessions}
        if len(self.sessions) != len(sessions):
            raise ValueError('Sessions must have distinct users')
        self.meter = ConstantPowerMeter() if meter is None else meter
        self.seed = conf.default_seed if seed is None else seed
        self.warmup = warmup
        self._downsampled = {}
        self._targets = {}
        self._training = {}
        self._rows = {}

    @property
    def users(self):
        return sorted(self.sessions)

    def _session(self, user, hz):
        key = (user, hz)
        if key not in self._downsampled:
            self._downsampled[key] = downsample(self.sessions[user], hz)
        return self._downsampled[key]

    def _training_set(self, config, test_user, train_sessions):
        hz = config.train_hz
        train = [self._session(s.user_id, hz) for s in train_sessions]
        if not train:
            raise NoInstancesError('No training user left for user '
                                   f'{test_user}')
        if (test_user, hz) not in self._targets:
            self._targets[test_user, hz] = instance_target(train)
        target, distribution = self._targets[test_user, hz]

        spec = config.window_spec(hz)
        key = (test_user, hz, spec.size, spec.overlap)
        if key not in self._training:
            windows = segment(train, spec)
            if not windows:
                raise NoInstancesError(
                    f'No training instances for window {spec.size} at '
                    f'{hz} Hz')
            capped = cap_instances(windows, target, distribution, self.seed)
            values, labels, _ = extract_batch(capped)
            normalizer = fit_normalizer(values)
            self._training[key] = _TrainingSet(
                values=normalizer.transform(values), labels=labels,
                normalizer=normalizer)
        return self._training[key]

    def evaluate(self, config, test_user):
        """Evaluate ``config`` with ``test_user`` held out.

        Raises
        ------
        ValueError
            Invalid configuration, unknown user, or ``k`` above the
            number of training instances.

        NoInstancesError
            No training or test window.

        """
        train_sessions, test = split_loso(
            [self.sessions[u] for u in self.users], test_user)
        if not config.is_valid():
            raise ValueError(f'{config} has a window below 2 samples or a '
                             'step below 1 sample')

        training = self._training_set(config, test_user, train_sessions)
        model = KnnModel(values=training.values, labels=training.labels,
                         max_instances=len(training.labels),
                         distance=config.distance)
        if config.k > len(model):
            raise ValueError(f'k={config.k} exceeds the {len(model)} '
                             'training instances')

        test = self._session(test.user_id, config.test_hz)
        windows = segment([test], config.window_spec(config.test_hz))
        if not windows:
            raise NoInstancesError(
                f'No test instances for user {test_user} with window '
                f'{config.rescaled_window(config.test_hz)} at '
                f'{config.test_hz} Hz')
        if (test_user, config.test_hz) not in self._rows:
            self._rows[test_user, config.test_hz] = TestStream.render(test)
        stream = TestStream(test, windows,
                            rows=self._rows[test_user, config.test_hz])

        timing = measure_response(
            InferencePipeline(model, training.normalizer, config.k), stream,
            warmup=self.warmup)

        truth = np.array([int(w.activity) for w in windows])
        cm = confusion_matrix(truth, timing.predictions)
        scores = f1_scores(cm)
        accuracy = float(np.trace(cm) / cm.sum())
        result = EvaluationResult(
            config=config, test_user=int(test_user), accuracy=accuracy,
            f1_per_activity=scores.f1, macro_f1=scores.macro,
            mean_response_ms=timing.mean_ms,
            energy_mj=estimate_energy(timing.mean_ms, self.meter),
            n_train=len(model), n_test=len(windows),
            stage_ms=timing.stage_ms, confusion=cm)

        log.info(f'config {config.config_id} user {test_user}: '
                 f'accuracy {accuracy:.4f}, {timing.mean_ms:.3f} ms')
        return result


def evaluate_config(config, sessions, test_user, meter=None, seed=None,
                    warmup=None):
    """Evaluate one configuration with one user held out.

    Parameters
    ----------
    config : `Configuration`

    sessions : list of `~harknn.dataset.SensorSession`
        Cleaned 100 Hz sessions of all users.

    test_user : int

    meter : `EnergyMeter` or `None`

    seed : int or `None`

    warmup : int or `None`

    Returns
    -------
    result : `EvaluationResult`

    """
    return Evaluator(sessions, meter=meter, seed=seed,
                     warmup=warmup).evaluate(config, test_user)


# ---------- Results files ----------

def results_table(results, header=None):
    """Results as a table with `RESULT_COLUMNS`.

    ``header`` items are stored as ``key = value`` comment lines.

    """
    dtypes = ([int, int, float, int, 'U9', float, float, int, float, float] +
              [float] * len(Activity) + [float, float, int, int] +
              [float] * len(STAGES))
    if results:
        tab = Table(rows=[r.as_row() for r in results], names=RESULT_COLUMNS,
                    dtype=dtypes)
    else:
        tab = Table(names=RESULT_COLUMNS, dtype=dtypes)
    tab.meta['comments'] = [f'{key} = {val}'
                            for key, val in (header or {}).items()]
    return tab


def write_results(results, filename, header=None, overwrite=True):
    """Write results CSV with a commented header."""
    tab = results if isinstance(results, Table) else results_table(results)
    write_table(tab, filename, header=header, overwrite=overwrite)
    log.info(f'{len(tab)} result row(s) written to {filename}')


def read_results(filename):
    """Read a results CSV.

    Returns
    -------
    tab : ``astropy.table.Table``

    header : dict
        ``key = value`` comment lines.

    """
    return read_table(filename)
