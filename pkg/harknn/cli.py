"""Command-line interface of ``harknn``.

Every sub-command writes its reports to ``--out`` together with a copy of
the run log (``harknn.log``) and of the effective manifest
(``manifest.json``). Exit status is 0 on success, 1 if any evaluation or
analysis failed, and 2 on usage errors.

"""
# STDLIB
import argparse
import dataclasses
import functools
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

# THIRD-PARTY
from astropy.utils.exceptions import AstropyUserWarning

# HARKNN
from . import __version__, conf
from .dataset import (FREQUENCIES, clean, load_pamap2, load_sessions,
                      save_sessions, summarize)
from .evaluation import (ConstantPowerMeter, Configuration, Evaluator,
                         read_results, results_table, write_results)
from .logger import log
from .search import (SWEEP_DEFAULTS, ConstantMetricError, SearchSpace,
                     activity_report, default_directions, enumerate_grid,
                     fixed_value_sweep, frequency_matrix, frequency_pareto,
                     front_summary, front_table, hyperparameter_importance,
                     nsga2_search, pareto_front, points_from_table,
                     sweep_correlations)
from .utils import read_json, reproducibility_header, write_json, write_table

__all__ = ['RunManifest', 'ManifestError', 'run_harknn', 'EXPERIMENTS']

EXPERIMENTS = ('ingest', 'evaluate', 'sweep', 'pareto', 'importance',
               'freq-matrix', 'freq-pareto')
STRATEGIES = ('grid', 'nsga2', 'fixed')

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class ManifestError(ValueError):
    """Invalid or inconsistent run manifest."""


@dataclass
class RunManifest:
    """Everything needed to repeat a run.

    Loaded from JSON with `load`; fields absent from the file keep their
    defaults. ``space`` holds optional ``window_sizes``, ``overlaps``,
    ``ks`` and ``distances`` lists.

    """
    experiment: str
    dataset_dir: str = None
    out: str = 'harknn_out'
    seed: int = None
    users: list = None
    window: int = 900
    overlap: float = 0.0
    k: int = 9
    distance: str = 'manhattan'
    train_hz: float = 100.0
    test_hz: float = 100.0
    power_watts: float = None
    strategy: str = 'grid'
    trials: int = 1000
    population: int = None
    axis: str = None
    space: dict = field(default_factory=dict)
    results: str = None
    objectives: list = field(
        default_factory=lambda: ['accuracy', 'mean_response_ms'])
    metrics: list = field(
        default_factory=lambda: ['accuracy', 'mean_response_ms', 'energy_mJ'])
    min_accuracy: float = 0.0
    train_freqs: list = field(default_factory=lambda: list(FREQUENCIES))
    test_freqs: list = field(default_factory=lambda: list(FREQUENCIES))
    jobs: int = 1
    warmup: int = None

    @classmethod
    def load(cls, filename, **overrides):
        """Manifest from a JSON file; file values win over ``overrides``."""
        values = dict(overrides)
        try:
            values.update(read_json(filename))
        except (OSError, ValueError) as exc:
            raise ManifestError(f'Cannot read manifest {filename}: '
                                f'{exc}') from exc
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(values) - names)
        if unknown:
            raise ManifestError(f'Unknown manifest key(s) {unknown}')
        return cls(**values)

    def save(self, filename):
        write_json(dataclasses.asdict(self), filename)

    @property
    def effective_seed(self):
        return conf.default_seed if self.seed is None else self.seed

    def search_space(self):
        try:
            return SearchSpace(**self.space)
        except (TypeError, ValueError) as exc:
            raise ManifestError(f'Invalid search space: {exc}') from exc

    def configuration(self):
        try:
            return Configuration(
                window_size=self.window, overlap=self.overlap, k=self.k,
                distance=self.distance, train_hz=self.train_hz,
                test_hz=self.test_hz)
        except ValueError as exc:
            raise ManifestError(str(exc)) from exc

    def validate(self):
        """Raise `ManifestError` on inconsistent values."""
        if self.experiment not in EXPERIMENTS:
            raise ManifestError(f'Unknown experiment {self.experiment}')
        needs_data = self.experiment in ('ingest', 'evaluate', 'sweep',
                                         'freq-matrix', 'freq-pareto')
        if needs_data and not self.dataset_dir:
            raise ManifestError(f'{self.experiment} needs a dataset directory')
        if self.experiment in ('pareto', 'importance') and not self.results:
            raise ManifestError(f'{self.experiment} needs a results file')
        if self.strategy not in STRATEGIES:
            raise ManifestError(f'Unknown strategy {self.strategy}')
        if self.axis is not None and self.axis not in SWEEP_DEFAULTS:
            raise ManifestError(f'Cannot sweep {self.axis}')
        if self.jobs < 1:
            raise ManifestError(f'Invalid number of jobs {self.jobs}')
        if self.power_watts is not None and self.power_watts <= 0:
            raise ManifestError(f'Power must be positive, got '
                                f'{self.power_watts} W')
        for hz in list(self.train_freqs) + list(self.test_freqs):
            if float(hz) not in FREQUENCIES:
                raise ManifestError(f'{hz} Hz is not a supported frequency')
        try:
            default_directions(self.objectives)
        except ValueError as exc:
            raise ManifestError(str(exc)) from exc
        self.configuration()
        self.search_space()


# ---------- Parallel workers ----------

_WORKER_EVALUATOR = None


def _init_worker(dataset_dir, power_watts, seed, warmup):
    global _WORKER_EVALUATOR
    _WORKER_EVALUATOR = Evaluator(load_sessions(dataset_dir),
                                  meter=ConstantPowerMeter(power_watts),
                                  seed=seed, warmup=warmup)


def _evaluate_task(task):
    config, user = task
    try:
        return _WORKER_EVALUATOR.evaluate(config, user), None
    except ValueError as exc:
        return None, f'config {config.config_id} user {user}: {exc}'


class _Run(object):
    """State shared by the sub-commands of one invocation."""

    def __init__(self, manifest):
        self.manifest = manifest
        self.failed = False
        self._sessions = None
        self._evaluator = None

    @property
    def sessions(self):
        if self._sessions is None:
            self._sessions = load_sessions(self.manifest.dataset_dir)
            if not self._sessions:
                raise ValueError(f'No sessions found in '
                                 f'{self.manifest.dataset_dir}')
        return self._sessions

    @property
    def evaluator(self):
        if self._evaluator is None:
            m = self.manifest
            self._evaluator = Evaluator(
                self.sessions, meter=ConstantPowerMeter(m.power_watts),
                seed=m.effective_seed, warmup=m.warmup)
        return self._evaluator

    @property
    def users(self):
        if self.manifest.users:
            return [int(u) for u in self.manifest.users]
        return self.evaluator.users

    def header(self, space=None, **extra):
        return reproducibility_header(
            self.manifest.effective_seed, space=space,
            sessions=self.sessions, **extra)

    def path(self, name):
        return os.path.join(self.manifest.out, name)

    def fail(self, msg):
        log.error(msg)
        self.failed = True

    def evaluate_all(self, tasks):
        """Evaluate ``(config, user)`` pairs, in parallel if requested."""
        m = self.manifest
        results = []
        if m.jobs > 1 and len(tasks) > 1:
            warnings.warn('Response times measured by parallel workers are '
                          'not comparable with sequential runs',
                          AstropyUserWarning)
            init = (m.dataset_dir, m.power_watts, m.effective_seed, m.warmup)
            with ProcessPoolExecutor(max_workers=m.jobs,
                                     initializer=_init_worker,
                                     initargs=init) as pool:
                outcomes = list(pool.map(_evaluate_task, tasks))
        else:
            outcomes = []
            for config, user in tasks:
                try:
                    outcomes.append((self.evaluator.evaluate(config, user),
                                     None))
                except ValueError as exc:
                    outcomes.append((None, f'config {config.config_id} user '
                                           f'{user}: {exc}'))
        for res, err in outcomes:
            if err is None:
                results.append(res)
            else:
                self.fail(err)
        return results


# ---------- Sub-commands ----------

def cmd_ingest(run):
    """Parse, clean and cache a PAMAP2 directory; write a summary."""
    m = run.manifest
    raw = load_pamap2(m.dataset_dir,
                      max_workers=m.jobs if m.jobs > 1 else None)
    if not raw:
        raise ValueError(f'No PAMAP2 files in {m.dataset_dir}')
    sessions = [clean(s) for s in raw]
    save_sessions(sessions, run.path('sessions'))
    tab = summarize(sessions)
    write_table(tab, run.path('summary.csv'), header=reproducibility_header(
        m.effective_seed, sessions=sessions))
    tab.pprint(max_lines=-1, max_width=-1)
    return tab


def cmd_evaluate(run):
    """Evaluate one configuration for each requested user."""
    config = run.manifest.configuration()
    results = run.evaluate_all([(config, u) for u in run.users])
    tab = results_table(results)
    write_results(tab, run.path('results.csv'), header=run.header())
    tab.pprint(max_lines=-1, max_width=-1)
    return results


def cmd_sweep(run):
    """Grid, NSGA-II, or fixed-value sweep."""
    m = run.manifest
    space = m.search_space()
    results = []
    extra = {}

    if m.strategy == 'grid':
        configs = [c for c in enumerate_grid(space, m.train_hz, m.test_hz)
                   if c.is_valid()]
        results = run.evaluate_all([(c, u) for u in run.users
                                    for c in configs])

    elif m.strategy == 'nsga2':
        extra['trials'] = m.trials
        for user in run.users:
            evaluated = nsga2_search(
                space, functools.partial(run.evaluator.evaluate,
                                         test_user=user),
                trials=m.trials, population=m.population,
                seed=m.effective_seed, objectives=tuple(m.objectives))
            if not evaluated:
                run.fail(f'User {user}: no valid trial')
            results.extend(t.result for t in evaluated)

    else:
        axes = [m.axis] if m.axis else list(SWEEP_DEFAULTS)
        correlations = {}
        for user in run.users:
            for axis in axes:
                values, fixed = SWEEP_DEFAULTS[axis]
                fixed = dict(fixed, train_hz=m.train_hz, test_hz=m.test_hz)
                try:
                    sweep = fixed_value_sweep(
                        axis, values, fixed, functools.partial(
                            run.evaluator.evaluate, test_user=user))
                except ValueError as exc:
                    run.fail(f'User {user}, {axis} sweep: {exc}')
                    continue
                results.extend(sweep.results)
                if len(sweep.values) >= 2:
                    correlations[f'{user}:{axis}'] = sweep_correlations(
                        sweep, tuple(m.metrics))
        write_json({'header': run.header(space=space),
                    'correlations': correlations},
                   run.path('correlations.json'))

    write_results(results_table(results), run.path('results.csv'),
                  header=run.header(space=space, strategy=m.strategy,
                                    **extra))
    return results


def _results_by_user(run):
    tab, header = read_results(run.manifest.results)
    users = run.manifest.users or sorted(set(int(u)
                                             for u in tab['test_user']))
    out = {}
    for user in users:
        sub = tab[tab['test_user'] == int(user)]
        if len(sub) == 0:
            run.fail(f'User {user} has no row in {run.manifest.results}')
            continue
        out[int(user)] = sub
    return out, header


def cmd_pareto(run):
    """Pareto front of each user's results."""
    m = run.manifest
    objectives = tuple(m.objectives)
    directions = default_directions(objectives)
    by_user, header = _results_by_user(run)
    header = dict(header, objectives=','.join(objectives))
    summaries = {}
    for user, sub in by_user.items():
        groups = {}
        for row in sub:
            groups.setdefault((float(row['train_hz']),
                               float(row['test_hz'])), []).append(row.index)
        for (tr, te), rows in sorted(groups.items()):
            front = pareto_front(points_from_table(sub[rows], objectives),
                                 directions)
            suffix = '' if tr == te == 100 else f'_{tr:g}_{te:g}hz'
            name = f'front_user{user}{suffix}.csv'
            write_table(front_table(front, objectives), run.path(name),
                        header=header)
            summaries[name] = front_summary(front, objectives)
            log.info(f'User {user}: {len(front)} point(s) on the front')
        write_table(activity_report(sub, m.min_accuracy),
                    run.path(f'activity_f1_user{user}.csv'),
                    header=dict(header, min_accuracy=m.min_accuracy))
    write_json({'header': header, 'fronts': summaries},
               run.path('front_summary.json'))
    return summaries


def cmd_importance(run):
    """Grid ANOVA importance of each metric for each user."""
    m = run.manifest
    by_user, header = _results_by_user(run)
    reports = {}
    for user, sub in by_user.items():
        for metric in m.metrics:
            try:
                report = hyperparameter_importance(sub, metric)
            except ConstantMetricError as exc:
                run.fail(f'User {user}: constant metric ({exc})')
                continue
            except ValueError as exc:
                run.fail(f'User {user}, {metric}: {exc}')
                continue
            reports[f'{user}:{metric}'] = report.as_dict()
            write_table(report.as_table(),
                        run.path(f'importance_user{user}_{metric}.csv'),
                        header=header)
    write_json({'header': header, 'importance': reports},
               run.path('importance.json'))
    return reports


def cmd_freq_matrix(run):
    """Train/test frequency accuracy matrix of one configuration."""
    m = run.manifest
    config = m.configuration()
    matrices = frequency_matrix(run.users, m.train_freqs, m.test_freqs,
                                config, run.evaluator)
    header = run.header(config=str(config))
    summary = {}
    for user, mat in matrices.items():
        write_table(mat.as_table(), run.path(f'freq_matrix_user{user}.csv'),
                    header=header)
        summary[user] = {'argmax': mat.argmax, 'argmin': mat.argmin,
                         'n_valid': int(mat.valid.sum())}
    write_json({'header': header, 'matrices': summary},
               run.path('freq_matrix_summary.json'))
    return matrices


def cmd_freq_pareto(run):
    """Fronts of configurations trained at 100 Hz per test frequency."""
    m = run.manifest
    space = m.search_space()
    if m.results:
        tab, _ = read_results(m.results)
        ids = sorted(set(int(i) for i in tab['config_id']))
        configs = [space.config_from_id(i) for i in ids]
    else:
        configs = enumerate_grid(space)
    objectives = tuple(m.objectives)
    header = run.header(space=space, objectives=','.join(objectives))
    summary = {}
    all_results = []
    for user in run.users:
        fronts = frequency_pareto(configs, user, m.test_freqs, run.evaluator,
                                  objectives=objectives)
        for hz, (front, info, results) in fronts.items():
            all_results.extend(results)
            write_table(front_table(front, objectives),
                        run.path(f'front_user{user}_{hz:g}hz.csv'),
                        header=header)
            summary[f'{user}:{hz:g}'] = dict(info, n_valid=len(results))
    write_results(results_table(all_results), run.path('results.csv'),
                  header=header)
    write_json({'header': header, 'fronts': summary},
               run.path('freq_pareto_summary.json'))
    return summary


_COMMANDS = {'ingest': cmd_ingest, 'evaluate': cmd_evaluate,
             'sweep': cmd_sweep, 'pareto': cmd_pareto,
             'importance': cmd_importance, 'freq-matrix': cmd_freq_matrix,
             'freq-pareto': cmd_freq_pareto}


# ---------- Argument parsing ----------

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--manifest', help='JSON run manifest; its values '
                        'override the flags')
    common.add_argument('--dataset-dir', help='PAMAP2 Protocol directory or '
                        'ingest cache')
    common.add_argument('--out', help='output directory')
    common.add_argument('--user', type=int, action='append', dest='users',
                        help='held-out user (repeatable); default all')
    common.add_argument('--window', type=int, help='window size in samples '
                        'at 100 Hz')
    common.add_argument('--overlap', type=float)
    common.add_argument('--k', type=int)
    common.add_argument('--distance')
    common.add_argument('--train-hz', type=float)
    common.add_argument('--test-hz', type=float)
    common.add_argument('--train-freqs', type=float, nargs='+')
    common.add_argument('--test-freqs', type=float, nargs='+')
    common.add_argument('--seed', type=int)
    common.add_argument('--trials', type=int)
    common.add_argument('--population', type=int)
    common.add_argument('--power-watts', type=float)
    common.add_argument('--strategy', choices=STRATEGIES)
    common.add_argument('--axis', choices=tuple(SWEEP_DEFAULTS))
    common.add_argument('--results', help='results CSV to analyze')
    common.add_argument('--objectives', nargs='+')
    common.add_argument('--metrics', nargs='+')
    common.add_argument('--min-accuracy', type=float)
    common.add_argument('--jobs', type=int, help='parallel evaluations; '
                        'response times are then not comparable')
    common.add_argument('--warmup', type=int)
    common.add_argument('--log-level', default=None,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))

    parser = argparse.ArgumentParser(
        prog='harknn', description='kNN activity recognition hyperparameter '
        'study')
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='experiment', required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common],
                       help=_COMMANDS[name].__doc__.splitlines()[0])
    return parser


def run_harknn(argv):
    """Run from command line.

    Parameters
    ----------
    argv : list of str
        Arguments without the program name.

    Returns
    -------
    status : int
        0 on success, 1 on experiment failure, 2 on usage error.

    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code

    flags = {key: val for key, val in vars(args).items()
             if val is not None and key not in ('manifest', 'log_level')}
    try:
        if args.manifest:
            manifest = RunManifest.load(args.manifest, **flags)
        else:
            manifest = RunManifest(**flags)
        manifest.validate()
    except (ManifestError, TypeError) as exc:
        log.error(f'Usage error: {exc}')
        return EXIT_USAGE

    if args.log_level:
        log.setLevel(args.log_level)
    os.makedirs(manifest.out, exist_ok=True)
    manifest.save(os.path.join(manifest.out, 'manifest.json'))

    run = _Run(manifest)
    with log.log_to_file(os.path.join(manifest.out, 'harknn.log')):
        try:
            _COMMANDS[manifest.experiment](run)
        except (ValueError, OSError) as exc:
            run.fail(f'{manifest.experiment} failed: {exc}')
    return EXIT_FAILURE if run.failed else EXIT_OK


# This is used by entry point.
def _main():
    sys.exit(run_harknn(sys.argv[1:]))
