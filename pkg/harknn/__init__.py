# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
Hyperparameter study toolkit for kNN-based human activity recognition.
"""

# Packages may add whatever they like to this file, but
# should keep this content at the top.
# ----------------------------------------------------------------------------
from ._astropy_init import *  # noqa
# ----------------------------------------------------------------------------

from astropy import config as _config


class Conf(_config.ConfigNamespace):
    """Configuration parameters for ``harknn``."""

    power_watts = _config.ConfigItem(
        1.9,
        'Average power (W) assumed by the constant-power energy meter.')
    warmup_inferences = _config.ConfigItem(
        10,
        'Number of inferences run before response-time measurement starts.')
    nsga_population = _config.ConfigItem(
        50, 'Population size of the NSGA-II configuration search.')
    nsga_crossover_rate = _config.ConfigItem(
        0.9, 'Probability that two NSGA-II parents exchange genes.')
    default_seed = _config.ConfigItem(
        0, 'Seed used when no seed is given explicitly.')
    clean_policy = _config.ConfigItem(
        'linear',
        'How missing sensor values are filled: linear, nearest, previous, '
        'or drop.')
    max_gap_seconds = _config.ConfigItem(
        1.0,
        'Rows where a whole sensor is missing for longer than this are '
        'dropped instead of interpolated.')


conf = Conf()

from .logger import log  # noqa: E402

__all__ = ['__version__', 'test', 'conf', 'Conf', 'log']
