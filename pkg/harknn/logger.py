"""Package logger for ``harknn``.

The logger is an :class:`~astropy.logger.AstropyLogger`, so its level and
colors follow the ``[logger]`` section of the astropy configuration, and
:meth:`~astropy.logger.AstropyLogger.log_to_file` can mirror a run into a
file.

"""
# STDLIB
import logging

# THIRD-PARTY
from astropy.logger import AstropyLogger

__all__ = ['log']


def _init_log():
    """Create the ``harknn`` logger without touching other loggers."""
    orig_logger_cls = logging.getLoggerClass()
    logging.setLoggerClass(AstropyLogger)
    try:
        log = logging.getLogger('harknn')
        log._set_defaults()
    finally:
        logging.setLoggerClass(orig_logger_cls)
    return log


log = _init_log()
