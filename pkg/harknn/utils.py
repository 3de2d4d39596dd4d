"""Utility functions for ``harknn``."""
# STDLIB
import hashlib
import json

# THIRD-PARTY
import numpy as np
from astropy.io import ascii
from astropy.utils.misc import JsonCustomEncoder

__all__ = ['write_json', 'read_json', 'write_table', 'read_table',
           'dataset_hash', 'space_hash', 'reproducibility_header']


def write_json(obj, filename):
    """Write an object as indented JSON with sorted keys.

    Numpy scalars and arrays are converted by
    ``astropy.utils.misc.JsonCustomEncoder``.

    """
    with open(filename, 'w') as fout:
        json.dump(obj, fout, indent=4, sort_keys=True, cls=JsonCustomEncoder)


def read_json(filename):
    with open(filename) as fin:
        return json.load(fin)


def dataset_hash(sessions):
    """SHA-256 over the users, frequencies, labels and channel values of
    sessions, in user order."""
    sha = hashlib.sha256()
    for s in sorted(sessions, key=lambda s: s.user_id):
        sha.update(f'{s.user_id}:{s.frequency_hz}:{len(s)};'.encode())
        sha.update(np.ascontiguousarray(s.labels, dtype='<i8').tobytes())
        sha.update(np.ascontiguousarray(s.channels, dtype='<f8').tobytes())
    return sha.hexdigest()


def space_hash(space):
    """SHA-256 of a `~harknn.search.SearchSpace` definition."""
    text = json.dumps(space.as_dict(), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def reproducibility_header(seed, space=None, sessions=None, **extra):
    """Items recorded at the top of every report file.

    Returns
    -------
    header : dict
        ``version``, ``seed``, and when given ``space_hash`` and
        ``dataset_hash``, followed by ``extra`` items.

    """
    from . import __version__

    header = {'version': __version__, 'seed': seed}
    if space is not None:
        header['space_hash'] = space_hash(space)
    if sessions is not None:
        header['dataset_hash'] = dataset_hash(sessions)
    header.update(extra)
    return header


def write_table(tab, filename, header=None, overwrite=True):
    """Write a table as CSV, ``header`` items as ``# key = value`` lines."""
    if header is not None:
        tab.meta['comments'] = [f'{key} = {val}'
                                for key, val in header.items()]
    tab.write(filename, format='ascii.csv', comment='# ', fast_writer=False,
              overwrite=overwrite)


def read_table(filename):
    """Read a CSV written by `write_table`.

    Returns
    -------
    tab : ``astropy.table.Table``

    header : dict
        Values are strings.

    """
    tab = ascii.read(filename, format='csv', comment='#', fast_reader=False)
    header = {}
    for line in tab.meta.get('comments', []):
        key, sep, val = line.partition('=')
        if sep:
            header[key.strip()] = val.strip()
    return tab, header
