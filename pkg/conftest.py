try:
    from pytest_astropy_header.display import (PYTEST_HEADER_MODULES,
                                               TESTED_VERSIONS)
except ImportError:
    PYTEST_HEADER_MODULES = {}
    TESTED_VERSIONS = {}

try:
    from harknn import __version__ as version
except ImportError:
    version = 'unknown'

# Versions displayed in the test header
PYTEST_HEADER_MODULES['Astropy'] = 'astropy'
PYTEST_HEADER_MODULES.pop('Matplotlib', None)
PYTEST_HEADER_MODULES.pop('h5py', None)

# Show the package version rather than the Astropy one in the top line.
TESTED_VERSIONS['harknn'] = version
