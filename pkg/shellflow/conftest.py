import numpy as np
import pytest

# doctests were written against the pre-NumPy-2 scalar repr
try:
    np.set_printoptions(legacy='1.25')
except (TypeError, ValueError):
    pass


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run long acceptance tests')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)
