from __future__ import absolute_import, division, print_function

import os

import pandas as pd

from ..append import append
from ..convert import convert
from ..resource import resource


FLOAT_FORMAT = '%.17g'


class CSV(object):
    """ Proxy for a CSV file of numeric columns

    Appending a frame writes its header only when the file is new or
    empty; floats carry 17 significant digits so values read back
    exactly.

    Parameters
    ----------

    path : str
        Path to file on disk
    """
    canonical_extension = 'csv'

    def __init__(self, path, **kwargs):
        self.path = path

    def __repr__(self):
        return 'CSV(%r)' % self.path

    @property
    def has_data(self):
        return os.path.exists(self.path) and os.path.getsize(self.path) > 0


@append.register(CSV, pd.DataFrame)
def append_dataframe_to_csv(c, df, **kwargs):
    header = not c.has_data
    if not header:
        existing = list(pd.read_csv(c.path, nrows=0).columns)
        if existing != [str(col) for col in df.columns]:
            raise ValueError('columns %s do not match those of %s'
                             % (list(df.columns), c.path))
    df.to_csv(c.path, mode='a', header=header, index=False,
              float_format=FLOAT_FORMAT, lineterminator='\n')
    return c


@append.register(CSV, object)
def append_object_to_csv(c, o, **kwargs):
    return append(c, convert(pd.DataFrame, o, **kwargs), **kwargs)


@convert.register(pd.DataFrame, CSV, cost=1.0)
def csv_to_dataframe(c, **kwargs):
    if not c.has_data:
        raise ValueError('%s is empty' % c.path)
    return pd.read_csv(c.path, float_precision='round_trip')


@resource.register(r'.+\.csv')
def resource_csv(path, **kwargs):
    return CSV(path)
