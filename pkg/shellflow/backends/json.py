from __future__ import absolute_import, division, print_function

import json

import numpy as np

from ..append import append
from ..convert import convert
from ..model import ShellState, shell_state
from ..resource import resource


class JSON(object):
    """ Proxy for a JSON document on disk

    A file holds exactly one document, so appending replaces it.

    Parameters
    ----------

    path : str
        Path to file on disk
    """
    canonical_extension = 'json'

    def __init__(self, path, **kwargs):
        self.path = path

    def __repr__(self):
        return 'JSON(%r)' % self.path


def json_dumps(o):
    """ ``default=`` hook for numpy values

    Non-finite floats become ``null``.

    >>> json.dumps({'x': np.float64(0.5), 'v': np.arange(2)},
    ...            default=json_dumps, sort_keys=True)
    '{"v": [0, 1], "x": 0.5}'
    """
    if isinstance(o, np.ndarray):
        return [finite_or_none(x) for x in o.tolist()]
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return finite_or_none(float(o))
    raise TypeError('%r is not JSON serializable' % (o,))


def finite_or_none(x):
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _clean(o):
    """ Replace non-finite floats before they reach the encoder """
    if isinstance(o, dict):
        return dict((k, _clean(v)) for k, v in o.items())
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return json_dumps(o)
    return finite_or_none(float(o)) if isinstance(o, np.floating) else \
        finite_or_none(o)


def dumps(doc):
    """ Deterministic text of a document: sorted keys, shortest round-trip
    floats """
    return json.dumps(_clean(doc), default=json_dumps, sort_keys=True,
                      indent=2, allow_nan=False)


def write_json(path, doc):
    with open(path, 'w') as f:
        f.write(dumps(doc))
        f.write('\n')
    return path


def read_json(path):
    with open(path) as f:
        return json.load(f)


def read_state(path):
    """ ShellState from a ``final_state.json`` document {'t': .., 'a': [..]} """
    doc = read_json(path)
    try:
        t, a = doc['t'], doc['a']
    except (KeyError, TypeError):
        raise ValueError('%s is not a state document, expected keys t and a'
                         % path)
    if any(x is None for x in a):
        raise ValueError('%s holds non-finite amplitudes' % path)
    return shell_state(a, t)


@convert.register(dict, JSON, cost=1.0)
def json_to_dict(j, **kwargs):
    return read_json(j.path)


@convert.register(ShellState, JSON, cost=1.0)
def json_to_state(j, **kwargs):
    return read_state(j.path)


@append.register(JSON, dict)
def dict_to_json(j, doc, **kwargs):
    write_json(j.path, doc)
    return j


@append.register(JSON, object)
def object_to_json(j, o, **kwargs):
    return append(j, convert(dict, o, **kwargs), **kwargs)


@resource.register(r'.+\.json')
def resource_json(path, **kwargs):
    return JSON(path)
