from __future__ import absolute_import, division, print_function

from dask.threaded import get as dsk_get


def job_graph(funcs, prefix='job'):
    """ Task graph running each zero-argument callable once

    >>> dsk, keys = job_graph([lambda: 1, lambda: 2])
    >>> keys
    ['job-0', 'job-1']
    """
    dsk = {}
    keys = []
    for i, f in enumerate(funcs):
        key = '%s-%d' % (prefix, i)
        dsk[key] = (f,)
        keys.append(key)
    return dsk, keys


def run_jobs(funcs, jobs=1):
    """ Evaluate independent callables on up to ``jobs`` threads

    Every callable runs exactly once and results come back in input order,
    whatever order the threads finish in.

    >>> run_jobs([lambda: 'a', lambda: 'b'], jobs=2)
    ['a', 'b']
    """
    if jobs < 1:
        raise ValueError('jobs must be at least 1, got %r' % (jobs,))
    dsk, keys = job_graph(funcs)
    if not keys:
        return []
    return list(dsk_get(dsk, keys, num_workers=jobs))
