from __future__ import absolute_import, division, print_function

from multipledispatch import Dispatcher

from .append import append
from .convert import convert
from .resource import resource


__all__ = 'into',


into = Dispatcher('into')


@into.register(type, object)
def into_type(a, b, **kwargs):
    return convert(a, b, **kwargs)


@into.register(str, object)
def into_string(uri, b, **kwargs):
    """ Write ``b`` to the file named by ``uri``

    >>> into('run1/manifest.json', manifest)  # doctest: +SKIP
    JSON('run1/manifest.json')
    """
    return into(resource(uri, **kwargs), b, **kwargs)


@into.register(object, object)
def into_object(target, source, **kwargs):
    """ Push an artifact into a target

    Parameters
    ----------

    target: object or string or type
        A file proxy (``CSV``, ``JSON``), a filename or a type
    source: object
        A result (``RunSeries``, ``SteadyState``, ``RunManifest``, ...)
        or a file proxy to read from
    **kwargs:
        passed through to the conversion, e.g. ``full_state=True``

    Examples
    --------

    >>> into(list, [1, 2])
    [1, 2]
    >>> into('run1/series.csv', series)  # doctest: +SKIP
    CSV('run1/series.csv')
    """
    return append(target, source, **kwargs)


@into.register(type, list)
def list_into_type(a, b, **kwargs):
    if a is list:
        return list(b)
    return convert(a, b, **kwargs)
