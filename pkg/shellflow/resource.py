from __future__ import absolute_import, division, print_function

from .regex import RegexDispatcher


__all__ = 'resource',


resource = RegexDispatcher('resource')


@resource.register('.*', priority=1)
def resource_all(uri, *args, **kwargs):
    """ Refer to artifact files by name

    Translate a filename into a proxy object for that file.

    >>> resource('run1/series.csv')
    CSV('run1/series.csv')

    Supported names:

        *.csv  - numeric tables (series, sweep summaries)
        *.json - single documents (manifests, states, steady states)
    """
    raise NotImplementedError("Unable to parse uri to artifact file: " + uri)
