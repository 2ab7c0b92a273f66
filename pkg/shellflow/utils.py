from __future__ import absolute_import, division, print_function

import inspect
import os
import shutil
import tempfile

from contextlib import contextmanager

from toolz import keyfilter


@contextmanager
def ignoring(*exceptions):
    try:
        yield
    except exceptions:
        pass


@contextmanager
def tmpfile(extension='', dir=None):
    """ A path that does not exist yet, removed with whatever it became

    The path may be used as a file or as a directory.
    """
    extension = '.' + extension.lstrip('.') if extension else ''
    parent = tempfile.mkdtemp(prefix='shellflow-', dir=dir)
    try:
        yield os.path.join(parent, 'tmp' + extension)
    finally:
        with ignoring(OSError):
            shutil.rmtree(parent)


@contextmanager
def filetext(text, extension='', mode='w'):
    with tmpfile(extension=extension) as filename:
        with open(filename, mode=mode) as f:
            f.write(text)
        yield filename


def keywords(func):
    """ Names that ``func`` accepts as keyword arguments

    >>> def check(quick=True, mutate=None):
    ...     pass

    >>> keywords(check)
    ['quick', 'mutate']
    """
    if isinstance(func, type):
        return keywords(func.__init__)[1:]
    return [name for name, p in inspect.signature(func).parameters.items()
            if p.kind in (p.POSITIONAL_OR_KEYWORD, p.KEYWORD_ONLY)]


def filter_kwargs(f, kwargs):
    """ The subset of ``kwargs`` that ``f`` accepts

    >>> def telescoping(mutate=None):
    ...     return mutate
    >>> telescoping(**filter_kwargs(telescoping, {'mutate': 'flux',
    ...                                           'quick': True}))
    'flux'
    """
    return keyfilter(keywords(f).__contains__, kwargs)


def is_empty_dir(path):
    """ True if ``path`` does not exist or is a directory with no entries """
    if not os.path.exists(path):
        return True
    return os.path.isdir(path) and not os.listdir(path)
