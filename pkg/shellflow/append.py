from __future__ import absolute_import, division, print_function

from multipledispatch import Dispatcher


append = Dispatcher('append')


@append.register(object, object)
def append_not_found(a, b, **kwargs):
    """ Write an artifact on to a target

    Examples
    --------

    >>> append([1, 2], [3])  # doctest: +ELLIPSIS
    Traceback (most recent call last):
        ...
    NotImplementedError: Don't know how to append artifacts of type ...list...
    """
    raise NotImplementedError("Don't know how to append artifacts of type "
                              "%s on to type %s" % (type(b), type(a)))

