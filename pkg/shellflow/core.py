from __future__ import absolute_import, division, print_function

from collections import deque, namedtuple
from contextlib import contextmanager
from itertools import product
from warnings import warn

import networkx as nx


def as_tuple(x):
    return x if isinstance(x, tuple) else (x,)


class FailedConversionWarning(UserWarning):
    def __init__(self, src, dest, exc):
        self.src = src
        self.dest = dest
        self.exc = exc

    def __str__(self):
        return '%s -> %s failed, rerouting: %s' % (
            self.src.__name__, self.dest.__name__, self.exc)


class NetworkDispatcher(object):
    """ Graph of conversions between artifact types

    Edges are registered as ``register(target, source, cost)`` and calls
    follow the cheapest path from ``type(source)`` to ``target``.

    >>> d = NetworkDispatcher('d')
    >>> @d.register(float, int)
    ... def int_to_float(x, **kwargs):
    ...     return float(x)
    >>> d(float, 3)
    3.0
    """
    def __init__(self, name):
        self.name = name
        self.graph = nx.DiGraph()

    def register(self, target, source, cost=1.0):
        """ Decorator adding the edge ``source -> target``

        Either side may be a tuple of types, giving one edge per pair.
        """
        def _(func):
            for a, b in product(as_tuple(target), as_tuple(source)):
                self.graph.add_edge(b, a, cost=cost, func=func)
            return func
        return _

    def path(self, *args, **kwargs):
        return path(self.graph, *args, **kwargs)

    def __call__(self, *args, **kwargs):
        return _transform(self.graph, *args, **kwargs)


def _transform(graph, target, source, excluded_edges=None, **kwargs):
    """ Walk the cheapest path from ``type(source)`` to ``target``

    A step raising NotImplementedError is excluded and the walk continues
    along the cheaper of a fresh path from ``source`` and a path from the
    value reached so far.
    """
    excluded = set(excluded_edges or ())
    steps = deque(path(graph, type(source), target, excluded_edges=excluded))
    x = source
    while steps:
        step = steps.popleft()
        try:
            x = step.func(x, excluded_edges=excluded, **kwargs)
        except NotImplementedError as e:
            if kwargs.get('raise_on_errors'):
                raise
            warn(FailedConversionWarning(step.convert_from, step.convert_to,
                                         e))
            excluded.add((step.convert_from, step.convert_to))
            x, steps = _reroute(graph, source, x, step.convert_from, target,
                                excluded)
    return x


def _reroute(graph, source, current, current_type, target, excluded):
    fresh = path(graph, type(source), target, excluded_edges=excluded)
    try:
        onward = path(graph, current_type, target, excluded_edges=excluded)
    except nx.exception.NetworkXNoPath:
        return source, deque(fresh)
    if path_cost(fresh) < path_cost(onward):
        return source, deque(fresh)
    return current, deque(onward)


PathPart = namedtuple('PathPart', 'convert_from convert_to func cost')


def path(graph, source, target, excluded_edges=None):
    """ Path of functions between two types """
    if not isinstance(source, type):
        source = type(source)
    if not isinstance(target, type):
        target = type(target)

    for cls in source.mro():
        if cls in graph:
            source = cls
            break
    else:
        raise NotImplementedError('no conversions registered from %s'
                                  % source.__name__)

    with without_edges(graph, excluded_edges) as g:
        nodes = nx.shortest_path(g, source=source, target=target,
                                 weight='cost')
    edges = graph.adj
    return [PathPart(a, b, edges[a][b]['func'], edges[a][b]['cost'])
            for a, b in zip(nodes, nodes[1:])]


def path_cost(parts):
    return sum(p.cost for p in parts)


@contextmanager
def without_edges(g, edges):
    """ ``g`` with ``edges`` removed for the duration of the block """
    held = [(a, b, dict(g.adj[a][b])) for a, b in edges or ()]
    g.remove_edges_from([(a, b) for a, b, _ in held])
    try:
        yield g
    finally:
        g.add_edges_from(held)
