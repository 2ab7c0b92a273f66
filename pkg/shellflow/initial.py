""" Initial data by name

>>> from shellflow.model import ModelParams
>>> initial_state('zero', ModelParams(n_shells=3)).a
array([0., 0., 0., 0.])
"""
from __future__ import absolute_import, division, print_function

import numpy as np

from .model import ShellState, check_finite, shell_state
from .regex import RegexDispatcher


initial_state = RegexDispatcher('initial_state')


@initial_state.register('zero')
def zero_state(kind, params, seed=None):
    return shell_state(np.zeros(params.n_shells + 1))


@initial_state.register('random')
def random_state(kind, params, seed=None):
    """ a_j = |g_j| 2^{-j} with g_j standard normal from a seeded generator """
    if seed is None:
        raise ValueError('random initial data needs a seed')
    g = np.random.RandomState(seed).standard_normal(params.n_shells + 1)
    return shell_state(np.abs(g) * 2.0 ** -params.shells)


@initial_state.register('fixed-point')
def fixed_point_state(kind, params, seed=None):
    from .steady import solve_fixed_point
    return shell_state(solve_fixed_point(params).alpha)


@initial_state.register(r'.+\.json', priority=11)
def file_state(path, params, seed=None):
    """ Amplitudes from a ``final_state.json`` written by an earlier run """
    from .backends.json import read_state
    state = read_state(path)
    if len(state.a) != params.n_shells + 1:
        raise ValueError('%s holds %d shells, the model has %d'
                         % (path, len(state.a), params.n_shells + 1))
    return ShellState(0.0, check_finite(state.a))


@initial_state.register('.*', priority=1)
def unknown_state(kind, params, seed=None):
    """ Initial data by name: 'zero', 'random', 'fixed-point' or a
    path to a JSON state file """
    raise ValueError('unknown initial data %r; expected zero, random, '
                     'fixed-point or a .json state file' % kind)


INITIAL_KINDS = ('zero', 'random', 'fixed-point', 'file')
