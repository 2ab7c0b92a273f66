""" Conversions from in-memory results to storable artifacts

Tables become ``pandas.DataFrame`` and documents become ``dict``; the
backends then know how to write those.
"""
from __future__ import absolute_import, division, print_function

import numpy as np
import pandas as pd

from .core import NetworkDispatcher
from .experiments import SweepResult
from .integrate import RunSeries, StepStats
from .model import ShellState, shell_state
from .steady import SteadyState, steady_report


convert = NetworkDispatcher('convert')


SERIES_SCHEMA = 1


def series_columns(n_shells, full_state=False, b_norm=False):
    """ Column order of series.csv

    >>> series_columns(1, full_state=True)
    ['t', 'E', 'H1_sq', 'injection', 'Pi_0', 'Pi_1', 'a_0', 'a_1', 'dissipated', 'injected']
    """
    shells = range(n_shells + 1)
    cols = ['t', 'E', 'H1_sq', 'injection'] + ['Pi_%d' % j for j in shells]
    if full_state:
        cols += ['a_%d' % j for j in shells]
    cols += ['dissipated', 'injected']
    if b_norm:
        cols.append('b_norm')
    return cols


@convert.register(pd.DataFrame, RunSeries, cost=1.0)
def series_to_dataframe(series, full_state=False, alpha=None, **kwargs):
    """ One row per sample

    ``alpha`` adds the distance |a(t) - alpha| to a fixed point as column
    ``b_norm``.
    """
    rows = series.rows
    n = series.params.n_shells
    data = dict(t=series.column('t'), E=series.column('energy'),
                H1_sq=series.column('h1_sq'),
                injection=series.column('injection'),
                dissipated=series.column('dissipated'),
                injected=series.column('injected'))
    flux = np.array([r.flux for r in rows])
    for j in range(n + 1):
        data['Pi_%d' % j] = flux[:, j]
        if full_state:
            data['a_%d' % j] = series.states[:, j]
    if alpha is not None:
        alpha = np.asarray(alpha)[:n + 1]
        data['b_norm'] = np.sqrt(np.sum((series.states - alpha) ** 2, axis=1))
    cols = series_columns(n, full_state, alpha is not None)
    return pd.DataFrame(data, columns=cols)


@convert.register(dict, ShellState, cost=1.0)
def state_to_dict(state, **kwargs):
    return {'t': float(state.t), 'a': np.asarray(state.a, dtype='f8')}


@convert.register(ShellState, dict, cost=1.0)
def dict_to_state(doc, **kwargs):
    if 't' not in doc or 'a' not in doc:
        raise NotImplementedError('document has no t and a keys')
    return shell_state(doc['a'], doc['t'])


@convert.register(dict, StepStats, cost=1.0)
def step_stats_to_dict(stats, **kwargs):
    return dict(stats._asdict())


@convert.register(dict, SteadyState, cost=1.0)
def steady_to_dict(steady, newton_check=False, **kwargs):
    """ Everything ``steady`` prints, with J = inf stored as null """
    p = steady.params
    return {'c': p.c, 'nu': p.nu, 'f0': p.f0, 'n_shells': p.n_shells,
            'mu': steady.mu, 'beta': steady.beta, 'gamma': steady.gamma,
            'J': steady.J, 'A': steady.A, 'alpha': steady.alpha,
            'residual': steady.residual,
            'A0_bracket': list(steady.A0_bracket),
            'matching_index': steady.matching_index,
            'horizon': steady.horizon,
            'checks': steady_report(steady, newton_check=newton_check),
            'warnings': list(steady.warnings)}


SUMMARY_COLUMNS = ['nu', 'N', 'avg_dissipation', 'alpha0_f0', 'epsilon_d',
                   'attractor_rate', 'gamma_bound', 'spectrum_slope',
                   'kappa_d_pred', 'kappa_d_obs', 'resolved', 'valid', 'note']

_summary_fields = dict(N='n_shells', alpha0_f0='alpha_inner_product',
                       kappa_d_pred='kappa_d_predicted',
                       kappa_d_obs='kappa_d_observed')


@convert.register(pd.DataFrame, list, cost=1.0)
def sweep_results_to_dataframe(results, **kwargs):
    """ summary.csv table, rows by viscosity descending """
    if not all(isinstance(r, SweepResult) for r in results):
        raise NotImplementedError('only lists of SweepResult become tables')
    results = sorted(results, key=lambda r: -r.nu)
    data = dict((col, [getattr(r, _summary_fields.get(col, col))
                       for r in results])
                for col in SUMMARY_COLUMNS)
    df = pd.DataFrame(data, columns=SUMMARY_COLUMNS)
    for col in ('spectrum_slope', 'kappa_d_obs'):
        df[col] = df[col].astype('f8')
    return df


@convert.register(dict, pd.DataFrame, cost=1.0)
def dataframe_to_dict(df, **kwargs):
    """ Column-oriented document keeping the column order

    >>> convert(dict, pd.DataFrame({'t': [0.0, 1.0]}))
    {'columns': ['t'], 'data': {'t': [0.0, 1.0]}}
    """
    return {'columns': [str(c) for c in df.columns],
            'data': dict((str(c), df[c].tolist()) for c in df.columns)}
