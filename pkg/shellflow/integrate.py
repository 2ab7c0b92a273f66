""" Time integration of the truncated model

The default scheme treats the viscous term exactly through the
integrating factor exp(-nu 2^{2j} t) and advances the rest with the
Dormand-Prince 5(4) pair.  Its nodes are nondecreasing, so only decaying
exponentials appear however large nu 2^{2N} is.

``scheme='bdf'`` hands the same system to scipy's BDF with the analytic
tridiagonal Jacobian, for runs where the nonlinear transfer near the
dissipation scale makes explicit steps impractically small.
"""
from __future__ import absolute_import, division, print_function

from collections import namedtuple

import numpy as np
from scipy.integrate import BDF
from toolz import merge

from .model import (NumericalFailure, ShellState, check_finite, diagnostics,
                    jacobian_banded, banded_to_dense, nonlinear_terms,
                    amplitudes)


__all__ = ['IntegratorConfig', 'RunSeries', 'StepResult', 'StepStats',
           'IntegrationError', 'PositivityError', 'step', 'integrate',
           'energy_inequality_check', 'energy_inequality_bound',
           'final_state_change']


class IntegrationError(NumericalFailure):
    pass


class PositivityError(IntegrationError):
    pass


SCHEMES = ('ifrk', 'bdf')


class IntegratorConfig(namedtuple('IntegratorConfig',
                                  'rel_tol abs_tol dt_init dt_max '
                                  'positivity_tol t_end sample_every scheme')):
    """ Step control and output cadence

    ``sample_every`` defaults to a hundredth of ``t_end``.

    >>> IntegratorConfig(t_end=10).sample_every
    0.1
    """
    __slots__ = ()

    def __new__(cls, rel_tol=1e-8, abs_tol=1e-12, dt_init=1e-3, dt_max=1.0,
                positivity_tol=1e-12, t_end=10.0, sample_every=None,
                scheme='ifrk'):
        if sample_every is None:
            sample_every = t_end / 100.0
        values = dict(rel_tol=rel_tol, abs_tol=abs_tol, dt_init=dt_init,
                      dt_max=dt_max, positivity_tol=positivity_tol,
                      t_end=t_end, sample_every=sample_every)
        for name, value in values.items():
            if not float(value) > 0:
                raise ValueError('%s must be positive, got %r' % (name, value))
        if scheme not in SCHEMES:
            raise ValueError('unknown scheme %r, expected one of %s'
                             % (scheme, ', '.join(SCHEMES)))
        values = dict((k, float(v)) for k, v in values.items())
        return super(IntegratorConfig, cls).__new__(cls, scheme=scheme,
                                                    **values)

    def _replace(self, **kwargs):
        return type(self)(**merge(self._asdict(), kwargs))


StepResult = namedtuple('StepResult', 'state error work work_error')
StepResult.__doc__ = """ One integrating-factor step

``work`` holds the increments of the dissipated and injected energy
integrals over the step; ``error`` and ``work_error`` are the embedded
error estimates.
"""

StepStats = namedtuple('StepStats', 'accepted rejected nfev min_dt')


class RunSeries(object):
    """ Samples of one integration

    Parameters
    ----------
    params : ModelParams
    config : IntegratorConfig
    rows : list of DiagnosticsRow
        Strictly increasing in time, first row at the initial time.
    states : ndarray
        Amplitudes at every row, shape ``(len(rows), N + 1)``.
    final_state : ShellState
    step_stats : StepStats
    """
    def __init__(self, params, config, rows, states, final_state, step_stats):
        self.params = params
        self.config = config
        self.rows = rows
        self.states = np.asarray(states)
        self.final_state = final_state
        self.step_stats = step_stats

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(row, name) for row in self.rows], dtype='f8')

    @property
    def times(self):
        return self.column('t')

    def __repr__(self):
        return ('RunSeries(c=%g, nu=%g, N=%d, rows=%d, t=%g)'
                % (self.params.c, self.params.nu, self.params.n_shells,
                   len(self.rows), self.final_state.t))


# Dormand-Prince 5(4)
NODES = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
COUPLING = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
WEIGHTS = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84,
                    0])
EMBEDDED = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640,
                     -92097 / 339200, 187 / 2100, 1 / 40])
ERROR_WEIGHTS = WEIGHTS - EMBEDDED


def _decay_offsets():
    """ Every time offset whose integrating factor a step needs """
    offsets = []

    def index(s):
        for i, o in enumerate(offsets):
            if abs(o - s) < 1e-15:
                return i
        offsets.append(s)
        return len(offsets) - 1

    stage = [index(c) for c in NODES]
    coupling = [[index(NODES[k] - NODES[l]) for l in range(k)]
                for k in range(len(NODES))]
    final = [index(1 - c) for c in NODES]
    return np.array(offsets), stage, coupling, final


OFFSETS, STAGE_DECAY, COUPLING_DECAY, FINAL_DECAY = _decay_offsets()


def _work_rates(params, a, forcing):
    """ Integrands of the dissipated and injected energy """
    return np.array([params.nu * np.sum(4.0 ** np.arange(len(a)) * a ** 2),
                     params.f0 * a[0] if forcing else 0.0])


def step(params, state, dt, nonlinear=True, forcing=True):
    """ One integrating-factor Dormand-Prince step of size ``dt``

    ``nonlinear=False`` and ``forcing=False`` switch off the quadratic
    transfer and the force, leaving pure viscous decay.

    Returns
    -------
    StepResult
        A non-finite state is returned as is, the caller rejects it.
    """
    if not dt > 0:
        raise ValueError('step size must be positive, got %r' % (dt,))
    a = amplitudes(state)
    c = params.c
    f = params.forcing if forcing else np.zeros_like(a)
    decay = np.exp(-np.outer(OFFSETS, params.linear_rates) * dt)

    def transfer(x):
        return f + nonlinear_terms(x, c) if nonlinear else f

    K, G = [], []
    stage = a
    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(len(NODES)):
            if k:
                stage = decay[STAGE_DECAY[k]] * a
                for l, coef in enumerate(COUPLING[k]):
                    if coef:
                        stage = stage + (dt * coef) * decay[COUPLING_DECAY[k][l]] * K[l]
            K.append(transfer(stage))
            G.append(_work_rates(params, stage, forcing))

        new = decay[FINAL_DECAY[0]] * a
        error = np.zeros_like(a)
        for l in range(len(NODES)):
            weighted = dt * decay[FINAL_DECAY[l]] * K[l]
            new = new + WEIGHTS[l] * weighted
            error = error + ERROR_WEIGHTS[l] * weighted
        G = np.array(G)
        work = dt * WEIGHTS.dot(G)
        work_error = dt * ERROR_WEIGHTS.dot(G)

    return StepResult(ShellState(state.t + dt, new), error, work, work_error)


def _error_norm(a, new, error, work_before, work_after, work_error, config):
    scale = config.abs_tol + config.rel_tol * np.maximum(np.abs(a),
                                                         np.abs(new))
    work_scale = config.abs_tol + config.rel_tol * np.maximum(
        np.abs(work_before), np.abs(work_after))
    ratios = np.concatenate([error / scale, work_error / work_scale])
    return float(np.sqrt(np.mean(ratios ** 2)))


def sample_times(t0, config):
    """ Output times after ``t0``, always ending exactly at ``t_end`` """
    n = int(np.floor((config.t_end - t0) / config.sample_every + 1e-9))
    times = t0 + config.sample_every * np.arange(1, n + 1)
    times = times[times < config.t_end - 1e-12 * config.t_end]
    return list(times) + [config.t_end]


def _check_initial(params, config, initial):
    a = check_finite(np.array(amplitudes(initial), dtype='f8'))
    if a.shape != (params.n_shells + 1,):
        raise ValueError('initial state needs %d amplitudes, got %d'
                         % (params.n_shells + 1, len(a)))
    if np.any(a < 0):
        raise ValueError('initial amplitudes must be nonnegative, shell %d '
                         'is %r' % (np.argmin(a), a.min()))
    t0 = float(getattr(initial, 't', 0.0))
    if not t0 < config.t_end:
        raise ValueError('initial time %r is not before t_end %r'
                         % (t0, config.t_end))
    return t0, a


def integrate(params, config, initial):
    """ Integrate from ``initial`` to ``config.t_end``

    Parameters
    ----------
    params : ModelParams
    config : IntegratorConfig
    initial : ShellState
        Nonnegative finite amplitudes.

    Returns
    -------
    RunSeries
        With rows every ``sample_every`` plus the initial and final time.
        Rows carry the running integrals of dissipation and injection.

    Raises
    ------
    IntegrationError
        If the step size collapses below 1e-14 t_end.
    PositivityError
        If the collapse is caused by persistent negative amplitudes.
    """
    t0, a = _check_initial(params, config, initial)
    if config.scheme == 'bdf':
        return _integrate_bdf(params, config, t0, a)

    rows = [diagnostics(params, ShellState(t0, a), 0.0, 0.0)]
    states = [a.copy()]
    targets = sample_times(t0, config)
    work = np.zeros(2)
    t, dt = t0, min(config.dt_init, config.dt_max)
    accepted = rejected = 0
    min_dt = np.inf
    floor = 1e-14 * config.t_end
    reason = None

    while targets:
        target = targets[0]
        h = min(dt, target - t)
        clipped = h < dt
        result = step(params, ShellState(t, a), h)
        new = result.state.a
        # steps clipped onto a sample time say nothing about the controller
        min_dt = min(min_dt, dt if clipped else h)

        if not (np.all(np.isfinite(new)) and np.all(np.isfinite(result.work))):
            ok, factor, reason = False, 0.5, 'non-finite state'
        else:
            err = _error_norm(a, new, result.error, work, work + result.work,
                              result.work_error, config)
            if not np.isfinite(err):
                ok, factor, reason = False, 0.5, 'non-finite error estimate'
            elif new.min() < -config.positivity_tol * np.abs(new).max():
                ok, factor, reason = False, 0.5, 'negative amplitude'
            else:
                ok = err <= 1.0
                factor = (5.0 if err == 0 else
                          min(5.0, max(0.2, 0.9 * err ** -0.2)))
                reason = 'error estimate'

        if ok:
            accepted += 1
            t = target if clipped or h == target - t else t + h
            a = new
            work = work + result.work
            if t >= target:
                rows.append(diagnostics(params, ShellState(t, a),
                                        work[0], work[1]))
                states.append(a.copy())
                targets.pop(0)
            dt = min(config.dt_max,
                     max(dt, h * factor) if clipped else h * factor)
        else:
            rejected += 1
            dt = h * min(factor, 1.0)
            if dt < floor:
                error = (PositivityError if reason == 'negative amplitude'
                         else IntegrationError)
                raise error('step size underflow at t=%r (dt=%r < %r): %s'
                            % (t, dt, floor, reason))

    stats = StepStats(accepted, rejected, 7 * (accepted + rejected), min_dt)
    return RunSeries(params, config, rows, np.array(states),
                     ShellState(t, a), stats)


def _integrate_bdf(params, config, t0, a):
    n = params.n_shells + 1
    rates = params.linear_rates
    forcing = params.forcing
    weights = 4.0 ** params.shells

    def fun(t, y):
        x = y[:n]
        return np.concatenate([forcing - rates * x + nonlinear_terms(x, params.c),
                               [params.nu * np.dot(weights, x * x),
                                params.f0 * x[0]]])

    def jac(t, y):
        x = y[:n]
        out = np.zeros((n + 2, n + 2))
        out[:n, :n] = banded_to_dense(jacobian_banded(params, x))
        out[n, :n] = 2.0 * params.nu * weights * x
        out[n + 1, 0] = params.f0
        return out

    solver = BDF(fun, t0, np.concatenate([a, [0.0, 0.0]]), config.t_end,
                 rtol=config.rel_tol, atol=config.abs_tol, jac=jac,
                 first_step=min(config.dt_init, config.t_end - t0),
                 max_step=config.dt_max)
    rows = [diagnostics(params, ShellState(t0, a), 0.0, 0.0)]
    states = [a.copy()]
    targets = sample_times(t0, config)
    accepted = 0
    min_dt = np.inf

    while solver.status == 'running':
        t_old = solver.t
        message = solver.step()
        if solver.status == 'failed':
            raise IntegrationError('BDF failed at t=%r: %s' % (t_old, message))
        accepted += 1
        if solver.status == 'running':
            min_dt = min(min_dt, solver.t - t_old)
        y = solver.y
        if not np.all(np.isfinite(y)):
            raise IntegrationError('non-finite state at t=%r' % solver.t)
        # BDF controls errors only down to abs_tol
        allowed = max(config.positivity_tol * np.abs(y[:n]).max(),
                      config.abs_tol)
        if y[:n].min() < -allowed:
            raise PositivityError('shell %d negative (%r) at t=%r'
                                  % (np.argmin(y[:n]), y[:n].min(), solver.t))
        if targets and targets[0] <= solver.t:
            dense = solver.dense_output()
            while targets and targets[0] <= solver.t:
                ts = targets.pop(0)
                ys = y if ts == solver.t else dense(ts)
                rows.append(diagnostics(params, ShellState(ts, ys[:n]),
                                        ys[n], ys[n + 1]))
                states.append(np.array(ys[:n]))

    final = ShellState(rows[-1].t, states[-1])
    stats = StepStats(accepted, 0, solver.nfev, min_dt)
    return RunSeries(params, config, rows, np.array(states), final, stats)


def _running_integrals(series):
    rows = series.rows
    if all(r.dissipated is not None and r.injected is not None for r in rows):
        return series.column('dissipated'), series.column('injected')
    t = series.times
    trapezoid = lambda y: np.concatenate([[0.0], np.cumsum(
        0.5 * (y[1:] + y[:-1]) * np.diff(t))])
    return (trapezoid(series.params.nu * series.column('h1_sq')),
            trapezoid(series.column('injection')))


def energy_inequality_check(series):
    """ Largest defect of the energy balance between any two samples

    For every pair t0 < t,

        |a(t)|^2 + 2 int_{t0}^{t} nu |a|_{H^1}^2 - |a(t0)|^2 - 2 int (f, a)

    which vanishes for the truncated system up to integration error.  The
    integrals come from the integrator when the rows carry them, else from
    the trapezoid rule over the rows.
    """
    if len(series.rows) < 2:
        raise ValueError('need at least two samples, got %d'
                         % len(series.rows))
    dissipated, injected = _running_integrals(series)
    q = 2 * series.column('energy') + 2 * dissipated - 2 * injected
    earliest = np.minimum.accumulate(q)[:-1]
    return float(np.max(q[1:] - earliest))


def energy_inequality_bound(series):
    """ 10 rel_tol times the largest magnitude entering the balance """
    dissipated, injected = _running_integrals(series)
    scale = np.max(2 * series.column('energy') + 2 * np.abs(dissipated)
                   + 2 * np.abs(injected))
    return 10.0 * series.config.rel_tol * float(scale)


def min_amplitude_ratio(series):
    """ min_t min_j a_j(t) / max_j |a_j(t)|, ignoring all-zero samples """
    peak = np.abs(series.states).max(axis=1)
    live = peak > 0
    if not live.any():
        return 0.0
    return float((series.states[live].min(axis=1) / peak[live]).min())


def final_state_change(params, config, initial):
    """ l2 distance between the final states at ``config.rel_tol`` and at a
    tenth of it, ``abs_tol`` scaled alike """
    tight = config._replace(rel_tol=config.rel_tol / 10,
                            abs_tol=config.abs_tol / 10)
    a, b = (integrate(params, c, initial).final_state.a
            for c in (config, tight))
    return float(np.linalg.norm(a - b))
