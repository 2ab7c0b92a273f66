""" Long-time behaviour of the viscous model

Convergence to the fixed point, the dissipation rate as viscosity
vanishes and the shape of the fixed-point spectrum.
"""
from __future__ import absolute_import, division, print_function

from collections import namedtuple
from functools import partial
from warnings import catch_warnings, simplefilter

import numpy as np

from .initial import initial_state
from .integrate import IntegratorConfig, integrate
from .jobs import run_jobs
from .model import (ModelParams, NumericalFailure, UnprovenRangeWarning,
                    hs_norm_sq, warn_unproven)
from .steady import solve_fixed_point, to_alpha


__all__ = ['EpsilonD', 'SweepResult', 'epsilon_d', 'attractor_decay',
           'dissipation_sweep', 'spectrum_report', 'kappa_d_predicted',
           'shells_for_resolution']


EpsilonD = namedtuple('EpsilonD', 'value')

SweepResult = namedtuple('SweepResult',
                         'nu n_shells avg_dissipation alpha_inner_product '
                         'epsilon_d attractor_rate gamma_bound spectrum_slope '
                         'kappa_d_predicted kappa_d_observed resolved valid '
                         'note')

SweepPoint = namedtuple('SweepPoint', 'result series steady')

DecayFit = namedtuple('DecayFit', 'rate monotone n_points')

AttractorReport = namedtuple('AttractorReport',
                             'attractor_rate gamma_bound passed monotone '
                             'final_distance series')

SpectrumReport = namedtuple('SpectrumReport',
                            'slope kappa_d_predicted kappa_d_observed window '
                            'note')


def epsilon_d(c, f0):
    """ Anomalous dissipation rate 2^{c/6} f0^{3/2}

    >>> round(epsilon_d(2, 1).value, 5)
    1.25992
    """
    if not f0 > 0:
        raise ValueError('force amplitude must be positive, got %r' % (f0,))
    return EpsilonD(2.0 ** (c / 6.0) * f0 ** 1.5)


def kappa_d_predicted(c, nu, f0):
    """ (f0^{3/2} / nu^3)^{1 / (2 (3 - c))} """
    if not nu > 0:
        raise ValueError('the dissipation wavenumber needs nu > 0')
    if c >= 3:
        raise ValueError('the dissipation wavenumber needs c < 3')
    return (f0 ** 1.5 / nu ** 3) ** (1.0 / (2 * (3 - c)))


def kolmogorov_exponents(c):
    """ Inertial spectral slope and the exponent of kappa_d in 1/nu^3

    >>> [round(x, 4) for x in kolmogorov_exponents(1)]
    [-1.6667, 0.25]
    """
    return -(2.0 * c / 3 + 1), 1.0 / (2 * (3 - c))


def shells_for_resolution(c, nu, f0, factor=8, minimum=4):
    """ Smallest N with 2^N >= factor * kappa_d """
    needed = np.log2(factor * kappa_d_predicted(c, nu, f0))
    return max(minimum, int(np.ceil(needed - 1e-12)))


def distance_sq(series, alpha):
    """ |a(t) - alpha|^2 at every sample """
    return np.sum((series.states - np.asarray(alpha)) ** 2, axis=1)


def fit_decay_rate(times, b_sq, lower=1e-10, upper=1e-2, rtol=1e-6):
    """ Exponential decay rate of |b|^2 fitted where it lies in
    [lower, upper] |b(0)|^2

    Samples before |b|^2 first falls under ``lower`` |b(0)|^2 must not
    increase by more than ``rtol`` |b(0)|^2; otherwise no fit is made.
    """
    times = np.asarray(times, dtype='f8')
    b_sq = np.asarray(b_sq, dtype='f8')
    b0 = b_sq[0]
    if b0 == 0:
        return DecayFit(np.nan, True, 0)
    above = np.flatnonzero(b_sq < lower * b0)
    stop = above[0] + 1 if len(above) else len(b_sq)
    monotone = bool(np.all(np.diff(b_sq[:stop]) <= rtol * b0))
    if not monotone:
        return DecayFit(np.nan, False, 0)
    window = (b_sq >= lower * b0) & (b_sq <= upper * b0)
    window[stop:] = False
    n = int(window.sum())
    if n < 3:
        return DecayFit(np.nan, True, n)
    slope = np.polyfit(times[window], np.log(b_sq[window]), 1)[0]
    return DecayFit(float(-slope), True, n)


def attractor_decay(params, config, initial, steady=None):
    """ Rate at which |a(t) - alpha^nu|^2 decays, against 2 gamma nu

    Returns
    -------
    AttractorReport
        ``passed`` holds when the fitted rate is at least 0.95 times the
        bound; a trajectory starting on the fixed point passes trivially.
    """
    if not params.nu > 0:
        raise ValueError('attractor decay needs nu > 0')
    warn_unproven(params.c)
    if steady is None:
        with catch_warnings():
            simplefilter('ignore', UnprovenRangeWarning)
            steady = solve_fixed_point(params)
    series = integrate(params, config, initial)
    b_sq = distance_sq(series, steady.alpha)
    fit = fit_decay_rate(series.times, b_sq)
    bound = 2 * steady.gamma * params.nu
    if b_sq[0] == 0:
        passed = True
    else:
        passed = bool(fit.monotone and fit.n_points >= 3
                      and fit.rate >= 0.95 * bound)
    return AttractorReport(fit.rate, bound, passed, fit.monotone,
                           float(np.sqrt(b_sq[-1])), series)


def full_alpha(steady):
    """ alpha on every shell the steady state resolved """
    p = steady.params
    return to_alpha(steady.A, p.c, p.f0, len(steady.A) - 1)


def spectrum_report(steady, params, margin=2, drop=10.0):
    """ Power-law fit of the fixed-point spectrum E(2^j) = alpha_j^2 2^{-j}

    The fit runs over j in [margin, floor(log2 kappa_d) - margin] with the
    predicted kappa_d.  The observed kappa_d is 2^j at the first shell past
    the start of that window whose energy falls ``drop`` times below the
    fitted line.
    """
    if not params.nu > 0:
        raise ValueError('spectrum report needs nu > 0')
    kp = kappa_d_predicted(params.c, params.nu, params.f0)
    alpha = full_alpha(steady)
    E = alpha ** 2 * 2.0 ** -np.arange(len(alpha))
    lo, hi = margin, int(np.floor(np.log2(kp))) - margin
    hi = min(hi, len(E) - 1)
    if hi - lo + 1 < 4 or np.any(E[lo:hi + 1] <= 0):
        return SpectrumReport(None, kp, None, (lo, hi),
                              'insufficient scale separation')
    j = np.arange(lo, hi + 1)
    slope, intercept = np.polyfit(j, np.log2(E[j]), 1)
    observed = None
    for i in range(lo, len(E)):
        if E[i] <= 0 or np.log2(E[i]) < slope * i + intercept - np.log2(drop):
            observed = 2.0 ** i
            break
    return SpectrumReport(float(slope), kp, observed, (lo, hi), '')


def inviscid_spectrum_slope(c, f0=1.0, n_shells=40):
    """ Slope of log2 E against j for alpha^0, fitted over every shell """
    j = np.arange(n_shells + 1)
    alpha = 2.0 ** (c / 6.0 - c * j / 3.0) * np.sqrt(f0)
    return float(np.polyfit(j, np.log2(alpha ** 2 * 2.0 ** -j), 1)[0])


def fixed_point_energy_equality(steady, params):
    """ |nu |alpha|_{H^1}^2 - alpha_0 f0| / (alpha_0 f0) """
    alpha = full_alpha(steady)
    injected = alpha[0] * params.f0
    return abs(params.nu * hs_norm_sq(alpha, 1) - injected) / injected


def time_average_dissipation(series, transient=None):
    """ Mean of nu |a|_{H^1}^2 over [T0, t_end], T0 defaulting to t_end / 2

    Uses the running dissipation integral carried by the rows.
    """
    t = series.times
    dissipated = series.column('dissipated')
    t0 = t[-1] / 2 if transient is None else transient
    start = int(np.searchsorted(t, t0 - 1e-12 * t[-1]))
    start = min(start, len(t) - 2)
    return float((dissipated[-1] - dissipated[start]) / (t[-1] - t[start]))


def sweep_config(t_end=100.0, scheme='bdf', **kwargs):
    """ Integrator settings used for each point of a sweep """
    kwargs.setdefault('rel_tol', 1e-8)
    kwargs.setdefault('abs_tol', 1e-14)
    kwargs.setdefault('sample_every', t_end / 200.0)
    return IntegratorConfig(t_end=t_end, scheme=scheme, **kwargs)


def sweep_point(c, f0, nu, n_shells, config, initial='zero', seed=None,
                transient=None, resolution_tol=1e-6):
    """ Integrate one grid point and summarise it """
    params = ModelParams(c=c, nu=nu, f0=f0, n_shells=n_shells)
    eps = epsilon_d(c, f0).value
    with catch_warnings():
        simplefilter('ignore', UnprovenRangeWarning)
        steady = solve_fixed_point(params)
    spectrum = spectrum_report(steady, params)
    base = dict(nu=nu, n_shells=n_shells, epsilon_d=eps,
                alpha_inner_product=float(steady.alpha[0] * f0),
                gamma_bound=2 * steady.gamma * nu,
                spectrum_slope=spectrum.slope,
                kappa_d_predicted=spectrum.kappa_d_predicted,
                kappa_d_observed=spectrum.kappa_d_observed)
    try:
        series = integrate(params, config,
                           initial_state(initial, params, seed=seed))
    except NumericalFailure as e:
        result = SweepResult(avg_dissipation=np.nan, attractor_rate=np.nan,
                             resolved=False, valid=False,
                             note='integration failed: %s' % e, **base)
        return SweepPoint(result, None, steady)

    final = series.final_state.a
    resolved = bool(abs(final[-1]) <= resolution_tol * np.abs(final).max())
    fit = fit_decay_rate(series.times, distance_sq(series, steady.alpha))
    notes = []
    if not resolved:
        notes.append('spectrum not decayed by shell N')
    if not fit.monotone:
        notes.append('|b|^2 not monotone')
    result = SweepResult(avg_dissipation=time_average_dissipation(series,
                                                                  transient),
                         attractor_rate=fit.rate, resolved=resolved,
                         valid=resolved, note='; '.join(notes), **base)
    return SweepPoint(result, series, steady)


def sweep_points(c, f0, nu_grid, N_rule=shells_for_resolution, config=None,
                 initial='zero', seed=0, jobs=1, transient=None):
    """ Run every grid point, returning SweepPoints in grid order """
    nu_grid = [float(nu) for nu in nu_grid]
    if not nu_grid:
        raise ValueError('empty viscosity grid')
    if any(nu <= 0 for nu in nu_grid):
        raise ValueError('sweep viscosities must be positive')
    if any(b >= a for a, b in zip(nu_grid, nu_grid[1:])):
        raise ValueError('viscosity grid must be strictly decreasing')
    warn_unproven(c)
    config = config or sweep_config()
    tasks = [partial(sweep_point, c, f0, nu, N_rule(c, nu, f0), config,
                     initial=initial,
                     seed=None if seed is None else seed + i,
                     transient=transient)
             for i, nu in enumerate(nu_grid)]
    return run_jobs(tasks, jobs=jobs)


def dissipation_sweep(c, f0, nu_grid, N_rule=shells_for_resolution, **kwargs):
    """ Time-averaged dissipation along a decreasing viscosity grid

    Parameters
    ----------
    c, f0 : float
    nu_grid : sequence of float
        Strictly decreasing viscosities.
    N_rule : callable
        ``N_rule(c, nu, f0)`` gives the truncation for each point.
    **kwargs
        ``config``, ``initial``, ``seed``, ``jobs`` and ``transient``,
        see ``sweep_points``.

    Returns
    -------
    list of SweepResult
    """
    return [p.result for p in sweep_points(c, f0, nu_grid, N_rule, **kwargs)]


def dissipation_trend(results, last=3):
    """ |avg_dissipation - epsilon_d| non-increasing over the last points """
    gaps = [abs(r.avg_dissipation - r.epsilon_d) for r in results[-last:]]
    return all(b <= a for a, b in zip(gaps, gaps[1:]))
