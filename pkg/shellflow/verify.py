""" Invariant checks over a pinned parameter matrix

Checks register themselves with ``@check(name, quick=...)`` and return
``(passed, detail)``.  ``run_checks(quick=True)`` runs the fast subset;
the full matrix adds the long integrations and the viscosity sweep.
"""
from __future__ import absolute_import, division, print_function

import io
import os

from collections import namedtuple
from contextlib import redirect_stdout
from timeit import default_timer
from warnings import catch_warnings, simplefilter

import numpy as np

from .experiments import (attractor_decay, dissipation_sweep,
                          dissipation_trend, fixed_point_energy_equality,
                          inviscid_spectrum_slope, kappa_d_predicted,
                          kolmogorov_exponents, spectrum_report)
from .initial import initial_state
from .integrate import (IntegratorConfig, energy_inequality_bound,
                        energy_inequality_check, final_state_change,
                        integrate, min_amplitude_ratio, step)
from .manifest import read_manifest
from .model import (ModelParams, UnprovenRangeWarning, energy, fluxes,
                    hs_norm_sq, nonlinear_terms, partial_balance_residual,
                    rhs, shell_state)
from .steady import (check_decay_bound, check_dissipation_sums,
                     check_gj_bound, check_monotonicity,
                     check_newton_agreement, fixed_point_residual,
                     inviscid_fixed_point, solve_fixed_point)
from .utils import filter_kwargs, tmpfile


CheckRow = namedtuple('CheckRow', 'name passed detail seconds')

MUTATIONS = {None: 0.0, 'flux': 0.01}

checks = []


def check(name, quick=True):
    """ Register a check; ``quick=False`` keeps it out of ``--quick`` """
    def _(func):
        checks.append((name, quick, func))
        return func
    return _


def _states(n_states=20, n_shells=12, seed=0):
    rng = np.random.RandomState(seed)
    j = np.arange(n_shells + 1)
    return [np.abs(rng.standard_normal(n_shells + 1))
            * 2.0 ** (-j * rng.uniform(0.5, 1.5))
            for _ in range(n_states)]


def _steady(c, nu, f0=1.0, n_shells=12):
    with catch_warnings():
        simplefilter('ignore', UnprovenRangeWarning)
        return solve_fixed_point(ModelParams(c=c, nu=nu, f0=f0,
                                             n_shells=n_shells))


@check('model: nonlinear transfer conserves energy')
def telescoping(mutate=None):
    shift = MUTATIONS[mutate]
    worst = 0.0
    for c in (1.0, 1.6, 2.0, 2.5):
        p = ModelParams(c=c, nu=0.0, f0=1.0, n_shells=12)
        for a in _states():
            defect = np.dot(a, nonlinear_terms(a, c, loss_shift=shift))
            worst = max(worst, abs(defect) / (2 * fluxes(p, a).sum()))
    return worst <= 1e-12, 'max relative defect %.2e' % worst


@check('model: shell-wise and cumulative energy balance')
def partial_balance():
    worst = 0.0
    for c in (1.6, 2.0, 2.5):
        p = ModelParams(c=c, nu=0.01, f0=1.0, n_shells=12)
        for a in _states():
            scale = p.f0 * a[0] + 2 * fluxes(p, a).sum() + \
                p.nu * hs_norm_sq(a, 1)
            for cumulative in (False, True):
                r = partial_balance_residual(p, a, cumulative=cumulative)
                worst = max(worst, np.abs(r).max() / scale)
    return worst <= 1e-12, 'max relative defect %.2e' % worst


@check('model: H^s norms increase with s')
def sobolev_order():
    ok = all(np.all(np.diff([hs_norm_sq(a, s) for s in (0, 0.5, 1, 2, 3)])
                    >= 0)
             for a in _states())
    return ok, ''


@check('model: fluxes of nonnegative states are nonnegative')
def flux_sign():
    p = ModelParams(c=2.0, nu=0.0, f0=1.0, n_shells=12)
    return all(fluxes(p, a).min() >= 0 for a in _states()), ''


@check('model: rhs is forcing, linear damping and a quadratic form')
def quadratic_rhs():
    worst = 0.0
    for c in (1.6, 2.0, 2.5):
        p = ModelParams(c=c, nu=0.01, f0=1.0, n_shells=12)
        for a in _states():
            once = rhs(p, a) - p.forcing + p.linear_rates * a
            twice = rhs(p, 2 * a) - p.forcing + p.linear_rates * 2 * a
            worst = max(worst, np.abs(twice - 4 * once).max()
                        / np.abs(once).max())
    return worst <= 1e-13, 'max relative defect %.2e' % worst


@check('integrator: unforced inviscid steps conserve energy')
def inviscid_conservation():
    p = ModelParams(c=2.0, nu=0.0, f0=1.0, n_shells=8)
    state = shell_state(np.eye(9)[0])
    for _ in range(200):
        state = step(p, state, 1e-3, forcing=False).state
    drift = abs(energy(state) - 0.5) / 0.5
    return drift <= 1e-10, 'relative drift %.2e at t=%g' % (drift, state.t)


def _trajectory_checks(t_end):
    p = ModelParams(c=2.0, nu=0.5, f0=1.0, n_shells=12)
    config = IntegratorConfig(t_end=t_end, sample_every=t_end / 100)
    details, ok = [], True
    for kind in ('zero', 'random'):
        series = integrate(p, config, initial_state(kind, p, seed=0))
        low = min_amplitude_ratio(series)
        defect = energy_inequality_check(series)
        bound = energy_inequality_bound(series)
        ok = ok and low >= -1e-12 and defect <= bound
        details.append('%s: min a/max|a| %.1e, balance %.1e <= %.1e'
                       % (kind, low, defect, bound))
    return ok, '; '.join(details)


@check('integrator: positivity and energy inequality')
def trajectory_quick():
    return _trajectory_checks(20.0)


@check('integrator: positivity and energy inequality, long runs',
       quick=False)
def trajectory_full():
    return _trajectory_checks(300.0)


@check('integrator: balance defect follows the tolerance', quick=False)
def tolerance_scaling():
    p = ModelParams(c=2.0, nu=0.5, f0=1.0, n_shells=12)
    defects = []
    for rel_tol in (1e-6, 1e-7):
        config = IntegratorConfig(rel_tol=rel_tol, abs_tol=rel_tol * 1e-4,
                                  t_end=20.0)
        series = integrate(p, config, initial_state('zero', p))
        defects.append(energy_inequality_check(series))
    coarse, fine = defects
    return coarse / fine >= 5, 'defect %.2e -> %.2e, ratio %.1f' % (
        coarse, fine, coarse / fine)


@check('integrator: tighter tolerance moves the final state by less '
       'than 10 rel_tol')
def step_doubling():
    p = ModelParams(c=2.0, nu=0.5, f0=1.0, n_shells=12)
    initial = initial_state('zero', p)
    changes = {}
    for tol in (1e-6, 1e-8):
        config = IntegratorConfig(rel_tol=tol, abs_tol=tol * 1e-4, t_end=20.0)
        changes[tol] = final_state_change(p, config, initial)
    ok = all(change < 10 * tol for tol, change in changes.items())
    return ok, ', '.join('rel_tol %g: %.2e' % (tol, change)
                         for tol, change in sorted(changes.items()))


@check('integrator: stiff N=24, nu=1e-3 run keeps dt above 1e-12',
       quick=False)
def stiff_bdf():
    p = ModelParams(c=2.0, nu=1e-3, f0=1.0, n_shells=24)
    config = IntegratorConfig(t_end=20.0, scheme='bdf')
    series = integrate(p, config, initial_state('zero', p))
    stats = series.step_stats
    ok = stats.min_dt >= 1e-12 and np.all(np.isfinite(series.final_state.a))
    return ok, 'min dt %.2e over %d steps' % (stats.min_dt, stats.accepted)


@check('integrator: the viscous fixed point stays put')
def fixed_point_invariance():
    p = ModelParams(c=2.0, nu=0.1, f0=1.0, n_shells=14)
    initial = initial_state('fixed-point', p)
    config = IntegratorConfig(t_end=5.0, sample_every=0.05, rel_tol=1e-10,
                              abs_tol=1e-14)
    series = integrate(p, config, initial)
    drift = np.abs(series.states - initial.a).max()
    return drift < 1e-8, 'max |a(t) - alpha| %.2e' % drift


@check('steady: inviscid fixed point in closed form')
def inviscid_closed_form():
    worst = 0.0
    for c in (1.6, 2.0, 2.5):
        for f0 in (0.5, 1.0, 2.0):
            s = _steady(c, 0.0, f0)
            j = np.arange(13)
            exact = 2.0 ** (c / 6 - c * j / 3) * np.sqrt(f0)
            worst = max(worst, np.abs(s.alpha / exact - 1).max(), s.residual)
    return worst <= 1e-12, 'max defect %.2e' % worst


@check('steady: inviscid fixed point carries a constant flux')
def inviscid_flux():
    worst = 0.0
    for c in (1.6, 2.0, 2.5):
        for f0 in (0.5, 1.0, 2.0):
            p = ModelParams(c=c, nu=0.0, f0=f0, n_shells=12)
            pi = fluxes(p, inviscid_fixed_point(p))[:-1]
            worst = max(worst, np.abs(pi / (2 ** (c / 6) * f0 ** 1.5)
                                      - 1).max())
    return worst <= 1e-12, 'max relative defect %.2e' % worst


@check('steady: viscous fixed point residual')
def viscous_residual():
    worst = 0.0
    for c in (1.6, 2.0, 2.5):
        for nu in (1e-1, 1e-2, 1e-3):
            s = _steady(c, nu)
            worst = max(worst, fixed_point_residual(s.A, s.mu, s.beta))
    return worst < 1e-12, 'max residual %.2e' % worst


def _monotone_decay(nus):
    failed = []
    for c in (1.6, 2.0, 2.5):
        for nu in nus:
            s = _steady(c, nu)
            if not (check_monotonicity(s.A)
                    and check_decay_bound(s.A, s.mu, s.beta)):
                failed.append('c=%g nu=%g' % (c, nu))
    return not failed, ', '.join(failed)


@check('steady: monotone A with the decay bound')
def monotone_decay_quick():
    return _monotone_decay((1e-1, 1e-3))


@check('steady: monotone A with the decay bound, every decade', quick=False)
def monotone_decay_full():
    return _monotone_decay((1e-1, 1e-2, 1e-3, 1e-4, 1e-5))


@check('steady: A tends to 1 as nu vanishes')
def inviscid_limit():
    gaps = np.array([np.abs(_steady(2.0, 10.0 ** -k).A[:6] - 1)
                     for k in range(1, 7)])
    decreasing = bool(np.all(np.diff(gaps, axis=0) < 0))
    return decreasing and gaps[-1].max() < 1e-2, \
        'max |A_j - 1| at nu=1e-6: %.2e' % gaps[-1].max()


@check('steady: g_j bound and telescoped dissipation sums')
def gj_and_sums():
    worst_sum, ok = 0.0, True
    for c in (1.6, 2.0, 2.5):
        for nu in (1e-1, 1e-3):
            s = _steady(c, nu)
            gj, gamma = check_gj_bound(s.A, s.mu, s.beta)
            ok = ok and gj < 1 - gamma
            worst_sum = max(worst_sum,
                            check_dissipation_sums(s.A, s.mu, s.beta))
    return ok and worst_sum <= 1e-9, 'max sum defect %.2e' % worst_sum


def _newton(grid):
    worst, failed = 0.0, []
    for c, nu in grid:
        s = _steady(c, nu)
        agree, diff, _ = check_newton_agreement(s, s.params)
        worst = max(worst, diff)
        if not agree:
            failed.append('c=%g nu=%g' % (c, nu))
    return not failed, 'max relative difference %.2e %s' % (
        worst, ', '.join(failed))


@check('steady: shooting and Newton agree')
def newton_quick():
    return _newton([(2.0, 1e-1), (1.6, 1e-2), (2.5, 1e-2)])


@check('steady: shooting and Newton agree, full grid', quick=False)
def newton_full():
    return _newton([(c, nu) for c in (1.6, 2.0, 2.5)
                    for nu in (1e-1, 1e-2, 1e-3)])


@check('experiments: fixed point balances injection and dissipation')
def energy_equality():
    worst = max(fixed_point_energy_equality(_steady(c, nu), ModelParams(
        c=c, nu=nu, f0=1.0, n_shells=12))
        for c in (1.6, 2.0, 2.5) for nu in (1e-1, 1e-3))
    return worst <= 1e-10, 'max relative defect %.2e' % worst


def _attractor(t_end):
    p = ModelParams(c=2.0, nu=0.5, f0=1.0, n_shells=12)
    s = _steady(2.0, 0.5)
    config = IntegratorConfig(t_end=t_end, sample_every=t_end / 300,
                              rel_tol=1e-11, abs_tol=1e-14)
    ok, details = True, []
    for kind in ('zero', 'random'):
        r = attractor_decay(p, config, initial_state(kind, p, seed=0), s)
        ok = ok and r.passed
        details.append('%s: rate %.4f vs 2 gamma nu %.4f, |b| %.1e'
                       % (kind, r.attractor_rate, r.gamma_bound,
                          r.final_distance))
        if t_end >= 300:
            ok = ok and r.final_distance < 1e-8
    return ok, '; '.join(details)


@check('experiments: convergence to the fixed point')
def attractor_quick():
    return _attractor(100.0)


@check('experiments: convergence to the fixed point to 1e-8', quick=False)
def attractor_full():
    return _attractor(300.0)


@check('experiments: fixed-point spectrum slope and dissipation wavenumber')
def spectrum():
    details, ok = [], True
    for c in (1.0, 2.0, 2.5):
        params = ModelParams(c=c, nu=1e-5, f0=1.0, n_shells=12)
        r = spectrum_report(_steady(c, 1e-5), params)
        expected = kolmogorov_exponents(c)[0]
        ok = ok and r.slope is not None and \
            abs(r.slope - expected) <= 0.05 * abs(expected)
        if c < 2.5:
            ok = ok and r.kappa_d_observed is not None and \
                abs(np.log2(r.kappa_d_observed / r.kappa_d_predicted)) <= 1.5
        details.append('c=%g slope %.3f' % (c, r.slope or np.nan))
    return ok, ', '.join(details)


@check('experiments: inviscid spectrum slope is -(2c/3 + 1)')
def slope_consistency():
    worst = max(abs(inviscid_spectrum_slope(c) - kolmogorov_exponents(c)[0])
                for c in (1.0, 1.6, 2.0, 2.5))
    return worst <= 1e-10, 'max slope difference %.2e' % worst


@check('experiments: doubling nu moves log2 kappa_d by -3/(2(3-c))')
def kappa_scaling():
    worst = 0.0
    for c in (1.0, 1.6, 2.0, 2.5):
        for nu in (1e-2, 1e-4):
            shift = np.log2(kappa_d_predicted(c, 2 * nu, 1.0)
                            / kappa_d_predicted(c, nu, 1.0))
            worst = max(worst, abs(shift + 3 / (2 * (3 - c))))
    return worst <= 1e-12, 'max shift defect %.2e' % worst


@check('experiments: dissipation anomaly down to nu=1e-4', quick=False)
def dissipation_anomaly():
    results = dissipation_sweep(2.0, 1.0, [1e-1, 1e-2, 1e-3, 1e-4])
    balance = max(abs(r.avg_dissipation - r.alpha_inner_product)
                  / r.alpha_inner_product for r in results)
    last = results[-1]
    gap = abs(last.avg_dissipation - last.epsilon_d) / last.epsilon_d
    ok = (all(r.valid for r in results) and balance <= 0.01
          and gap <= 0.05 and dissipation_trend(results))
    return ok, 'balance %.2e, gap to epsilon_d %.2e' % (balance, gap)


RUN_FILES = ('series.csv', 'final_state.json')


@check('cli: rerun of a manifest reproduces the run byte for byte')
def reproducibility():
    from .cli import main
    with tmpfile() as first, tmpfile() as second, \
            redirect_stdout(io.StringIO()):
        codes = (main(['simulate', '--shells', '6', '--t-end', '2',
                       '--init', 'random', '--seed', '11', '--out', first]),
                 main(['rerun', first, '--out', second]))
        if codes != (0, 0):
            return False, 'exit codes %s' % (codes,)
        differ = [name for name in RUN_FILES
                  if _read_bytes(first, name) != _read_bytes(second, name)]
        old, new = read_manifest(first), read_manifest(second)
    same = (old.params == new.params and old.config == new.config
            and old.seed == new.seed
            and dict(old.options, out=None) == dict(new.options, out=None))
    return not differ and same, ', '.join(differ) or 'identical'


def _read_bytes(directory, name):
    with open(os.path.join(directory, name), 'rb') as f:
        return f.read()


def run_checks(quick=True, mutate=None, select=None):
    """ Run the registered checks in registration order

    Parameters
    ----------
    quick : bool
        Only the checks registered with ``quick=True``
    mutate : str, optional
        ``'flux'`` tampers with the loss exponent of the nonlinearity
    select : callable, optional
        Predicate on check names

    Returns
    -------
    list of CheckRow
        A check that raises counts as failed with the exception as detail.
    """
    if mutate not in MUTATIONS:
        raise ValueError('unknown mutation %r, expected one of %s'
                         % (mutate, ', '.join(sorted(filter(None,
                                                            MUTATIONS)))))
    rows = []
    for name, is_quick, func in checks:
        if quick and not is_quick or select and not select(name):
            continue
        start = default_timer()
        try:
            passed, detail = func(**filter_kwargs(func, {'mutate': mutate}))
        except Exception as e:
            passed, detail = False, '%s: %s' % (type(e).__name__, e)
        rows.append(CheckRow(name, bool(passed), detail,
                             default_timer() - start))
    return rows


def format_table(rows):
    width = max([len(r.name) for r in rows] + [5])
    lines = ['%-*s  %-4s  %8s  %s' % (width, 'check', 'ok', 'seconds',
                                      'detail')]
    for r in rows:
        lines.append('%-*s  %-4s  %8.2f  %s'
                     % (width, r.name, 'PASS' if r.passed else 'FAIL',
                        r.seconds, r.detail))
    return '\n'.join(lines)
