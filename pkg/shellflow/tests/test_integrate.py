from __future__ import absolute_import, division, print_function

import pytest

import numpy as np

from shellflow.initial import initial_state
from shellflow.integrate import (IntegrationError, IntegratorConfig,
                                 PositivityError, energy_inequality_bound,
                                 energy_inequality_check, integrate,
                                 final_state_change, min_amplitude_ratio,
                                 sample_times, step)
from shellflow.model import ModelParams, ShellState, energy, shell_state
from shellflow.steady import solve_fixed_point


def test_config_defaults_and_validation():
    config = IntegratorConfig(t_end=20)
    assert config.sample_every == 0.2
    assert config.scheme == 'ifrk'
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(scheme='euler')
    with pytest.raises(ValueError):
        config._replace(t_end=-1)


def test_sample_times_end_exactly():
    config = IntegratorConfig(t_end=1.0, sample_every=0.3)
    times = sample_times(0.0, config)
    np.testing.assert_allclose(times, [0.3, 0.6, 0.9, 1.0])
    assert times[-1] == 1.0


def test_step_pure_decay_is_exact():
    p = ModelParams(c=2, nu=0.5, f0=1, n_shells=3)
    a = np.array([1.0, 1.0, 1.0, 1.0])
    result = step(p, ShellState(0.0, a), 0.1, nonlinear=False, forcing=False)
    np.testing.assert_allclose(result.state.a,
                               a * np.exp(-p.linear_rates * 0.1), rtol=1e-14)
    assert result.state.t == 0.1


def test_step_conserves_energy_without_forcing_or_viscosity():
    p = ModelParams(c=2, nu=0, f0=1, n_shells=6)
    state = shell_state([1, 0, 0, 0, 0, 0, 0])
    for _ in range(100):
        state = step(p, state, 1e-3, forcing=False).state
    assert state.a[1] > 0
    assert abs(energy(state) - 0.5) < 1e-12


def test_step_rejects_nonpositive_dt():
    p = ModelParams(n_shells=3)
    with pytest.raises(ValueError):
        step(p, shell_state(np.zeros(4)), 0.0)


def test_step_handles_huge_viscous_rates():
    p = ModelParams(c=2, nu=1.0, f0=1, n_shells=30)
    result = step(p, shell_state(2.0 ** -np.arange(31)), 0.1)
    assert np.all(np.isfinite(result.state.a))
    assert abs(result.state.a[-1]) < 1e-10


def test_integrate_samples():
    p = ModelParams(c=2, nu=0.1, f0=1, n_shells=12)
    config = IntegratorConfig(t_end=5.0, sample_every=0.5)
    series = integrate(p, config, initial_state('zero', p))
    t = series.times
    assert t[0] == 0 and t[-1] == 5.0
    assert np.all(np.diff(t) > 0)
    assert len(series) == 11
    assert series.states.shape == (11, 13)
    assert series.final_state.t == 5.0
    assert series.step_stats.accepted > 0
    assert series.rows[0].dissipated == 0


@pytest.mark.parametrize('kind', ['zero', 'random'])
def test_positivity_and_energy_inequality(kind):
    p = ModelParams(c=2, nu=0.5, f0=1, n_shells=12)
    config = IntegratorConfig(t_end=20.0)
    series = integrate(p, config, initial_state(kind, p, seed=0))
    assert min_amplitude_ratio(series) >= -1e-12
    assert energy_inequality_check(series) <= energy_inequality_bound(series)


def test_inviscid_truncation_gains_energy():
    p = ModelParams(c=2, nu=0, f0=1, n_shells=4)
    series = integrate(p, IntegratorConfig(t_end=10.0),
                       initial_state('zero', p))
    assert np.all(np.diff(series.column('energy')) > 0)


def test_fixed_point_is_stationary():
    p = ModelParams(c=2, nu=0.1, f0=1, n_shells=14)
    alpha = solve_fixed_point(p).alpha
    config = IntegratorConfig(t_end=5.0, rel_tol=1e-10, abs_tol=1e-14)
    series = integrate(p, config, shell_state(alpha))
    distance = np.sqrt(np.sum((series.states - alpha) ** 2, axis=1))
    assert distance.max() < 1e-8


def test_bdf_matches_integrating_factor():
    p = ModelParams(c=2, nu=0.1, f0=1, n_shells=10)
    initial = initial_state('random', p, seed=1)
    ifrk = integrate(p, IntegratorConfig(t_end=5.0, rel_tol=1e-10,
                                         abs_tol=1e-14), initial)
    bdf = integrate(p, IntegratorConfig(t_end=5.0, rel_tol=1e-10,
                                        abs_tol=1e-14, scheme='bdf'), initial)
    np.testing.assert_allclose(bdf.times, ifrk.times)
    np.testing.assert_allclose(bdf.final_state.a, ifrk.final_state.a,
                               rtol=1e-5, atol=1e-10)
    assert energy_inequality_check(bdf) <= 1e-5


def test_integrate_validates_initial_state():
    p = ModelParams(n_shells=3)
    config = IntegratorConfig(t_end=1.0)
    with pytest.raises(ValueError):
        integrate(p, config, shell_state([1, -1, 0, 0]))
    with pytest.raises(ValueError):
        integrate(p, config, shell_state([1, 0, 0]))
    with pytest.raises(ValueError):
        integrate(p, config, shell_state([1, np.inf, 0, 0]))
    with pytest.raises(ValueError):
        integrate(p, config, shell_state([0, 0, 0, 0], t=2.0))


def test_step_size_underflow():
    p = ModelParams(c=2.5, nu=0, f0=1, n_shells=20)
    config = IntegratorConfig(t_end=1e3, dt_init=1e-3)
    with pytest.raises(IntegrationError):
        integrate(p, config, shell_state(np.full(21, 100.0)))


def test_positivity_error_is_an_integration_error():
    assert issubclass(PositivityError, IntegrationError)


def test_energy_inequality_tightens_with_tolerance():
    p = ModelParams(c=2, nu=0.5, f0=1, n_shells=12)
    initial = initial_state('zero', p)
    defects = [energy_inequality_check(integrate(
        p, IntegratorConfig(t_end=20.0, rel_tol=tol, abs_tol=tol * 1e-4),
        initial)) for tol in (1e-6, 1e-7, 1e-8)]
    assert defects[0] / defects[1] >= 5
    assert defects[1] / defects[2] >= 5


@pytest.mark.parametrize('rel_tol', [1e-6, 1e-8])
def test_tighter_tolerance_barely_moves_final_state(rel_tol):
    p = ModelParams(c=2, nu=0.5, f0=1, n_shells=12)
    config = IntegratorConfig(t_end=20.0, rel_tol=rel_tol,
                              abs_tol=rel_tol * 1e-4)
    change = final_state_change(p, config, initial_state('zero', p))
    assert change < 10 * rel_tol


@pytest.mark.slow
def test_stiff_run_keeps_step_size():
    p = ModelParams(c=2, nu=1e-3, f0=1, n_shells=24)
    series = integrate(p, IntegratorConfig(t_end=20.0, scheme='bdf'),
                       initial_state('zero', p))
    assert series.step_stats.min_dt >= 1e-12
    assert np.all(np.isfinite(series.final_state.a))
    assert series.final_state.t == 20.0


def test_min_dt_ignores_steps_clipped_onto_samples():
    p = ModelParams(c=2, nu=0.5, f0=1, n_shells=6)
    config = IntegratorConfig(t_end=1.0, sample_every=0.1 - 1e-10)
    times = sample_times(0.0, config)
    assert times[-1] - times[-2] < 1e-8
    series = integrate(p, config, initial_state('zero', p))
    assert series.step_stats.min_dt > 1e-6


def test_long_run_reaches_steady_fixed_point():
    p = ModelParams(c=2, nu=0.1, f0=1, n_shells=12)
    series = integrate(p, IntegratorConfig(t_end=100.0),
                       initial_state('zero', p))
    alpha = solve_fixed_point(p).alpha
    assert np.linalg.norm(series.final_state.a - alpha) < 1e-6
