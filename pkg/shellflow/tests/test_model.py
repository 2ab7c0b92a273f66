from __future__ import absolute_import, division, print_function

import pytest

import numpy as np
from hypothesis import given, settings, strategies as st

from shellflow.model import (ModelParams, ShellState, banded_to_dense,
                             diagnostics, energy, energy_balance_residual,
                             flux, fluxes, hs_norm_sq, jacobian_banded,
                             nonlinear_terms, partial_balance_residual, rhs,
                             spectrum)
from shellflow.steady import inviscid_fixed_point


amplitude_lists = st.lists(st.floats(min_value=0, max_value=10,
                                     allow_nan=False), min_size=3,
                           max_size=14)
exponents = st.floats(min_value=1, max_value=2.5)


def params_for(a, c=2.0, nu=0.1, f0=1.0):
    return ModelParams(c=c, nu=nu, f0=f0, n_shells=len(a) - 1)


def gross_transfer(a, c):
    """ Gain plus loss of every shell, without cancellation """
    j = np.arange(len(a))
    out = np.zeros_like(a)
    out[1:] += 2.0 ** (c * (j[1:] - 1)) * a[:-1] ** 2
    out[:-1] += 2.0 ** (c * j[:-1]) * a[:-1] * a[1:]
    return out


@pytest.mark.parametrize('kwargs', [dict(c=0.5), dict(c=2.6), dict(nu=-1),
                                    dict(f0=0), dict(n_shells=1),
                                    dict(nu=float('nan')),
                                    dict(f0=float('inf'))])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


def test_params_n_shells_must_be_integer():
    with pytest.raises(TypeError):
        ModelParams(n_shells=2.5)


def test_params_replace_validates():
    p = ModelParams(c=2, nu=0.1, f0=1, n_shells=4)
    assert p._replace(nu=0.2).nu == 0.2
    with pytest.raises(ValueError):
        p._replace(nu=-0.2)


def test_params_derived():
    p = ModelParams(c=2, nu=0.5, f0=3, n_shells=3)
    assert list(p.forcing) == [3, 0, 0, 0]
    assert list(p.linear_rates) == [0.5, 2, 8, 32]
    assert p.proven
    assert not p._replace(c=1.5).proven


def test_rhs_single_shell():
    p = ModelParams(c=2, nu=1, f0=1, n_shells=3)
    assert list(rhs(p, ShellState(0.0, np.array([0., 1., 0., 0.])))) == \
        [1., -4., 4., 0.]


def test_rhs_rejects_wrong_length():
    p = ModelParams(n_shells=3)
    with pytest.raises(ValueError):
        rhs(p, [1., 2.])


def test_rhs_names_non_finite_shell():
    p = ModelParams(n_shells=3)
    with pytest.raises(ValueError) as e:
        rhs(p, [1., 0.5, float('nan'), 0.])
    assert 'shell 2' in str(e.value)


def test_flux():
    p = ModelParams(c=2, nu=0, f0=1, n_shells=5)
    assert flux(p, [0, 0, 0, 2, 1, 0], 3) == 2 ** 6 * 4 * 1
    assert flux(p, [1, 1, 1, 1, 1, 1], 5) == 0
    with pytest.raises(IndexError):
        flux(p, [0] * 6, 6)


def test_energy_of_inviscid_fixed_point():
    p = ModelParams(c=2, nu=0, f0=1, n_shells=10)
    j = np.arange(11)
    expected = 0.5 * 2 ** (2 / 3) * np.sum(2.0 ** (-4 * j / 3))
    assert abs(energy(inviscid_fixed_point(p)) - expected) < 1e-12


@pytest.mark.parametrize('c', [1.6, 2.0, 2.5])
@pytest.mark.parametrize('f0', [0.5, 1.0, 2.0])
def test_inviscid_fixed_point_has_constant_flux(c, f0):
    p = ModelParams(c=c, nu=0, f0=f0, n_shells=12)
    pi = fluxes(p, inviscid_fixed_point(p))
    np.testing.assert_allclose(pi[:-1], 2 ** (c / 6) * f0 ** 1.5,
                               rtol=1e-12)
    assert pi[-1] == 0


@pytest.mark.parametrize('c', [1.6, 2.0, 2.5])
def test_inviscid_fixed_point_is_stationary_below_truncation(c):
    p = ModelParams(c=c, nu=0, f0=1, n_shells=12)
    alpha = inviscid_fixed_point(p)
    j = np.arange(1, 12)
    gain = 2.0 ** (c * (j - 1)) * alpha[j - 1] ** 2
    da = rhs(p, alpha)
    assert abs(da[0]) < 1e-12
    np.testing.assert_array_less(np.abs(da[1:12]), 1e-12 * gain)
    # the last shell only gains
    assert da[12] > 0


def test_hs_norm():
    assert hs_norm_sq([1., 1.], 0) == 2
    assert hs_norm_sq([1., 1.], 1) == 5
    assert hs_norm_sq([0., 2.], 2) == 64


def test_spectrum():
    assert list(spectrum([2., 2., 4.])) == [4., 2., 4.]


@settings(max_examples=200, deadline=None)
@given(amplitude_lists, exponents)
def test_nonlinear_transfer_conserves_energy(a, c):
    a = np.array(a)
    defect = np.dot(a, nonlinear_terms(a, c))
    assert abs(defect) <= 1e-12 * np.dot(a, gross_transfer(a, c))


def test_loss_shift_breaks_conservation():
    a = np.ones(3)
    assert abs(np.dot(a, nonlinear_terms(a, 2.0, loss_shift=0.1))) > 0.1


@settings(max_examples=100, deadline=None)
@given(amplitude_lists, exponents, st.floats(min_value=0.1, max_value=10))
def test_nonlinear_terms_are_quadratic(a, c, scale):
    a = np.array(a)
    tol = 1e-12 * scale ** 2 * gross_transfer(a, c).max()
    np.testing.assert_allclose(nonlinear_terms(scale * a, c),
                               scale ** 2 * nonlinear_terms(a, c),
                               rtol=0, atol=tol)


@settings(max_examples=100, deadline=None)
@given(amplitude_lists, exponents, st.floats(min_value=0, max_value=1))
def test_energy_balance(a, c, nu):
    a = np.array(a)
    p = params_for(a, c=c, nu=nu)
    scale = 1 + p.f0 * a[0] + nu * hs_norm_sq(a, 1) + 2 * fluxes(p, a).sum()
    assert abs(energy_balance_residual(p, a)) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(amplitude_lists, exponents, st.floats(min_value=0, max_value=1))
def test_partial_balance(a, c, nu):
    a = np.array(a)
    p = params_for(a, c=c, nu=nu)
    scale = 1 + p.f0 * a[0] + nu * hs_norm_sq(a, 1) + 2 * fluxes(p, a).sum()
    for cumulative in (False, True):
        r = partial_balance_residual(p, a, cumulative=cumulative)
        assert np.abs(r).max() <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(amplitude_lists)
def test_sobolev_norms_increase_with_s(a):
    norms = [hs_norm_sq(a, s) for s in (0, 0.5, 1, 2)]
    assert all(x <= y for x, y in zip(norms, norms[1:]))


@given(amplitude_lists, exponents)
def test_fluxes_of_nonnegative_states(a, c):
    a = np.array(a)
    pi = fluxes(params_for(a, c=c), a)
    assert pi.min() >= 0
    assert pi[-1] == 0


def test_diagnostics():
    p = ModelParams(c=2, nu=0.1, f0=2, n_shells=2)
    row = diagnostics(p, ShellState(1.5, np.array([1., 0.5, 0.])))
    assert row.t == 1.5
    assert row.energy == 0.625
    assert row.h1_sq == 2
    assert row.injection == 2
    assert list(row.flux) == [0.5, 0, 0]
    assert row.dissipated is None


def test_jacobian_matches_finite_differences():
    p = ModelParams(c=2, nu=0.3, f0=1, n_shells=5)
    a = 2.0 ** -np.arange(6)
    J = banded_to_dense(jacobian_banded(p, a))
    h = 1e-7
    numeric = np.array([(rhs(p, a + h * e) - rhs(p, a - h * e)) / (2 * h)
                        for e in np.eye(6)]).T
    np.testing.assert_allclose(J, numeric, rtol=1e-6, atol=1e-8)
