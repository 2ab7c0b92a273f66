""" The viscous dyadic model truncated at shell N

    d/dt a_j = f_j - nu 2^{2j} a_j + 2^{c(j-1)} a_{j-1}^2 - 2^{cj} a_j a_{j+1}

for j = 0..N with a_{-1} = a_{N+1} = 0 and forcing on shell 0 only.
Everything here is a pure function of plain values.
"""
from __future__ import absolute_import, division, print_function

from collections import namedtuple
from warnings import warn

import numpy as np
from toolz import merge


__all__ = ['ModelParams', 'ShellState', 'DiagnosticsRow', 'NumericalFailure',
           'UnprovenRangeWarning', 'rhs', 'flux', 'fluxes', 'energy',
           'hs_norm_sq', 'energy_balance_residual', 'partial_balance_residual',
           'diagnostics', 'spectrum']


UNPROVEN_MESSAGE = 'c outside (3/2,5/2]: monotonicity unproven'


class NumericalFailure(RuntimeError):
    """ Base class for failures of a numerical scheme (not of the input) """


class UnprovenRangeWarning(UserWarning):
    """ Raised for intermittency exponents outside (3/2, 5/2] """


def in_proven_range(c):
    return 1.5 < c <= 2.5


def warn_unproven(c, stacklevel=3):
    if not in_proven_range(c):
        warn(UnprovenRangeWarning(UNPROVEN_MESSAGE), stacklevel=stacklevel)


class ModelParams(namedtuple('ModelParams', 'c nu f0 n_shells')):
    """ Parameters of the truncated model

    Parameters
    ----------
    c : float
        Intermittency exponent of the nonlinearity, in [1, 5/2]
    nu : float
        Viscosity, >= 0
    f0 : float
        Force amplitude on shell 0, > 0
    n_shells : int
        Truncation index N >= 2; shells 0..N are simulated

    >>> ModelParams(c=2, nu=0.1, f0=1, n_shells=12)
    ModelParams(c=2.0, nu=0.1, f0=1.0, n_shells=12)
    """
    __slots__ = ()

    def __new__(cls, c=2.0, nu=0.1, f0=1.0, n_shells=12):
        c, nu, f0 = float(c), float(nu), float(f0)
        if int(n_shells) != n_shells:
            raise TypeError('n_shells must be an integer, got %r' % (n_shells,))
        n_shells = int(n_shells)
        if not all(map(np.isfinite, (c, nu, f0))):
            raise ValueError('parameters must be finite: c=%r nu=%r f0=%r'
                             % (c, nu, f0))
        if not 1.0 <= c <= 2.5:
            raise ValueError('c must lie in [1, 5/2], got %r' % c)
        if nu < 0:
            raise ValueError('viscosity must be nonnegative, got %r' % nu)
        if f0 <= 0:
            raise ValueError('force amplitude must be positive, got %r' % f0)
        if n_shells < 2:
            raise ValueError('need at least shells 0..2, got N=%d' % n_shells)
        return super(ModelParams, cls).__new__(cls, c, nu, f0, n_shells)

    def _replace(self, **kwargs):
        return type(self)(**merge(self._asdict(), kwargs))

    @property
    def proven(self):
        """ Whether c lies in the range where the fixed point theory holds """
        return in_proven_range(self.c)

    @property
    def shells(self):
        return np.arange(self.n_shells + 1)

    @property
    def forcing(self):
        f = np.zeros(self.n_shells + 1)
        f[0] = self.f0
        return f

    @property
    def linear_rates(self):
        """ Viscous damping rate nu 2^{2j} of every shell """
        return self.nu * 4.0 ** self.shells


ShellState = namedtuple('ShellState', 't a')
ShellState.__doc__ = """ Time plus the amplitudes a_0..a_N """


def shell_state(a, t=0.0):
    """ Build a ShellState holding a private float copy of ``a`` """
    return ShellState(float(t), np.array(a, dtype='f8'))


DiagnosticsRow = namedtuple('DiagnosticsRow',
                            't energy h1_sq flux injection dissipated injected')
DiagnosticsRow.__new__.__defaults__ = (None, None)
DiagnosticsRow.__doc__ = """ One sample of a run

``dissipated`` and ``injected`` hold the running integrals of
nu |a|_{H^1}^2 and (f, a) from the start of the run, when known.
"""


def amplitudes(state):
    """ The amplitude vector of a ShellState or of a bare sequence """
    return np.asarray(getattr(state, 'a', state), dtype='f8')


def check_finite(a):
    bad = np.flatnonzero(~np.isfinite(a))
    if len(bad):
        raise ValueError('non-finite amplitude %r at shell %d'
                         % (a[bad[0]], bad[0]))
    return a


def _checked(params, state):
    a = amplitudes(state)
    if a.shape != (params.n_shells + 1,):
        raise ValueError('expected %d amplitudes, got shape %s'
                         % (params.n_shells + 1, a.shape))
    return check_finite(a)


def nonlinear_terms(a, c, loss_shift=0.0):
    """ Quadratic part of the right hand side

    ``loss_shift`` perturbs the exponent of the loss term only, which
    breaks energy conservation; it exists to check that the conservation
    checks notice.

    >>> nonlinear_terms(np.array([0., 1., 0.]), 2.0)
    array([0., 0., 4.])
    """
    a = np.asarray(a, dtype='f8')
    j = np.arange(len(a))
    out = np.zeros_like(a)
    out[1:] += 2.0 ** (c * (j[1:] - 1)) * a[:-1] ** 2
    out[:-1] -= 2.0 ** ((c + loss_shift) * j[:-1]) * a[:-1] * a[1:]
    return out


def rhs(params, state):
    """ Time derivative of every shell

    >>> p = ModelParams(c=2, nu=1, f0=1, n_shells=3)
    >>> rhs(p, [0., 1., 0., 0.])
    array([ 1., -4.,  4.,  0.])
    """
    a = _checked(params, state)
    return params.forcing - params.linear_rates * a + nonlinear_terms(a, params.c)


def fluxes(params, state):
    """ Energy flux Pi_j = 2^{cj} a_j^2 a_{j+1} through every shell, Pi_N = 0 """
    a = _checked(params, state)
    out = np.zeros_like(a)
    out[:-1] = 2.0 ** (params.c * params.shells[:-1]) * a[:-1] ** 2 * a[1:]
    return out


def flux(params, state, j):
    """ Energy flux out of shells 0..j

    >>> p = ModelParams(c=2, nu=0, f0=1, n_shells=5)
    >>> flux(p, [0, 0, 0, 2, 1, 0], 3)
    256.0
    """
    if not 0 <= j <= params.n_shells:
        raise IndexError('shell %r outside 0..%d' % (j, params.n_shells))
    return float(fluxes(params, state)[j])


def energy(state):
    """ E = 1/2 sum a_j^2 """
    a = amplitudes(state)
    return 0.5 * float(np.dot(a, a))


def hs_norm_sq(state, s=1):
    """ Sobolev norm |a|_{H^s}^2 = sum 2^{2js} a_j^2

    >>> hs_norm_sq([1., 1.], 1)
    5.0
    """
    a = amplitudes(state)
    return float(np.sum(4.0 ** (s * np.arange(len(a))) * a ** 2))


def dissipation_rate(params, state):
    return params.nu * hs_norm_sq(state, 1)


def injection(params, state):
    return params.f0 * float(amplitudes(state)[0])


def energy_balance_residual(params, state):
    """ (a, rhs) - (f, a) + nu |a|_{H^1}^2, zero up to rounding """
    a = _checked(params, state)
    return (float(np.dot(a, rhs(params, a)))
            - injection(params, a) + dissipation_rate(params, a))


def partial_balance_residual(params, state, cumulative=False):
    """ Defect of the shell-wise energy balance

    Shell-wise: a_j rhs_j = Pi_{j-1} - Pi_j - nu 2^{2j} a_j^2 + f_j a_j.
    Cumulative: d/dt 1/2 sum_{i<=j} a_i^2 = f_0 a_0 - Pi_j
    - nu sum_{i<=j} 2^{2i} a_i^2.
    """
    a = _checked(params, state)
    pi = fluxes(params, a)
    rate = a * rhs(params, a)
    damping = params.linear_rates * a ** 2
    if cumulative:
        expected = injection(params, a) - pi - np.cumsum(damping)
        return np.cumsum(rate) - expected
    inflow = np.concatenate([[0.0], pi[:-1]])
    return rate - (inflow - pi - damping + params.forcing * a)


def spectrum(state):
    """ Shell energy spectrum E(2^j) = a_j^2 2^{-j} """
    a = amplitudes(state)
    return a ** 2 * 2.0 ** -np.arange(len(a))


def diagnostics(params, state, dissipated=None, injected=None):
    a = _checked(params, state)
    return DiagnosticsRow(t=float(getattr(state, 't', 0.0)),
                          energy=energy(a),
                          h1_sq=hs_norm_sq(a, 1),
                          flux=fluxes(params, a),
                          injection=injection(params, a),
                          dissipated=dissipated,
                          injected=injected)


def jacobian_banded(params, state):
    """ Tridiagonal Jacobian of ``rhs`` in LAPACK (1, 1) band layout

    ``ab[0, j+1]``, ``ab[1, j]`` and ``ab[2, j]`` hold the derivatives of
    rows j, j and j+1 with respect to a_{j+1}, a_j and a_j.
    """
    a = amplitudes(state)
    w = 2.0 ** (params.c * np.arange(len(a)))
    ab = np.zeros((3, len(a)))
    ab[0, 1:] = -w[:-1] * a[:-1]
    ab[1, :] = -params.linear_rates
    ab[1, :-1] -= w[:-1] * a[1:]
    ab[2, :-1] = 2.0 * w[:-1] * a[:-1]
    return ab


def banded_to_dense(ab):
    return np.diag(ab[1]) + np.diag(ab[0, 1:], 1) + np.diag(ab[2, :-1], -1)
