""" Fixed point of the viscous model

Write the steady state as alpha_j = K 2^{-cj/3} A_j with K = 2^{c/6} f0^{1/2}.
The rescaled sequence solves

    A_{j-1}^2 - A_j A_{j+1} = mu 2^{beta j} A_j,     1 - A_0 A_1 = mu A_0

with mu = nu 2^{c/6} f0^{-1/2} and beta = 2 (1 - c/3).  Substituting the
rescaling into the shell-0 equation fixes the sign of the c/6 exponent in
mu; 2^{-c/6} does not satisfy it.

Shooting picks A_0, runs the recursion forward and bisects on how the
trajectory fails.  Forward iteration loses roughly one bit per shell, so
only the prefix on which the two bracketing shots agree is kept; the tail
comes from the backward recursion, which is stable, matched to that
prefix.
"""
from __future__ import absolute_import, division, print_function

from collections import namedtuple
from warnings import warn, catch_warnings, simplefilter

import numpy as np
from scipy.linalg import solve_banded, LinAlgError

from .model import (ModelParams, NumericalFailure, UnprovenRangeWarning,
                    jacobian_banded, banded_to_dense,
                    UNPROVEN_MESSAGE, in_proven_range, warn_unproven)


__all__ = ['SteadyState', 'ShootResult', 'NewtonResult', 'ShootingError',
           'rescale_mu_beta', 'steady_recursion', 'solve_fixed_point',
           'newton_oracle', 'check_monotonicity', 'check_decay_bound',
           'check_gj_bound', 'gamma_constant', 'inviscid_fixed_point']


UNDERFLOW = 1e-300
MATCH_TOL = 1e-13
# rows of the unscaled steady system whose terms are all below this are
# treated as satisfied, their arithmetic runs in subnormals
NEGLIGIBLE_ROW = 1e-200

CONVERGED = 'CONVERGED'
UNDERSHOOT = 'UNDERSHOOT'
OVERSHOOT = 'OVERSHOOT'


class ShootingError(NumericalFailure):
    """ No bracket or no consistent tail; ``result`` holds the last shot """
    def __init__(self, message, result=None):
        super(ShootingError, self).__init__(message)
        self.result = result


class NewtonFallbackWarning(UserWarning):
    """ Newton met a singular Jacobian and took a pseudo-inverse step """


ShootResult = namedtuple('ShootResult',
                         'classification first_fail_index sequence A0')

SteadyState = namedtuple('SteadyState',
                         'mu beta A alpha gamma J residual params '
                         'A0_bracket matching_index horizon warnings')
SteadyState.__doc__ = """ Fixed point in rescaled (A) and physical (alpha) form

A runs over shells 0..horizon and alpha over 0..N; entries below the
underflow cutoff are stored as 0.
"""

NewtonResult = namedtuple('NewtonResult',
                          'alpha residual scaled_residual iterations '
                          'converged pinv_steps')


def rescale_mu_beta(params):
    """ Rescaled viscosity and recursion exponent

    >>> mu, beta = rescale_mu_beta(ModelParams(c=1.5, nu=0, f0=1))
    >>> mu, beta
    (0.0, 1.0)
    """
    beta = 2.0 * (1.0 - params.c / 3.0)
    mu = params.nu * 2.0 ** (params.c / 6.0) / np.sqrt(params.f0)
    return float(mu), beta


def dissipation_index(mu, beta):
    """ Real J with mu 2^{beta J} = 1, infinite without viscosity """
    if mu == 0:
        return np.inf
    return -np.log2(mu) / beta


def gamma_constant(beta):
    """ Lower bound on the contraction of |b|^2 per unit of nu

    >>> gamma_constant(1.0)
    0.0
    """
    return 1.0 - 2.0 ** (beta / 2) / (1.0 - 2.0 ** (beta - 1)
                                      + np.sqrt(1.0 + 2.0 ** (2 * (beta - 1))))


def rescaling_constant(c, f0):
    return 2.0 ** (c / 6.0) * np.sqrt(f0)


def inviscid_fixed_point(params):
    """ alpha^0_j = 2^{c/6 - cj/3} f0^{1/2} on shells 0..N """
    c = params.c
    return 2.0 ** (c / 6.0 - c * params.shells / 3.0) * np.sqrt(params.f0)


def to_alpha(A, c, f0, n_shells):
    """ Undo the rescaling on shells 0..n_shells, zero-padding past A """
    out = np.zeros(n_shells + 1)
    A = np.where(np.asarray(A) < UNDERFLOW, 0.0, A)[:n_shells + 1]
    j = np.arange(len(A))
    out[:len(A)] = rescaling_constant(c, f0) * 2.0 ** (-c * j / 3.0) * A
    out[out < UNDERFLOW] = 0.0
    return out


def to_rescaled(alpha, c, f0):
    alpha = np.asarray(alpha, dtype='f8')
    j = np.arange(len(alpha))
    return alpha * 2.0 ** (c * j / 3.0) / rescaling_constant(c, f0)


def steady_recursion(A0, mu, beta, j_max):
    """ Run the rescaled recursion forward from A0

    Stops at the first shell that is nonpositive (UNDERSHOOT) or not
    below its predecessor (OVERSHOOT), or once the sequence drops under
    the underflow cutoff or reaches ``j_max`` (CONVERGED).  Without
    viscosity the constant sequence is admissible, so only a strict
    increase counts as OVERSHOOT.

    >>> steady_recursion(1.1, 0.0, 1.0, 10).classification
    'OVERSHOOT'
    >>> steady_recursion(1.0, 0.0, 1.0, 10).classification
    'CONVERGED'
    """
    if not A0 > 0:
        raise ValueError('A0 must be positive, got %r' % (A0,))
    if j_max < 2:
        raise ValueError('j_max must be at least 2, got %r' % (j_max,))
    strict = mu > 0
    seq = [float(A0)]
    nxt = 1.0 / A0 - mu
    for j in range(1, j_max + 1):
        prev = seq[-1]
        if nxt <= 0:
            return ShootResult(UNDERSHOOT, j, np.array(seq), A0)
        if nxt > prev or (strict and nxt == prev):
            return ShootResult(OVERSHOOT, j, np.array(seq), A0)
        seq.append(nxt)
        if nxt < UNDERFLOW:
            break
        # written as (A_{j-1}/A_j) A_{j-1} so the square cannot underflow
        nxt = (prev / nxt) * prev - mu * 2.0 ** (beta * j)
    return ShootResult(CONVERGED, None, np.array(seq), A0)


def shot_side(result):
    """ +1 if the shot started above the fixed point, -1 if below

    A perturbation of A0 alternates in sign along the sequence, so the
    kind of failure has to be read together with the parity of the shell
    where it happened.  CONVERGED shots give 0.
    """
    if result.classification == CONVERGED:
        return 0
    kind = 1 if result.classification == OVERSHOOT else -1
    return kind * (-1) ** result.first_fail_index


def _bracket(mu, beta, j_max):
    ceiling = 1.0 / mu
    shoot = lambda x: steady_recursion(x, mu, beta, j_max)

    lo = min(1.0, ceiling) / 2
    below = shoot(lo)
    for _ in range(1100):
        if shot_side(below) == -1:
            break
        lo /= 2
        below = shoot(lo)
    else:
        raise ShootingError('no shot below the fixed point in (0, 1/mu)',
                            below)

    start = min(1.0, ceiling)
    candidates = [ceiling - (ceiling - start) * 0.5 ** k for k in range(60)]
    for hi in candidates + [ceiling]:
        if hi <= lo:
            continue
        above = shoot(hi)
        if shot_side(above) == 1:
            return below, above
    raise ShootingError('no sign-changing bracket found in (0, 1/mu=%g)'
                        % ceiling, above)


def bisect_shots(mu, beta, j_max, tol_A0=1e-14):
    """ Narrow a bracketing pair of shots around the true A0

    Returns the final (below, above) pair; they coincide when a shot
    classifies as CONVERGED.
    """
    below, above = _bracket(mu, beta, j_max)
    side_lo = shot_side(below)
    while above.A0 - below.A0 > tol_A0 * above.A0:
        mid = 0.5 * (below.A0 + above.A0)
        if not below.A0 < mid < above.A0:
            break
        shot = steady_recursion(mid, mu, beta, j_max)
        side = shot_side(shot)
        if side == 0:
            return shot, shot
        if side == side_lo:
            below = shot
        else:
            above = shot
    return below, above


def matched_prefix(below, above):
    """ Midpoint of two shots on the shells where they agree to MATCH_TOL """
    n = min(len(below.sequence), len(above.sequence))
    lo, hi = below.sequence[:n], above.sequence[:n]
    spread = np.abs(lo - hi) / np.maximum(np.abs(hi), np.abs(lo))
    bad = np.flatnonzero(~(spread <= MATCH_TOL))
    m = n - 1 if not len(bad) else max(bad[0] - 1, 0)
    return 0.5 * (lo[:m + 1] + hi[:m + 1])


def backward_sweep(s, m, horizon, mu, beta):
    """ A_m..A_horizon from A_horizon = s and A_{horizon+1} = 0 """
    out = np.zeros(horizon - m + 2)
    out[-2] = s
    for j in range(horizon, m, -1):
        i = j - m
        out[i - 1] = np.sqrt(out[i] * (out[i + 1] + mu * 2.0 ** (beta * j)))
    return out[:-1]


def _match_tail(target, m, horizon, mu, beta):
    """ A_horizon whose backward sweep hits ``target`` at shell m, or None """
    lo, hi = np.log(UNDERFLOW), np.log(1e150)
    reach = lambda logs: backward_sweep(np.exp(logs), m, horizon, mu, beta)[0]
    if reach(lo) > target or reach(hi) < target:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if reach(mid) < target:
            lo = mid
        else:
            hi = mid
    return np.exp(0.5 * (lo + hi))


def close_tail(prefix, mu, beta, j_max):
    """ Extend a trusted prefix A_0..A_m to the underflow cutoff

    The horizon is pushed out shell by shell while the matched A_horizon
    stays above the cutoff; the deepest such horizon is used.
    """
    m = len(prefix) - 1
    if prefix[-1] < UNDERFLOW:
        return prefix, m
    best = None
    for horizon in range(m + 1, max(j_max, m + 1) + 1):
        s = _match_tail(prefix[-1], m, horizon, mu, beta)
        if s is None:
            break
        best = horizon, s
    if best is None:
        return prefix, m
    horizon, s = best
    tail = backward_sweep(s, m, horizon, mu, beta)
    return np.concatenate([prefix, tail[1:]]), horizon


def fixed_point_residual(A, mu, beta, closed=True):
    """ Largest defect of the rescaled steady equations, shell 0 included

    ``closed`` appends A_{M+1} = 0 after the last shell; otherwise only the
    equations whose three shells are all present are checked.
    """
    A = np.asarray(A, dtype='f8')
    if closed:
        A = np.concatenate([A, [0.0]])
    if len(A) < 2:
        return np.inf
    j = np.arange(1, len(A) - 1)
    first = abs(1.0 - A[0] * A[1] - mu * A[0])
    rest = np.abs(A[j - 1] ** 2 - A[j] * A[j + 1]
                  - mu * 2.0 ** (beta * j) * A[j])
    return float(max(first, rest.max() if len(rest) else 0.0))


def solve_fixed_point(params, tol_A0=1e-14, j_max=None, polish=False):
    """ Fixed point of the viscous model by shooting

    Parameters
    ----------
    params : ModelParams
        Only ``n_shells`` of it shapes the output ``alpha``.
    tol_A0 : float
        Relative width at which bisection on A_0 stops.
    j_max : int, optional
        Shooting horizon, defaults to ceil(J) + 60.
    polish : bool
        Refine ``alpha`` with ``newton_oracle`` on the truncated system.

    Returns
    -------
    SteadyState

    Examples
    --------
    >>> s = solve_fixed_point(ModelParams(c=2, nu=0.1, f0=1, n_shells=20))
    >>> s.residual < 1e-12
    True
    """
    messages = [] if in_proven_range(params.c) else [UNPROVEN_MESSAGE]
    warn_unproven(params.c)

    mu, beta = rescale_mu_beta(params)
    J = dissipation_index(mu, beta)
    gamma = gamma_constant(beta)

    if mu == 0:
        # the constant sequence continues past any horizon
        horizon = max(j_max or 0, params.n_shells + 1)
        A = np.ones(horizon + 1)
        return SteadyState(mu, beta, A, inviscid_fixed_point(params), gamma,
                           J, fixed_point_residual(A, mu, beta, closed=False),
                           params, (1.0, 1.0), horizon, horizon, messages)

    if j_max is None:
        j_max = int(np.ceil(J)) + 60
    j_max = max(j_max, 2)

    below, above = bisect_shots(mu, beta, j_max, tol_A0)
    prefix = matched_prefix(below, above)
    A, horizon = close_tail(prefix, mu, beta, j_max)
    A = np.where(A < UNDERFLOW, 0.0, A)

    if not (np.all(np.isfinite(A)) and A[0] > 0):
        raise ShootingError('shooting produced an invalid sequence', below)

    alpha = to_alpha(A, params.c, params.f0, params.n_shells)
    result = SteadyState(mu, beta, A, alpha, gamma, J,
                         fixed_point_residual(A, mu, beta), params,
                         (below.A0, above.A0), len(prefix) - 1, horizon,
                         messages)
    if polish:
        agree, _, newton = check_newton_agreement(result, params)
        if newton.converged:
            n = min(len(newton.alpha), len(result.alpha))
            alpha = result.alpha.copy()
            alpha[:n] = newton.alpha[:n]
            result = result._replace(alpha=alpha)
    return result


def check_monotonicity(A, strict=True):
    """ A decreasing on every shell above the underflow cutoff """
    A = np.asarray(A)
    A = A[A > 0]
    step = np.diff(A)
    return bool(np.all(step < 0) if strict else np.all(step <= 0))


def check_decay_bound(A, mu, beta, rtol=1e-12):
    """ A_{ceil(J)+k} / A_{ceil(J)+k-1}^2 <= 2^{-beta k} for all k >= 0 """
    if mu == 0:
        return True
    A = np.asarray(A, dtype='f8')
    j0 = int(np.ceil(dissipation_index(mu, beta)))
    for i in range(max(j0, 1), len(A)):
        if not (A[i] > 0 and A[i - 1] > 0):
            break
        ratio = (A[i] / A[i - 1]) / A[i - 1]
        if ratio > 2.0 ** (-beta * (i - j0)) * (1 + rtol):
            return False
    return True


def gj_profile(A):
    """ g_j = A_{j+1} / (A_j + (A_{j+1} A_{j+2})^{1/2}) where A_j > 0 """
    A = np.concatenate([np.asarray(A, dtype='f8'), [0.0, 0.0]])
    n = int(np.count_nonzero(A > 0))
    j = np.arange(n)
    return A[j + 1] / (A[j] + np.sqrt(A[j + 1] * A[j + 2]))


def check_gj_bound(A, mu, beta):
    """ (max_j g_j 2^{beta/2}, gamma); the bound holds when the first
    is below 1 - gamma """
    g = gj_profile(A)
    return float(g.max() * 2.0 ** (beta / 2)), gamma_constant(beta)


def check_dissipation_sums(A, mu, beta, floor=1e-250):
    """ Largest relative defect of the telescoped balances

        mu sum_{j>=k} 2^{beta j} A_j^2 = A_{k-1}^2 A_k     (k >= 1)
        mu sum_{j>=0} 2^{beta j} A_j^2 = A_0
    """
    A = np.asarray(A, dtype='f8')
    j = np.arange(len(A))
    tails = np.cumsum((mu * 2.0 ** (beta * j) * A ** 2)[::-1])[::-1]
    expected = np.concatenate([[A[0]], A[:-1] ** 2 * A[1:]])
    keep = expected > floor
    return float(np.max(np.abs(tails[keep] - expected[keep]) / expected[keep]))


def steady_residual(params, alpha):
    """ Unscaled steady equations F_j(alpha), j = 0..N, alpha_{N+1} = 0 """
    a = np.asarray(alpha, dtype='f8')
    j = params.shells
    F = params.forcing - params.linear_rates * a
    F[1:] += 2.0 ** (params.c * (j[1:] - 1)) * a[:-1] ** 2
    F[:-1] -= 2.0 ** (params.c * j[:-1]) * a[:-1] * a[1:]
    return F


def steady_row_scales(params, alpha):
    a = np.abs(np.asarray(alpha, dtype='f8'))
    j = params.shells
    scale = params.forcing + params.linear_rates * a
    scale[1:] += 2.0 ** (params.c * (j[1:] - 1)) * a[:-1] ** 2
    scale[:-1] += 2.0 ** (params.c * j[:-1]) * a[:-1] * a[1:]
    return scale


def scaled_steady_residual(params, alpha):
    """ Row-wise relative defect; negligible rows count as satisfied """
    F = steady_residual(params, alpha)
    scale = steady_row_scales(params, alpha)
    out = np.zeros_like(F)
    live = scale >= NEGLIGIBLE_ROW
    out[live] = F[live] / scale[live]
    out[~np.isfinite(F)] = np.inf
    return out


steady_jacobian_banded = jacobian_banded


def default_guess(params):
    """ The shooting solution, else alpha^0 damped past kappa_d = 2^J """
    try:
        return solve_fixed_point(params).alpha
    except NumericalFailure:
        mu, beta = rescale_mu_beta(params)
        kappa = 2.0 ** dissipation_index(mu, beta)
        return inviscid_fixed_point(params) * np.exp(-2.0 ** params.shells
                                                     / kappa)


def newton_oracle(params, initial_guess=None, tol=1e-12, max_iter=100):
    """ Damped Newton iteration on the truncated steady system

    Converged means every row's defect relative to the size of its terms
    is below ``tol``.  Failure (no convergence in ``max_iter`` steps or a
    non-finite iterate) is reported in the result, not raised.

    Returns
    -------
    NewtonResult
    """
    if initial_guess is None:
        with catch_warnings():
            simplefilter('ignore', UnprovenRangeWarning)
            initial_guess = default_guess(params)
    alpha = np.array(initial_guess, dtype='f8')[:params.n_shells + 1]
    if len(alpha) < params.n_shells + 1:
        alpha = np.concatenate([alpha, np.zeros(params.n_shells + 1
                                                - len(alpha))])

    r = scaled_steady_residual(params, alpha)
    iterations = pinv_steps = 0
    norm = np.max(np.abs(r))
    while not norm < tol:
        if iterations >= max_iter or not np.isfinite(norm):
            break
        F = steady_residual(params, alpha)
        ab = steady_jacobian_banded(params, alpha)
        try:
            delta = solve_banded((1, 1), ab, -F)
        except (LinAlgError, ValueError):
            warn(NewtonFallbackWarning('singular Jacobian at iteration %d, '
                                       'using pseudo-inverse' % iterations))
            pinv_steps += 1
            delta = np.linalg.pinv(banded_to_dense(ab)).dot(-F)
        iterations += 1
        if not np.all(np.isfinite(delta)):
            norm = np.inf
            break

        lam = 1.0
        while True:
            trial = alpha + lam * delta
            rt = scaled_steady_residual(params, trial)
            trial_norm = np.max(np.abs(rt))
            if trial_norm < norm or lam < 1e-4:
                break
            lam /= 2
        alpha, r, norm = trial, rt, trial_norm

    converged = bool(norm < tol)
    return NewtonResult(alpha=alpha,
                        residual=float(np.max(np.abs(
                            steady_residual(params, alpha)))),
                        scaled_residual=float(norm),
                        iterations=iterations,
                        converged=converged,
                        pinv_steps=pinv_steps)


def check_newton_agreement(steady, params, rtol=1e-8, floor=1e-30):
    """ Compare the shooting alpha with Newton on a truncation that drops
    only shells past 1e-150, where squares would leave double range

    Returns
    -------
    agree : bool
    max_rel_diff : float
    newton : NewtonResult
    """
    A = np.asarray(steady.A)
    alpha = to_alpha(A, params.c, params.f0, len(A) - 1)
    live = np.flatnonzero(alpha > 1e-150)
    n = max(int(live[-1]) if len(live) else 2, 2)
    truncated = params._replace(n_shells=n)
    newton = newton_oracle(truncated, alpha[:n + 1])
    shoot = alpha[:n + 1]
    big = np.abs(shoot) > floor
    diff = np.abs(newton.alpha[big] - shoot[big]) / np.abs(shoot[big])
    worst = float(diff.max()) if len(diff) else 0.0
    return newton.converged and worst <= rtol, worst, newton


def steady_report(steady, newton_check=False):
    """ Property checks of a SteadyState, as a plain dict """
    A, mu, beta = steady.A, steady.mu, steady.beta
    gj, gamma = check_gj_bound(A, mu, beta)
    checks = {'monotonic': check_monotonicity(A, strict=mu > 0),
              'decay_bound': check_decay_bound(A, mu, beta),
              'gj_bound': bool(gj < 1 - gamma) if mu > 0 else None,
              'gj_max': gj}
    if newton_check:
        agree, worst, newton = check_newton_agreement(steady, steady.params)
        checks['newton_agreement'] = bool(agree)
        checks['newton_max_rel_diff'] = worst
        checks['newton_iterations'] = newton.iterations
    return checks


__all__ += ['UNPROVEN_MESSAGE', 'in_proven_range', 'NewtonFallbackWarning',
            'dissipation_index', 'shot_side', 'fixed_point_residual',
            'check_dissipation_sums', 'check_newton_agreement',
            'steady_report']
