"""Regression suite for :mod:`daelab.theory` with fixed seeds.

Every check returns a record with its status, the residual of the
comparison it makes, the tolerance and the echoed inputs.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import norm
from sklearn.utils import check_random_state

from ..theory import gaussian, linear_ae, truncation
from ..util import ContractError, DomainError, SingularMatrixError


__all__ = ['ORACLE_CHECKS', 'OracleReport', 'run_oracle_suite']


logger = logging.getLogger(__name__)


def _record(passed, residual=None, tolerance=None, **inputs):
    return dict(passed=bool(passed),
                residual=None if residual is None else float(residual),
                tolerance=tolerance, inputs=inputs)


def _rel(a, b, floor=1e-300):
    return abs(a - b) / max(abs(b), floor)


# -- linear autoencoders -----------------------------------------------------

def _optimal_encoder_orthonormal(rng, params):
    W2, _ = scipy.linalg.qr(rng.normal(size=(5, 2)), mode='economic')
    W1 = linear_ae.linear_ae_optimal_encoder(W2)
    res = np.abs(W1 - W2.T).max()
    return _record(res < 1e-10, res, 1e-10, d=5, d_z=2)


def _optimal_encoder_scalar(rng, params):
    W1 = linear_ae.linear_ae_optimal_encoder(np.array([[2.], [0.]]))
    res = np.abs(W1 - np.array([[.5, 0.]])).max()
    return _record(res < 1e-12, res, 1e-12, W2=[[2.], [0.]])


def _projector_identity(rng, params):
    W2 = rng.normal(size=(6, 3))
    W1 = linear_ae.linear_ae_optimal_encoder(W2)
    res = np.linalg.norm(W2 @ W1 @ W2 - W2)
    return _record(res < 1e-10, res, 1e-10, d=6, d_z=3)


def _optimal_encoder_singular(rng, params):
    W2 = np.outer(rng.normal(size=4), [1., 2.])
    try:
        linear_ae.linear_ae_optimal_encoder(W2)
    except SingularMatrixError:
        return _record(True, d=4, d_z=2, rank=1)
    return _record(False, d=4, d_z=2, rank=1)


def _pca_low_rank(rng, params):
    X = rng.normal(size=(6, 2)) @ rng.normal(size=(2, 50))
    l1 = linear_ae.pca_reconstruction_error(X, 2)
    res = l1 / np.sum(X * X)
    return _record(res < 1e-8, res, 1e-8, d=6, rank=2, d_z=2)


def _pca_eckart_young(rng, params):
    l1 = linear_ae.pca_reconstruction_error(np.diag([3., 2., 1.]), 2)
    res = abs(l1 - 1)
    return _record(res < 1e-10, res, 1e-10, eigenvalues=[9., 4., 1.], d_z=2)


def _error_square_invertible(rng, params):
    X = rng.normal(size=(4, 30))
    W1 = rng.normal(size=(4, 4)) + 4 * np.eye(4)
    W2 = scipy.linalg.inv(W1)
    res = linear_ae.linear_ae_error(X, W1, W2) / np.sum(X * X)
    return _record(res < 1e-20, res, 1e-20, d=4, d_z=4)


def _error_pca_realization(rng, params):
    X = rng.normal(size=(5, 40))
    l1 = linear_ae.pca_reconstruction_error(X, 2)
    U = linear_ae.pca_solution(X, 2).W2
    W1 = linear_ae.linear_ae_optimal_encoder(U)
    res = _rel(linear_ae.linear_ae_error(X, W1, U), l1)
    return _record(res < 1e-8, res, 1e-8, d=5, d_z=2)


def _error_lower_bound(rng, params):
    worst = np.inf
    for _ in range(100):
        d = rng.randint(2, 8)
        d_z = rng.randint(1, d)
        X = rng.normal(size=(d, rng.randint(d, 40)))
        l1 = linear_ae.pca_reconstruction_error(X, d_z)
        l2 = linear_ae.linear_ae_error(X, rng.normal(size=(d_z, d)),
                                       rng.normal(size=(d, d_z)))
        worst = min(worst, (l2 - l1) / np.sum(X * X))
    return _record(worst >= -1e-12, -worst, 1e-12, trials=100)


def _pca_vs_training(rng, params):
    n = params['n_pca_instances']
    worst = 0.
    for _ in range(n):
        d = rng.randint(2, 11)
        d_z = rng.randint(1, d)
        X = rng.normal(size=(d, rng.randint(50, 201)))
        l1 = linear_ae.pca_reconstruction_error(X, d_z)
        trained = linear_ae.train_linear_ae(X, d_z, random_state=rng)
        worst = max(worst, _rel(trained.reconstruction_error, l1))
    return _record(worst < 1e-2, worst, 1e-2, instances=n)


def _norm_instance():
    return np.diag([3., 2., 1.]), 2, 2.


def _encoder_norm_unconstrained(rng, params):
    X, d_z, _ = _norm_instance()
    check = linear_ae.check_encoder_norm_failure(X, d_z, 1e6,
                                                 random_state=rng)
    res = _rel(check.best_error, check.l1)
    return _record(check.achievable, res, 1e-3, encoder_norm_bound=1e6,
                   eigenvalues=[9., 4., 1.], d_z=d_z)


def _encoder_norm_failure(rng, params):
    X, d_z, c = _norm_instance()
    b = .45
    check = linear_ae.check_encoder_norm_failure(X, d_z, b, c,
                                                 random_state=rng)
    margin = np.min(check.restart_errors) / check.l1 - 1
    expected = linear_ae.constrained_linear_ae_error([9., 4., 1.], d_z, b * c)
    res = _rel(check.best_error, expected)
    passed = (not check.achievable) and margin > 1e-3 and res < 1e-3
    return _record(passed, res, 1e-3, margin=float(margin),
                   encoder_norm_bound=b, decoder_norm_bound=c,
                   eigenvalues=[9., 4., 1.], d_z=d_z)


def _encoder_norm_witness(rng, params):
    X, d_z, c = _norm_instance()
    witness = linear_ae.encoder_norm_witness(X, d_z, c)
    b = scipy.linalg.norm(witness.W1, 2)
    check = linear_ae.check_encoder_norm_failure(X, d_z, b, c,
                                                 random_state=rng)
    res = max(_rel(witness.reconstruction_error, check.l1),
              _rel(check.best_error, check.l1))
    passed = check.achievable and abs(b - 1 / c) < 1e-12 and res < 1e-3
    return _record(passed, res, 1e-3, encoder_norm_bound=float(b),
                   decoder_norm_bound=c, eigenvalues=[9., 4., 1.], d_z=d_z)


def _encoder_norm_monotone(rng, params):
    X, d_z, c = _norm_instance()
    bounds = [.1, .2, .3, .4, .5]
    errors = [linear_ae.check_encoder_norm_failure(
        X, d_z, b, c, n_restarts=3, random_state=rng).best_error
        for b in bounds]
    res = max(0., np.max(np.diff(errors)))
    return _record(res <= 1e-6, res, 1e-6, encoder_norm_bounds=bounds,
                   decoder_norm_bound=c, best_errors=errors)


# -- Gaussian projections -----------------------------------------------------

def _projection_w2(sigma, eigenvalues, expected):
    value = gaussian.gaussian_projection_w2(
        gaussian.GaussianSpec(sigma, eigenvalues))
    res = abs(value - expected)
    return _record(res < 1e-12, res, 1e-12, sigma=sigma,
                   eigenvalues=list(eigenvalues), expected=expected)


def _projection_w2_first_branch(rng, params):
    return _projection_w2(.5, (4., 1.), .5)


def _projection_w2_middle_branch(rng, params):
    return _projection_w2(1.5, (4., 1.), 0.)


def _projection_w2_third_branch(rng, params):
    return _projection_w2(3., (4., 1.), 1.)


def _projection_w2_continuity(rng, params):
    evals = (9., 1.)
    jumps = []
    for boundary in (1., 3.):
        lo, hi = [gaussian.gaussian_projection_w2(
                      gaussian.GaussianSpec(s, evals))
                  for s in (boundary - 1e-12, boundary + 1e-12)]
        jumps.append(abs(hi - lo))
    inside = [gaussian.gaussian_projection_w2(
                  gaussian.GaussianSpec(s, evals))
              for s in np.linspace(1, 3, 201)]
    res = max(jumps)
    passed = res < 1e-9 and np.all(np.array(inside) == 0)
    return _record(passed, res, 1e-9, eigenvalues=list(evals))


def _numeric_identity(rng, params):
    sigmas = [.3, 1., 2.5]
    res = max(abs(gaussian.numeric_projection_w2(s, np.eye(2)) - abs(s - 1))
              for s in sigmas)
    return _record(res < 1e-9, res, 1e-9, sigmas=sigmas, Sigma='identity')


def _numeric_diag_middle(rng, params):
    res = gaussian.numeric_projection_w2(1.5, np.diag([4., 1.]), 10**4)
    return _record(res < 1e-6, res, 1e-6, sigma=1.5, Sigma=[[4, 0], [0, 1]])


def _numeric_diag_low(rng, params):
    value = gaussian.numeric_projection_w2(.25, np.diag([4., 1.]), 10**4)
    res = abs(value - .75)
    return _record(res < 1e-6, res, 1e-6, sigma=.25, Sigma=[[4, 0], [0, 1]])


def _rotated_covariance(rng, evals):
    theta = rng.uniform(0, np.pi)
    R = np.array([[np.cos(theta), -np.sin(theta)],
                  [np.sin(theta), np.cos(theta)]])
    return R @ np.diag(evals) @ R.T


def _numeric_grid_agreement(rng, params):
    worst = 0.
    lambda1s = np.linspace(1.5, 8.5, 20)
    for lam1 in lambda1s:
        evals = (lam1, rng.uniform(.1, .9) * lam1)
        Sigma = _rotated_covariance(rng, evals)
        sigmas = np.concatenate([np.linspace(.05, 3.2, 18),
                                 np.sqrt(evals[::-1])])
        for s in sigmas:
            closed = gaussian.gaussian_projection_w2(
                gaussian.GaussianSpec(s, evals))
            numeric = gaussian.numeric_projection_w2(s, Sigma, 10**4)
            worst = max(worst, abs(closed - numeric))
    return _record(worst < 1e-4, worst, 1e-4, n_spectra=len(lambda1s),
                   n_sigmas=20, resolution=10**4)


def _numeric_grid_convergence(rng, params):
    evals = (5., 2.)
    Sigma = _rotated_covariance(rng, evals)
    slope = (evals[0] - evals[1]) / (2 * np.sqrt(evals[1]))
    worst, gaps = 0., []
    for s in (.5, 1.8, 3.):
        closed = gaussian.gaussian_projection_w2(
            gaussian.GaussianSpec(s, evals))
        for res in (100, 200, 400):
            gap = gaussian.numeric_projection_w2(
                s, Sigma, res, refine=False) - closed
            bound = slope * np.pi / res
            worst = max(worst, -gap, gap - bound)
            gaps.append(gap)
    return _record(worst <= 1e-12, max(worst, 0.), 1e-12,
                   eigenvalues=list(evals), resolutions=[100, 200, 400],
                   max_gap=float(np.max(gaps)))


# -- truncation ---------------------------------------------------------------

def _truncation_peak(rng, params):
    result = truncation.lipschitz_truncation(1., np.sqrt(2 * np.pi))
    return _record(result.z_c == 0, result.z_c, 0., sigma=1.,
                   c=float(np.sqrt(2 * np.pi)))


def _truncation_limit(rng, params):
    result = truncation.lipschitz_truncation(1., 1e6)
    return _record(result.tv < 1e-6, result.tv, 1e-6, sigma=1., c=1e6)


def _truncation_threshold(rng, params):
    cs = [3., 5., 10.]
    res = max(abs(norm.pdf(truncation.lipschitz_truncation(1., c).z_c) - 1 / c)
              for c in cs)
    return _record(res < 1e-10, res, 1e-10, sigma=1., cs=cs)


def _truncation_closed_form(rng, params):
    cs = [3., 5., 10., 100.]
    results = [truncation.lipschitz_truncation(1., c) for c in cs]
    res = max(abs(r.tv - r.tv_closed_form) for r in results)
    return _record(res < 1e-8, res, 1e-8, sigma=1., cs=cs)


def _truncation_monte_carlo(rng, params):
    cs = [3., 5., 10.]
    n = params['n_mc_samples']
    res = max(abs(truncation.lipschitz_truncation(1., c).tv -
                  truncation.monte_carlo_tv(1., c, n, random_state=rng))
              for c in cs)
    return _record(res < 2e-3, res, 2e-3, sigma=1., cs=cs, n_samples=n)


def _truncation_monotone(rng, params):
    cs = np.logspace(np.log10(3), 6, 30)
    tvs = np.array([truncation.lipschitz_truncation(1., c).tv for c in cs])
    res = max(0., np.max(np.diff(tvs)))
    return _record(res <= 1e-12, res, 1e-12, sigma=1., c_min=3., c_max=1e6,
                   n_c=len(cs))


def _truncation_domain(rng, params):
    try:
        truncation.lipschitz_truncation(1., 1.)
    except DomainError:
        return _record(True, sigma=1., c=1.)
    return _record(False, sigma=1., c=1.)


ORACLE_CHECKS = OrderedDict([
    ('optimal_encoder_orthonormal', _optimal_encoder_orthonormal),
    ('optimal_encoder_scalar', _optimal_encoder_scalar),
    ('projector_identity', _projector_identity),
    ('optimal_encoder_singular', _optimal_encoder_singular),
    ('pca_low_rank', _pca_low_rank),
    ('pca_eckart_young', _pca_eckart_young),
    ('error_square_invertible', _error_square_invertible),
    ('error_pca_realization', _error_pca_realization),
    ('error_lower_bound', _error_lower_bound),
    ('pca_vs_training', _pca_vs_training),
    ('encoder_norm_unconstrained', _encoder_norm_unconstrained),
    ('encoder_norm_failure', _encoder_norm_failure),
    ('encoder_norm_witness', _encoder_norm_witness),
    ('encoder_norm_monotone', _encoder_norm_monotone),
    ('projection_w2_first_branch', _projection_w2_first_branch),
    ('projection_w2_middle_branch', _projection_w2_middle_branch),
    ('projection_w2_third_branch', _projection_w2_third_branch),
    ('projection_w2_continuity', _projection_w2_continuity),
    ('numeric_identity', _numeric_identity),
    ('numeric_diag_middle', _numeric_diag_middle),
    ('numeric_diag_low', _numeric_diag_low),
    ('numeric_grid_agreement', _numeric_grid_agreement),
    ('numeric_grid_convergence', _numeric_grid_convergence),
    ('truncation_peak', _truncation_peak),
    ('truncation_limit', _truncation_limit),
    ('truncation_threshold', _truncation_threshold),
    ('truncation_closed_form', _truncation_closed_form),
    ('truncation_monte_carlo', _truncation_monte_carlo),
    ('truncation_monotone', _truncation_monotone),
    ('truncation_domain', _truncation_domain),
])


@dataclass
class OracleReport:
    """Per-check records of an oracle run.

    Attributes
    ----------
    checks : OrderedDict
        check name -> record with ``passed``, ``residual``, ``tolerance``
        and ``inputs``
    """
    checks: OrderedDict

    @property
    def passed(self):
        return all(c['passed'] for c in self.checks.values())

    @property
    def failed(self):
        return [name for name, c in self.checks.items() if not c['passed']]

    def to_dict(self):
        return dict(passed=self.passed, failed=self.failed,
                    checks=self.checks)


def run_oracle_suite(random_state=0, n_mc_samples=10**7,
                     n_pca_instances=50, checks=None, verbose=False):
    """Run the theory regression checks.

    Every check draws from its own random stream seeded from
    ``random_state`` and the check's position, so checks are reproducible
    individually.

    Parameters
    ----------
    random_state : int
    n_mc_samples : int
        Monte-Carlo sample size for the truncation check
    n_pca_instances : int
        number of random instances for gradient-trained linear autoencoders
    checks : list of str or None
        subset of :data:`ORACLE_CHECKS` to run; all if ``None``
    verbose : bool

    Returns
    -------
    report : OracleReport
    """
    params = dict(n_mc_samples=n_mc_samples,
                  n_pca_instances=n_pca_instances)
    names = list(ORACLE_CHECKS) if checks is None else list(checks)
    unknown = sorted(set(names) - set(ORACLE_CHECKS))
    if unknown:
        raise ContractError('unknown oracle check(s): {}'.format(unknown))
    records = OrderedDict()
    for i, name in enumerate(ORACLE_CHECKS):
        if name not in names:
            continue
        rng = check_random_state(random_state + i)
        try:
            record = ORACLE_CHECKS[name](rng, params)
        except Exception as e:
            logger.error('oracle check %s raised %s: %s', name,
                         type(e).__name__, e)
            record = _record(False, error='{}: {}'.format(
                type(e).__name__, e))
        records[name] = record
        if verbose or not record['passed']:
            logger.log(logging.INFO if record['passed'] else logging.WARNING,
                       'oracle %s: %s (residual %s, tolerance %s)', name,
                       'pass' if record['passed'] else 'FAIL',
                       record['residual'], record['tolerance'])
    return OracleReport(records)
