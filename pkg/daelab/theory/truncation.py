"""Best Lipschitz-constrained generator for a 1-D Gaussian target.

A generator with Lipschitz constant ``c`` pushes a uniform latent onto a
truncated version of ``N(0, sigma^2)``: the density equals the target where
the target density is at least ``1/c`` and is flat at ``1/c`` on the tails
up to the support edge.
"""

from dataclasses import dataclass, asdict

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.stats import norm
from sklearn.utils import check_random_state

from ..util import ContractError, DomainError, _check_int


__all__ = ['TruncationResult', 'lipschitz_truncation', 'monte_carlo_tv']


@dataclass
class TruncationResult:
    """Truncation threshold and total variation of the pushforward.

    Attributes
    ----------
    sigma, c : float
    z_c : float
        threshold with ``p_x(z_c) = 1/c``
    tv : float
        total variation by quadrature
    tv_closed_form : float
        ``2 Phi(-edge / sigma)``
    z_c_simplified : float
        ``sqrt(2 sigma^2 log(c / (2 pi)))``, NaN if ``c < 2 pi``; reported
        alongside ``z_c`` for comparison only
    edge : float
        support edge ``z_c + c P_x(-z_c)``
    """
    sigma: float
    c: float
    z_c: float
    tv: float
    tv_closed_form: float
    z_c_simplified: float
    edge: float

    def to_dict(self):
        return asdict(self)


def _check_params(sigma, c):
    if not sigma > 0:
        raise ContractError('sigma must be > 0, got {}'.format(sigma))
    if not c > 0:
        raise ContractError('c must be > 0, got {}'.format(c))
    peak = 1 / np.sqrt(2 * np.pi * sigma**2)
    if 1 / c > peak * (1 + 1e-12):
        raise DomainError(
            'no truncation regime: 1/c = {:.6g} exceeds the peak density '
            '{:.6g}'.format(1 / c, peak))
    return peak


def _threshold(sigma, c, peak):
    if np.isclose(1 / c, peak, rtol=1e-12, atol=0):
        return 0.
    return brentq(lambda z: norm.pdf(z, scale=sigma) - 1 / c, 0, 20 * sigma,
                  xtol=1e-14, rtol=4 * np.finfo(float).eps)


def lipschitz_truncation(sigma, c):
    """Threshold and total variation of the best ``c``-Lipschitz
    pushforward of a uniform latent onto ``N(0, sigma^2)``.

    Parameters
    ----------
    sigma : float > 0
    c : float > 0
        Lipschitz constant; ``1/c`` must not exceed the peak density

    Returns
    -------
    result : TruncationResult

    Raises
    ------
    DomainError
        if ``1/c`` exceeds the peak density (no truncation regime)
    """
    sigma, c = float(sigma), float(c)
    peak = _check_params(sigma, c)
    z_c = _threshold(sigma, c, peak)
    edge = z_c + c * norm.cdf(-z_c, scale=sigma)

    def positive_part(x):
        p = norm.pdf(x, scale=sigma)
        q = p if x <= z_c else 1 / c
        return max(p - q, 0.)

    inner, _ = quad(positive_part, 0, edge, points=[z_c] if z_c > 0 else None,
                    epsabs=1e-13, limit=200)
    tv = 2 * (inner + norm.sf(edge, scale=sigma))

    simplified = np.sqrt(2 * sigma**2 * np.log(c / (2 * np.pi))) \
        if c >= 2 * np.pi else np.nan

    return TruncationResult(
        sigma=sigma, c=c, z_c=z_c, tv=float(tv),
        tv_closed_form=float(2 * norm.sf(edge, scale=sigma)),
        z_c_simplified=float(simplified), edge=float(edge),
    )


def _pushforward_samples(u, sigma, c, z_c):
    # inverse CDF in the bulk, slope-c lines in both tails
    u_lo = norm.cdf(-z_c, scale=sigma)
    x = np.empty_like(u)
    lower, upper = u < u_lo, u > 1 - u_lo
    bulk = ~(lower | upper)
    x[bulk] = norm.ppf(u[bulk], scale=sigma)
    x[lower] = -z_c - c * (u_lo - u[lower])
    x[upper] = z_c + c * (u[upper] - (1 - u_lo))
    return x


def monte_carlo_tv(sigma, c, n_samples=10**7, random_state=0,
                   chunk_size=10**6):
    """Monte-Carlo total variation between the ``c``-Lipschitz pushforward
    and ``N(0, sigma^2)``.

    Samples ``x = g(u)`` with ``u ~ U(0, 1)`` and ``g`` the inverse CDF of
    the target clipped to slope ``c``; estimates
    ``E[(1 - p_x(x) / q(x))_+]`` where ``q`` is the pushforward density.

    Parameters
    ----------
    sigma : float > 0
    c : float > 0
    n_samples : int
    random_state : None, int or random-number-generator instance
    chunk_size : int
        number of samples drawn at once

    Returns
    -------
    tv : float
    """
    sigma, c = float(sigma), float(c)
    n_samples = _check_int(n_samples, 'n_samples', 1)
    chunk_size = _check_int(chunk_size, 'chunk_size', 1)
    peak = _check_params(sigma, c)
    z_c = _threshold(sigma, c, peak)
    rng = check_random_state(random_state)

    total, drawn = 0., 0
    while drawn < n_samples:
        m = min(chunk_size, n_samples - drawn)
        x = _pushforward_samples(rng.uniform(size=m), sigma, c, z_c)
        p = norm.pdf(x, scale=sigma)
        q = np.where(np.abs(x) <= z_c, p, 1 / c)
        total += np.sum(np.maximum(1 - p / q, 0))
        drawn += m
    return float(total / n_samples)
