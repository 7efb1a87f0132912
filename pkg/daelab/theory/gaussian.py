"""Wasserstein distance between a 1-D Gaussian and the best 1-D projection
of a multivariate Gaussian."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ..util import ContractError, check_positive_definite, _check_int


__all__ = ['GaussianSpec', 'gaussian_w2_1d', 'gaussian_projection_w2',
           'numeric_projection_w2']


@dataclass(frozen=True)
class GaussianSpec:
    """Scalar latent ``N(0, sigma^2)`` and a covariance spectrum.

    Attributes
    ----------
    sigma : float >= 0
    eigenvalues : tuple of float
        positive and sorted descending
    """
    sigma: float
    eigenvalues: tuple

    def __post_init__(self):
        object.__setattr__(self, 'eigenvalues',
                           tuple(float(v) for v in self.eigenvalues))
        if not self.sigma >= 0:
            raise ContractError('sigma must be >= 0, got {}'.format(
                self.sigma))
        evals = np.array(self.eigenvalues)
        if len(evals) == 0 or np.any(evals <= 0):
            raise ContractError('eigenvalues must be positive, got '
                                '{}'.format(self.eigenvalues))
        if np.any(np.diff(evals) > 0):
            raise ContractError('eigenvalues must be sorted descending, got '
                                '{}'.format(self.eigenvalues))


def gaussian_w2_1d(s1, s2):
    """2-Wasserstein distance between ``N(0, s1^2)`` and ``N(0, s2^2)``."""
    return abs(float(s1) - float(s2))


def gaussian_projection_w2(spec):
    """Closed-form minimum over orthogonal 1-D projections of the
    2-Wasserstein distance between ``N(0, sigma^2)`` and ``N(0, Sigma)``.

    The distance is zero on the closed interval
    ``sqrt(lambda_d) <= sigma <= sqrt(lambda_1)``.

    Parameters
    ----------
    spec : GaussianSpec

    Returns
    -------
    distance : float
    """
    lo = np.sqrt(spec.eigenvalues[-1])
    hi = np.sqrt(spec.eigenvalues[0])
    if spec.sigma < lo:
        return float(lo - spec.sigma)
    elif spec.sigma > hi:
        return float(spec.sigma - hi)
    else:
        return 0.


def _projected_distance(sigma, Sigma, theta):
    c, s = np.cos(theta), np.sin(theta)
    var = Sigma[0, 0] * c**2 + 2 * Sigma[0, 1] * c * s + Sigma[1, 1] * s**2
    return np.abs(sigma - np.sqrt(np.maximum(var, 0)))


def numeric_projection_w2(sigma, Sigma, resolution=10**4, refine=True):
    """Grid search for the 1-D projection of ``N(0, Sigma)`` closest to
    ``N(0, sigma^2)``.

    Parameters
    ----------
    sigma : float >= 0
    Sigma : np.ndarray (2, 2)
        symmetric positive-definite covariance
    resolution : int >= 3
        number of angles ``theta`` in ``[0, pi)``; unit vectors are
        ``(cos theta, sin theta)``
    refine : bool
        if ``True`` the best grid angle is polished by a bounded scalar
        minimization within one grid step

    Returns
    -------
    distance : float
    """
    resolution = _check_int(resolution, 'resolution', 0)
    if resolution < 3:
        raise ContractError('resolution must be >= 3, got {}'.format(
            resolution))
    Sigma = np.asarray(Sigma, dtype=np.float64)
    if Sigma.shape != (2, 2):
        raise ContractError('Sigma must be 2x2, got shape {}'.format(
            Sigma.shape))
    check_positive_definite(Sigma)

    thetas = np.linspace(0, np.pi, resolution, endpoint=False)
    values = _projected_distance(sigma, Sigma, thetas)
    best = int(np.argmin(values))
    distance = float(values[best])
    if refine:
        step = np.pi / resolution
        res = minimize_scalar(
            lambda t: float(_projected_distance(sigma, Sigma, t)),
            bounds=(thetas[best] - step, thetas[best] + step),
            method='bounded', options=dict(xatol=1e-12))
        distance = min(distance, float(res.fun))
    return distance
