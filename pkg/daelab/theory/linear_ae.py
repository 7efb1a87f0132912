"""Linear autoencoders: closed-form optima, gradient training and the
encoder-norm failure condition.

Data matrices follow the column convention ``X`` of shape
``(n_features, n_samples)``; encoders ``W1`` are ``(d_z, d)`` and decoders
``W2`` are ``(d, d_z)``.
"""

import logging
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.linalg
from sklearn.utils import check_random_state

from ..autodiff import ComputationRecord, Tensor, backprop, ops
from ..util import ContractError, DimensionError, SingularMatrixError, \
    _check_int


__all__ = ['InconclusiveWarning', 'LinearAeSolution', 'EncoderNormCheck',
           'linear_ae_optimal_encoder', 'pca_reconstruction_error',
           'pca_solution', 'linear_ae_error', 'train_linear_ae',
           'constrained_linear_ae_error', 'encoder_norm_witness',
           'check_encoder_norm_failure']


logger = logging.getLogger(__name__)


class InconclusiveWarning(Warning):
    pass


warnings.simplefilter('always', InconclusiveWarning)


@dataclass
class LinearAeSolution:
    """Encoder, decoder and their squared Frobenius residual.

    Attributes
    ----------
    W1 : np.ndarray (d_z, d)
    W2 : np.ndarray (d, d_z)
    reconstruction_error : float
    """
    W1: np.ndarray
    W2: np.ndarray
    reconstruction_error: float


@dataclass
class EncoderNormCheck:
    """Outcome of :func:`check_encoder_norm_failure`.

    Attributes
    ----------
    achievable : bool
        whether the best constrained error reaches ``l1`` within ``rtol``
    best_error : float
    restart_errors : np.ndarray (n_restarts,)
    l1 : float
        unconstrained optimum
    status : {'achievable', 'suboptimal', 'inconclusive'}
    converged : np.ndarray of bool (n_restarts,)
    encoder_norm_bound : float
    decoder_norm_bound : float or None
    """
    achievable: bool
    best_error: float
    restart_errors: np.ndarray
    l1: float
    status: str
    converged: np.ndarray = field(default_factory=lambda: np.zeros(0, bool))
    encoder_norm_bound: float = np.inf
    decoder_norm_bound: float = None

    def to_dict(self):
        d = asdict(self)
        d['restart_errors'] = self.restart_errors.tolist()
        d['converged'] = self.converged.tolist()
        return d


def _as_data_matrix(X, d_z=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError('X must be a (n_features, n_samples) matrix, '
                             'got shape {}'.format(X.shape))
    if d_z is not None:
        d_z = _check_int(d_z, 'd_z', 1)
        if d_z > X.shape[0]:
            raise ContractError('d_z = {} exceeds the {} features'.format(
                d_z, X.shape[0]))
    return X


def linear_ae_optimal_encoder(W2, tol=1e-10):
    """Optimal encoder ``(W2^T W2)^{-1} W2^T`` for a fixed decoder.

    ``W2 @ W1`` is then the projector onto the column space of ``W2``.

    Parameters
    ----------
    W2 : np.ndarray (d, d_z)
        decoder with full column rank
    tol : float
        smallest admissible singular value of ``W2``

    Returns
    -------
    W1 : np.ndarray (d_z, d)

    Raises
    ------
    SingularMatrixError
        if the smallest singular value of ``W2`` is below ``tol``
    """
    W2 = np.asarray(W2, dtype=np.float64)
    if W2.ndim != 2:
        raise DimensionError('W2 must be a matrix, got shape {}'.format(
            W2.shape))
    s = scipy.linalg.svdvals(W2)
    if W2.shape[1] > W2.shape[0] or s.min() < tol:
        raise SingularMatrixError(
            'W2 of shape {} is rank deficient: smallest singular value '
            '{:.3g}'.format(W2.shape, s.min()))
    return scipy.linalg.solve(W2.T @ W2, W2.T, assume_a='pos')


def pca_reconstruction_error(X, d_z):
    """Minimal squared residual of any rank-``d_z`` linear reconstruction.

    Sum of the ``d - d_z`` smallest eigenvalues of ``X X^T``.

    Parameters
    ----------
    X : np.ndarray (d, n_samples)
    d_z : int
        ``1 <= d_z <= d``

    Returns
    -------
    l1 : float
    """
    X = _as_data_matrix(X, d_z)
    evals = scipy.linalg.eigvalsh(X @ X.T)
    return max(float(np.sum(evals[:X.shape[0] - d_z])), 0.)


def pca_solution(X, d_z):
    """PCA-realizing linear autoencoder: ``W2 = U``, ``W1 = U^T`` where
    ``U`` holds the leading ``d_z`` eigenvectors of ``X X^T``."""
    X = _as_data_matrix(X, d_z)
    _, evecs = scipy.linalg.eigh(X @ X.T)
    U = evecs[:, ::-1][:, :d_z]
    return LinearAeSolution(U.T.copy(), U.copy(),
                            linear_ae_error(X, U.T, U))


def linear_ae_error(X, W1, W2):
    """Squared Frobenius residual ``||X - W2 W1 X||_F^2``.

    Raises
    ------
    DimensionError
        if the shapes of ``X``, ``W1`` and ``W2`` do not compose
    """
    X = _as_data_matrix(X)
    W1 = np.asarray(W1, dtype=np.float64)
    W2 = np.asarray(W2, dtype=np.float64)
    if W1.ndim != 2 or W2.ndim != 2 or W1.shape[1] != X.shape[0] or \
            W2.shape != (X.shape[0], W1.shape[0]):
        raise DimensionError(
            'X has shape {}, W1 has shape {} and W2 has shape {}'.format(
                X.shape, W1.shape, W2.shape))
    R = X - W2 @ (W1 @ X)
    return float(np.sum(R * R))


def train_linear_ae(X, d_z, n_iter=4000, step=.25, random_state=0):
    """Gradient descent on ``||X - W2 W1 X||_F^2`` through
    :mod:`daelab.autodiff`.

    ``X`` is rescaled to unit spectral norm for the descent; the returned
    matrices and error refer to the original ``X``.

    Parameters
    ----------
    X : np.ndarray (d, n_samples)
    d_z : int
    n_iter : int
    step : float
    random_state : None, int or random-number-generator instance

    Returns
    -------
    solution : LinearAeSolution
    """
    X = _as_data_matrix(X, d_z)
    n_iter = _check_int(n_iter, 'n_iter', 1)
    d = X.shape[0]
    rng = check_random_state(random_state)
    scale = scipy.linalg.norm(X, 2)
    if scale == 0:
        raise ContractError('X is zero')
    Xt = (X / scale).T
    W1 = rng.uniform(-.1, .1, size=(d_z, d))
    W2 = rng.uniform(-.1, .1, size=(d, d_z))
    b1, b2 = np.zeros(d_z), np.zeros(d)
    for _ in range(n_iter):
        t1 = Tensor(W1, requires_grad=True)
        t2 = Tensor(W2, requires_grad=True)
        with ComputationRecord() as record:
            out = ops.forward_linear(t2, b2, ops.forward_linear(t1, b1, Xt))
            loss = ops.sum(ops.square(ops.sub(out, Xt)))
        grads = backprop(loss, record)
        W1 = W1 - step * grads[t1.id]
        W2 = W2 - step * grads[t2.id]
    return LinearAeSolution(W1, W2, linear_ae_error(X, W1, W2))


def constrained_linear_ae_error(eigenvalues, d_z, norm_product):
    """Optimal error when ``||W2 W1||_2`` is at most ``norm_product``.

    The optimum scales the PCA projector by ``min(1, norm_product)``:
    ``sum_{i <= d_z} (1 - s)^2 lambda_i + sum_{i > d_z} lambda_i``.

    Parameters
    ----------
    eigenvalues : array-like
        eigenvalues of ``X X^T``
    d_z : int
    norm_product : float
        product of encoder and decoder spectral-norm bounds

    Returns
    -------
    error : float
    """
    evals = np.sort(np.asarray(eigenvalues, dtype=np.float64))[::-1]
    d_z = _check_int(d_z, 'd_z', 1)
    if d_z > len(evals):
        raise ContractError('d_z = {} exceeds the {} eigenvalues'.format(
            d_z, len(evals)))
    s = min(1., float(norm_product))
    return float((1 - s)**2 * evals[:d_z].sum() + evals[d_z:].sum())


def encoder_norm_witness(X, d_z, decoder_norm_bound=1.):
    """PCA-realizing pair with all decoder singular values equal to
    ``decoder_norm_bound``: ``W2 = c U``, ``W1 = U^T / c``.

    The encoder norm of the witness is ``1 / c``, the inverse of the
    decoder's smallest singular value.
    """
    c = float(decoder_norm_bound)
    if c <= 0:
        raise ContractError('decoder_norm_bound must be positive')
    pca = pca_solution(X, d_z)
    W1, W2 = pca.W1 / c, pca.W2 * c
    return LinearAeSolution(W1, W2, linear_ae_error(X, W1, W2))


def _clip_spectral_norm(W, bound):
    if not np.isfinite(bound):
        return W
    U, s, Vt = scipy.linalg.svd(W, full_matrices=False)
    return (U * np.minimum(s, bound)) @ Vt


def _loss(C, W1, W2):
    M = W2 @ W1
    return float(np.trace(C) - 2 * np.trace(M @ C) + np.trace(M @ C @ M.T))


def _least_squares_decoder(C, W1):
    G = W1 @ C @ W1.T
    return scipy.linalg.lstsq(G, W1 @ C)[0].T


def _run_restart(C, W1, W2, b, c, n_iter, window, tol):
    normC = scipy.linalg.norm(C, 2)
    eye = np.eye(C.shape[0])
    history = []
    for it in range(n_iter):
        if c is None:
            W2 = _least_squares_decoder(C, W1)
        L = 2 * max(scipy.linalg.norm(W2, 2)**2, 1e-12) * normC
        grad1 = 2 * W2.T @ (W2 @ W1 - eye) @ C
        W1 = _clip_spectral_norm(W1 - grad1 / L, b)
        if c is None:
            W2 = _least_squares_decoder(C, W1)
        else:
            L = 2 * max(scipy.linalg.norm(W1 @ C @ W1.T, 2), 1e-12)
            grad2 = 2 * (W2 @ W1 - eye) @ C @ W1.T
            W2 = _clip_spectral_norm(W2 - grad2 / L, c)
        history.append(_loss(C, W1, W2))
        if it >= window and (it + 1) % window == 0:
            last, prev = history[-1], history[-1 - window]
            if abs(prev - last) <= tol * max(last, 1.):
                return last, True
    return history[-1], False


def check_encoder_norm_failure(X, d_z, encoder_norm_bound,
                               decoder_norm_bound=None, n_iter=10000,
                               n_restarts=10, rtol=1e-3, random_state=0,
                               verbose=False):
    """Whether a linear autoencoder with bounded encoder norm can reach the
    PCA error.

    Minimizes ``||X - W2 W1 X||_F^2`` over encoders with spectral norm at
    most ``encoder_norm_bound`` by projected gradient descent (spectral
    clipping). Without ``decoder_norm_bound`` the decoder is the
    least-squares response to every encoder iterate; otherwise it is
    updated by projected gradient descent as well. The failure regime is
    ``encoder_norm_bound * decoder_norm_bound < 1``.

    Parameters
    ----------
    X : np.ndarray (d, n_samples)
    d_z : int
    encoder_norm_bound : float > 0
    decoder_norm_bound : float > 0 or None
    n_iter : int
        iteration budget per restart
    n_restarts : int
    rtol : float
        relative tolerance for reaching the PCA error
    random_state : None, int or random-number-generator instance
    verbose : bool

    Returns
    -------
    result : EncoderNormCheck
        ``status`` is ``'suboptimal'`` if no restart reached the PCA error
        and every restart converged within ``n_iter`` iterations; if some
        restart did not converge it is ``'inconclusive'`` (with an
        :class:`InconclusiveWarning`)
    """
    X = _as_data_matrix(X, d_z)
    b = float(encoder_norm_bound)
    if not b > 0:
        raise ContractError('encoder_norm_bound must be positive, got '
                            '{}'.format(encoder_norm_bound))
    c = None if decoder_norm_bound is None else float(decoder_norm_bound)
    if c is not None and not c > 0:
        raise ContractError('decoder_norm_bound must be positive, got '
                            '{}'.format(decoder_norm_bound))
    n_iter = _check_int(n_iter, 'n_iter', 1)
    n_restarts = _check_int(n_restarts, 'n_restarts', 1)

    rng = check_random_state(random_state)
    d = X.shape[0]
    C = X @ X.T
    l1 = pca_reconstruction_error(X, d_z)

    errors, converged = [], []
    for restart in range(n_restarts):
        W1 = _clip_spectral_norm(rng.normal(size=(d_z, d)) / np.sqrt(d), b)
        W2 = rng.normal(size=(d, d_z)) / np.sqrt(d_z)
        if c is not None:
            W2 = _clip_spectral_norm(W2, c)
        err, conv = _run_restart(C, W1, W2, b, c, n_iter, 100, 1e-8)
        errors.append(err)
        converged.append(conv)
        if verbose:
            logger.info('restart %d: error %.6g (L1 = %.6g), converged %s',
                        restart, err, l1, conv)

    errors, converged = np.array(errors), np.array(converged)
    best = int(np.argmin(errors))
    atol = 1e-10 * np.trace(C)
    achievable = bool(errors[best] <= l1 * (1 + rtol) + atol)
    if achievable:
        status = 'achievable'
    elif converged.all():
        status = 'suboptimal'
    else:
        status = 'inconclusive'
        warnings.warn('{} of {} restarts did not converge within {} '
                      'iterations; result is inconclusive'.format(
                          int((~converged).sum()), n_restarts, n_iter),
                      InconclusiveWarning)

    return EncoderNormCheck(
        achievable=achievable, best_error=float(errors[best]),
        restart_errors=errors, l1=l1, status=status, converged=converged,
        encoder_norm_bound=b, decoder_norm_bound=c,
    )
