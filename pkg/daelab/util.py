"""Utility functions and exception types used throughout the rest of the
package."""

import hashlib
import numbers
import os
import tempfile

import numpy as np
from tqdm.autonotebook import tqdm


__all__ = [
    'ContractError', 'DimensionError', 'SingularMatrixError', 'DomainError',
    'DiagnosticError', 'ConfigError', 'NumericError', 'GraphError',
    '_check_float', '_check_int', 'check_positive_definite', 'check_finite',
    'array_checksum', 'atomic_write_text', '_prep_progressbar',
]


class ContractError(ValueError):
    """A precondition of an operation is violated."""
    pass


class DimensionError(ContractError):
    pass


class SingularMatrixError(ContractError):
    pass


class DomainError(ValueError):
    pass


class DiagnosticError(ValueError):
    pass


class ConfigError(ValueError):
    """Invalid experiment configuration.

    Parameters
    ----------
    message : str
        human-readable description
    field : str or tuple of str or None
        dotted path(s) of the offending configuration field(s)
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        if isinstance(field, str):
            field = (field,)
        self.field = tuple(field) if field is not None else tuple()


class NumericError(ArithmeticError):
    """A non-finite value was produced.

    Parameters
    ----------
    message : str
        human-readable description
    op : str or None
        name of the primitive or loss term that produced the value
    location : dict or None
        where in a training run the error occurred (``stage``, ``epoch``,
        ``batch``)
    """

    def __init__(self, message, op=None, location=None):
        super().__init__(message)
        self.op = op
        self.location = dict(location) if location is not None else dict()


class GraphError(RuntimeError):
    pass


def _check_float(v, label, lo, up, boundaries):
    if boundaries == 'inclusive':
        if not lo <= v <= up:
            raise ContractError(
                "{:.2f} <= {} <= {:.2f} not satisfied".format(lo, label, up)
            )
    elif boundaries == 'left-closed':
        if not lo <= v < up:
            raise ContractError(
                "{:.2f} <= {} < {:.2f} not satisfied".format(lo, label, up)
            )
    elif boundaries == 'exclusive':
        if not lo < v < up:
            raise ContractError(
                "{:.2f} < {} < {:.2f} not satisfied".format(lo, label, up)
            )
    else:
        raise NotImplementedError(
            'boundaries = {} not yet implemented'.format(boundaries)
        )


def _check_int(v, label, lo=0):
    if isinstance(v, (bool, np.bool_)) or \
            not isinstance(v, numbers.Integral) or v < lo:
        raise ContractError(
            '{} must be an integer >= {}, got {!r}'.format(label, lo, v)
        )
    return int(v)


def check_positive_definite(Sigma, noise_level=1., noise_factor=1e-12):
    """Check if a matrix is symmetric positive definite.

    Parameters
    ----------
    Sigma : ndarray (n, n)
        matrix to check
    noise_level : float
        scale against which the smallest eigenvalue is compared
    noise_factor : float
        the smallest eigenvalue must exceed ``noise_factor * noise_level``

    Raises
    ------
    ContractError
        if Sigma is not square, not symmetric or not positive definite
    """
    Sigma = np.asarray(Sigma, dtype=float)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1]:
        raise ContractError(
            'Sigma must be a square matrix, got shape {}'.format(Sigma.shape))
    if not np.allclose(Sigma, Sigma.T, rtol=0, atol=1e-12 * noise_level):
        raise ContractError('Sigma is not symmetric')
    evals_Sigma = np.linalg.eigvalsh(Sigma)
    min_eval = evals_Sigma.min()
    if min_eval <= noise_factor * noise_level:
        raise ContractError('Sigma is not positive definite: '
                            'min eval = {:.3g}'.format(min_eval))


def check_finite(values, op):
    """Raise :class:`NumericError` if ``values`` contains NaN or Inf.

    Parameters
    ----------
    values : np.ndarray
        values to check
    op : str
        name reported in the error

    Returns
    -------
    values : np.ndarray
        unchanged input
    """
    if not np.all(np.isfinite(values)):
        raise NumericError('non-finite value in {}'.format(op), op=op)
    return values


def array_checksum(*arrays):
    """sha256 hex digest of the float64 bytes of ``arrays``, in order.

    Parameters
    ----------
    arrays : np.ndarray
        arrays to hash; shapes are hashed along with values

    Returns
    -------
    digest : str
    """
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a, dtype=np.float64)
        h.update(repr(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


def atomic_write_text(path, text):
    """Write ``text`` to a temporary file next to ``path`` and rename it into
    place.

    Returns
    -------
    path : str
    """
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def _prep_progressbar(show_progress):
    if show_progress:
        _tqdm = tqdm
    else:
        def _tqdm(x, *args, **kwargs):
            return x
    return _tqdm
