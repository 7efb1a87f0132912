"""Vector-quantized bottleneck with a learnable codebook."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.utils import check_random_state

from ..autodiff import ops
from ..autodiff.ops import as_tensor
from ..util import ContractError, DimensionError, _check_int


__all__ = ['Codebook', 'init_codebook', 'nearest_code_indices',
           'lookup_codes', 'vq_quantize', 'vq_loss']


@dataclass
class Codebook:
    """Learnable code vectors.

    Attributes
    ----------
    entries : np.ndarray (K, latent_dim)
    """
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.ndim != 2:
            raise DimensionError('entries must be a (K, latent_dim) matrix')
        if not np.all(np.isfinite(self.entries)):
            raise ContractError('codebook entries must be finite')

    @property
    def n_codes(self):
        return self.entries.shape[0]

    @property
    def latent_dim(self):
        return self.entries.shape[1]


def init_codebook(n_codes=64, latent_dim=2, random_state=None):
    """Codebook with entries drawn uniformly from ``[-1, 1]``."""
    n_codes = _check_int(n_codes, 'n_codes', 1)
    latent_dim = _check_int(latent_dim, 'latent_dim', 1)
    rng = check_random_state(random_state)
    return Codebook(rng.uniform(-1, 1, size=(n_codes, latent_dim)))


def _entries(codebook):
    if isinstance(codebook, Codebook):
        return codebook.entries
    return as_tensor(codebook).data


def nearest_code_indices(codebook, z):
    """Index of the nearest entry (Euclidean) for every row of ``z``; ties go
    to the lowest index.

    Parameters
    ----------
    codebook : Codebook, Tensor or np.ndarray (K, latent_dim)
    z : np.ndarray (n, latent_dim)

    Returns
    -------
    indices : np.ndarray (n,) of int
    """
    entries = _entries(codebook)
    z = np.asarray(z, dtype=np.float64)
    if entries.shape[0] == 0:
        raise ContractError('codebook is empty')
    if z.ndim != 2 or z.shape[1] != entries.shape[1]:
        raise DimensionError(
            'z has shape {} but codebook entries have shape {}'.format(
                z.shape, entries.shape))
    # argmin returns the first minimum
    return np.argmin(cdist(z, entries, metric='sqeuclidean'), axis=1)


def lookup_codes(codebook, indices):
    """Rows of the codebook as a tensor attached to the codebook's graph
    node, so that gradients reach the selected entries."""
    return ops.gather_rows(codebook, indices)


def vq_quantize(codebook, z, indices=None):
    """Replace every latent by its nearest codebook entry.

    Parameters
    ----------
    codebook : Codebook, Tensor or np.ndarray (K, latent_dim)
    z : Tensor (batch, latent_dim)
        continuous latents
    indices : np.ndarray (batch,) or None
        if given, these code assignments are used instead of the nearest
        entries (freezes the quantization, e.g. for finite differences)

    Returns
    -------
    indices : np.ndarray (batch,)
    z_q : Tensor (batch, latent_dim)
        the selected entries; gradients with respect to ``z_q`` are copied
        to ``z`` unchanged

    Raises
    ------
    ContractError
        if the codebook is empty
    DimensionError
        if the width of ``z`` differs from the codebook's latent dimension
    """
    z = as_tensor(z)
    entries = _entries(codebook)
    if indices is None:
        indices = nearest_code_indices(entries, z.data)
    else:
        indices = np.asarray(indices, dtype=np.intp)
        if entries.shape[0] == 0:
            raise ContractError('codebook is empty')
    z_q = ops.straight_through(z, entries[indices])
    return indices, z_q


def vq_loss(z, z_q, beta_commit=.25):
    """Codebook term plus ``beta_commit`` times the commitment term.

    ``||sg(z) - z_q||^2 + beta_commit * ||z - sg(z_q)||^2``, summed over
    latent dimensions and averaged over the batch. The first term only moves
    the codebook, the second only the encoder.

    Parameters
    ----------
    z : Tensor (batch, latent_dim)
        encoder outputs
    z_q : Tensor (batch, latent_dim)
        selected codebook entries, see :func:`lookup_codes`
    beta_commit : float

    Returns
    -------
    loss : Tensor
        scalar
    """
    z, z_q = as_tensor(z), as_tensor(z_q)
    if z.shape != z_q.shape:
        raise DimensionError(
            'z has shape {} but z_q has shape {}'.format(z.shape, z_q.shape))
    codebook_term = ops.mean(ops.sum(
        ops.squared_error(ops.detach(z), z_q), axis=1))
    commitment_term = ops.mean(ops.sum(
        ops.squared_error(z, ops.detach(z_q)), axis=1))
    return ops.add(codebook_term, ops.mul(commitment_term, beta_commit))
