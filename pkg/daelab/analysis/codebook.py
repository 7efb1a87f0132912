"""Diagnostics of learned VQ codebooks."""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..models import nearest_code_indices
from ..util import ContractError, DiagnosticError, _check_int


__all__ = ['ZeroNormCodeWarning', 'CodebookReport',
           'pairwise_cosine_similarity', 'codebook_cosine_stats',
           'code_usage_counts', 'codebook_report']


class ZeroNormCodeWarning(Warning):
    pass


warnings.simplefilter('always', ZeroNormCodeWarning)


@dataclass
class CodebookReport:
    """Cosine-similarity and usage statistics of a codebook.

    Attributes
    ----------
    histogram : np.ndarray (n_bins,) of int
        counts of pairwise cosine similarities
    bin_edges : np.ndarray (n_bins + 1,)
        uniform edges over ``[-1, 1]``
    top_eigenvalues : np.ndarray
        largest eigenvalues of the cosine distance matrix, descending
    zero_norm_codes : np.ndarray of int
        indices of codes excluded from the cosine statistics
    usage_counts : np.ndarray of int or None
        per-code appearance counts, sorted descending
    """
    histogram: np.ndarray
    bin_edges: np.ndarray
    top_eigenvalues: np.ndarray
    zero_norm_codes: np.ndarray = field(
        default_factory=lambda: np.zeros(0, dtype=int))
    usage_counts: np.ndarray = None

    def to_dict(self):
        d = dict(
            cosine_similarity_histogram=self.histogram.tolist(),
            bin_edges=self.bin_edges.tolist(),
            top_eigenvalues=self.top_eigenvalues.tolist(),
            zero_norm_codes=self.zero_norm_codes.tolist(),
        )
        if self.usage_counts is not None:
            d['usage_counts'] = self.usage_counts.tolist()
        return d


def pairwise_cosine_similarity(entries):
    """Cosine similarity between all rows of ``entries``, clipped to
    ``[-1, 1]``. Rows must have non-zero norm."""
    entries = np.asarray(entries, dtype=np.float64)
    unit = entries / np.linalg.norm(entries, axis=1, keepdims=True)
    return np.clip(unit @ unit.T, -1, 1)


def codebook_cosine_stats(codebook, n_bins=101, n_eigvals=20, atol=0.):
    """Histogram of pairwise cosine similarities and the spectrum of the
    cosine distance matrix.

    Parameters
    ----------
    codebook : np.ndarray (K, latent_dim) or Codebook
    n_bins : int
        number of uniform histogram bins over ``[-1, 1]``
    n_eigvals : int
        number of leading eigenvalues to return
    atol : float
        codes with norm ``<= atol`` count as zero-norm

    Returns
    -------
    report : CodebookReport
        without usage counts; the histogram sums to ``K'(K'-1)/2`` where
        ``K'`` is the number of non-zero codes

    Raises
    ------
    ContractError
        if the codebook has fewer than 2 codes
    DiagnosticError
        if all codes have zero norm
    """
    entries = np.asarray(getattr(codebook, 'entries', codebook),
                         dtype=np.float64)
    n_bins = _check_int(n_bins, 'n_bins', 1)
    n_eigvals = _check_int(n_eigvals, 'n_eigvals', 1)
    if entries.ndim != 2 or len(entries) < 2:
        raise ContractError('need a codebook with at least 2 codes, got '
                            'shape {}'.format(entries.shape))

    norms = np.linalg.norm(entries, axis=1)
    zero = np.flatnonzero(norms <= atol)
    if len(zero) == len(entries):
        raise DiagnosticError('all {} codes have zero norm'.format(
            len(entries)))
    if len(zero) > 0:
        warnings.warn('{} zero-norm code(s) excluded: {}'.format(
            len(zero), zero.tolist()), ZeroNormCodeWarning)
    entries = entries[norms > atol]

    S = pairwise_cosine_similarity(entries)
    iu = np.triu_indices(len(entries), k=1)
    histogram, bin_edges = np.histogram(S[iu], bins=n_bins, range=(-1, 1))

    D = 1 - S
    np.fill_diagonal(D, 0)
    evals = scipy.linalg.eigvalsh(D)[::-1]

    return CodebookReport(histogram=histogram, bin_edges=bin_edges,
                          top_eigenvalues=evals[:n_eigvals],
                          zero_norm_codes=zero)


def code_usage_counts(encode, codebook, X):
    """Number of points assigned to every code, sorted descending.

    Parameters
    ----------
    encode : callable
        maps ``X`` to continuous latents ``(n_samples, latent_dim)``
    codebook : np.ndarray (K, latent_dim) or Codebook
    X : np.ndarray (n_samples, n_features)

    Returns
    -------
    counts : np.ndarray (K,) of int
        sums to ``n_samples``
    """
    entries = np.asarray(getattr(codebook, 'entries', codebook),
                         dtype=np.float64)
    indices = nearest_code_indices(entries, encode(X))
    counts = np.bincount(indices, minlength=len(entries))
    return np.sort(counts)[::-1]


def codebook_report(model, X, n_bins=101, n_eigvals=20):
    """Cosine statistics and usage counts of a trained VQ model.

    Parameters
    ----------
    model : :class:`~daelab.models.VQAutoencoder`
    X : np.ndarray (n_samples, input_dim)
    n_bins, n_eigvals : int

    Returns
    -------
    report : CodebookReport
    """
    if not hasattr(model, 'codebook'):
        raise ContractError('{} model has no codebook'.format(model.kind))
    report = codebook_cosine_stats(model.codebook, n_bins, n_eigvals)
    report.usage_counts = code_usage_counts(model.encode_continuous,
                                            model.codebook, X)
    return report
