"""Sampled Lipschitz complexity of encoders and decoders."""

import warnings
from dataclasses import dataclass, asdict

import numpy as np
from sklearn.utils import check_random_state

from ..util import ContractError, DimensionError, _check_int


__all__ = ['PairExclusionWarning', 'ComplexityReport', 'sample_pairs',
           'lipschitz_complexity', 'complexity_report']


class PairExclusionWarning(Warning):
    pass


warnings.simplefilter('always', PairExclusionWarning)


@dataclass
class ComplexityReport:
    """Lipschitz complexities of a model's encoder and decoder.

    Attributes
    ----------
    c_lip_encoder : float
    c_lip_decoder : float
    n_pairs : int
        smallest number of valid pairs behind either value
    seed : int
    n_excluded_encoder, n_excluded_decoder : int
        pairs whose input distance fell below ``denominator_floor`` and were
        redrawn
    denominator_floor : float
    n_pairs_encoder, n_pairs_decoder : int or None
        valid pairs behind ``c_lip_encoder`` and ``c_lip_decoder``; 0 for
        an undefined decoder value
    """
    c_lip_encoder: float
    c_lip_decoder: float
    n_pairs: int
    seed: int
    n_excluded_encoder: int = 0
    n_excluded_decoder: int = 0
    denominator_floor: float = 1e-9
    n_pairs_encoder: int = None
    n_pairs_decoder: int = None

    @property
    def deviation(self):
        """``|C_enc - 1| + |C_dec - 1|``"""
        return abs(self.c_lip_encoder - 1) + abs(self.c_lip_decoder - 1)

    def to_dict(self):
        d = asdict(self)
        d['deviation'] = self.deviation
        return d


def sample_pairs(X, n_pairs, random_state=0, floor=1e-9, max_rounds=100):
    """Uniformly sampled index pairs ``(i, j)``, ``i != j``, whose points are
    at least ``floor`` apart.

    Pairs closer than ``floor`` are counted and redrawn, at most
    ``max_rounds`` times; pairs still too close afterwards are dropped with a
    :class:`PairExclusionWarning`.

    Parameters
    ----------
    X : np.ndarray (n_samples, n_features)
    n_pairs : int >= 1
    random_state : None, int or random-number-generator instance
    floor : float
        minimum Euclidean distance between paired points
    max_rounds : int

    Returns
    -------
    i, j : np.ndarray of int
    n_excluded : int
        number of redrawn or dropped pairs

    Raises
    ------
    ContractError
        if ``X`` has fewer than 2 distinct points
    """
    n_pairs = _check_int(n_pairs, 'n_pairs', 1)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    n = len(X)
    if n < 2 or len(np.unique(X, axis=0)) < 2:
        raise ContractError('need at least 2 distinct points')

    rng = check_random_state(random_state)

    def _draw(size):
        i = rng.randint(n, size=size)
        j = (i + rng.randint(1, n, size=size)) % n
        return i, j

    def _too_close(i, j):
        return np.linalg.norm(X[i] - X[j], axis=1) < floor

    i, j = _draw(n_pairs)
    bad = _too_close(i, j)
    n_excluded = int(bad.sum())
    rounds = 0
    while bad.any() and rounds < max_rounds:
        i[bad], j[bad] = _draw(bad.sum())
        bad = _too_close(i, j)
        n_excluded += int(bad.sum())
        rounds += 1
    if bad.any():
        warnings.warn('{} of {} pairs dropped: points closer than {:g}'.format(
            int(bad.sum()), n_pairs, floor), PairExclusionWarning)
        i, j = i[~bad], j[~bad]
    return i, j, n_excluded


def lipschitz_complexity(fun, X, n_pairs=4096, random_state=0, floor=1e-9,
                         return_details=False):
    """Mean ratio ``||f(x1) - f(x2)|| / ||x1 - x2||`` over sampled pairs.

    Parameters
    ----------
    fun : callable
        maps an array of points ``(n_samples, n_features)`` to an array of
        images with ``n_samples`` rows
    X : np.ndarray (n_samples, n_features)
        points the pairs are drawn from
    n_pairs : int
    random_state : None, int or random-number-generator instance
        pairs depend only on ``X``, ``n_pairs``, ``floor`` and this seed
    floor : float
        pairs with input distance below ``floor`` are redrawn
    return_details : bool
        if ``True`` also return the number of valid and excluded pairs

    Returns
    -------
    c_lip : float
    n_valid : int
        (only if ``return_details``)
    n_excluded : int
        (only if ``return_details``)
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    Y = np.asarray(fun(X), dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, np.newaxis]
    if len(Y) != len(X):
        raise DimensionError('fun returned {} rows for {} points'.format(
            len(Y), len(X)))
    i, j, n_excluded = sample_pairs(X, n_pairs, random_state, floor)
    ratios = np.linalg.norm(Y[i] - Y[j], axis=1) / \
        np.linalg.norm(X[i] - X[j], axis=1)
    c_lip = float(np.mean(ratios))
    if return_details:
        return c_lip, len(ratios), n_excluded
    return c_lip


def complexity_report(model, X, n_pairs=4096, random_state=0, floor=1e-9):
    """Encoder and decoder complexities of a trained model.

    The encoder map is ``model.encode`` (quantized latents for VQ models).
    The decoder is evaluated on the latents of ``X``, so its ratios compare
    decoded outputs with latent distances. If all latents coincide the
    decoder complexity is NaN.

    Parameters
    ----------
    model : :class:`~daelab.models.AutoencoderBase`
    X : np.ndarray (n_samples, input_dim)
    n_pairs : int
    random_state : int
    floor : float

    Returns
    -------
    report : ComplexityReport
    """
    c_enc, n_enc, excl_enc = lipschitz_complexity(
        model.encode, X, n_pairs, random_state, floor, return_details=True)
    Z = model.encode(X)
    try:
        c_dec, n_dec, excl_dec = lipschitz_complexity(
            model.decode, Z, n_pairs, random_state, floor,
            return_details=True)
    except ContractError:
        warnings.warn('latents collapsed to a single point; decoder '
                      'complexity undefined', PairExclusionWarning)
        c_dec, n_dec, excl_dec = np.nan, 0, 0
    return ComplexityReport(
        c_lip_encoder=c_enc, c_lip_decoder=c_dec,
        n_pairs=n_enc if n_dec == 0 else min(n_enc, n_dec),
        seed=random_state if isinstance(random_state, int) else -1,
        n_excluded_encoder=excl_enc, n_excluded_decoder=excl_dec,
        denominator_floor=floor, n_pairs_encoder=n_enc,
        n_pairs_decoder=n_dec,
    )
