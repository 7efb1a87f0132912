"""Brute-force nearest-neighbor classification probes."""

import numpy as np
from scipy.spatial.distance import cdist

from ..util import ContractError, DimensionError, _check_int


__all__ = ['knn_predict', 'knn_accuracy', 'knn_probe']


def knn_predict(ref_points, ref_labels, query_points, k=1, chunk_size=1024):
    """Majority vote among the ``k`` nearest reference points.

    Distance ties are broken by lower reference index, vote ties by the
    smallest label.

    Parameters
    ----------
    ref_points : np.ndarray (n_ref, n_features)
    ref_labels : np.ndarray (n_ref,) of non-negative int
    query_points : np.ndarray (n_query, n_features)
    k : int >= 1
    chunk_size : int
        number of queries whose distances are computed at once

    Returns
    -------
    predicted : np.ndarray (n_query,)
    """
    k = _check_int(k, 'k', 1)
    ref_points = np.asarray(ref_points, dtype=np.float64)
    query_points = np.asarray(query_points, dtype=np.float64)
    ref_labels = np.asarray(ref_labels, dtype=int)
    if len(ref_points) == 0:
        raise ContractError('reference set is empty')
    if k > len(ref_points):
        raise ContractError('k = {} exceeds the {} reference points'.format(
            k, len(ref_points)))
    if ref_points.ndim != 2 or query_points.ndim != 2 or \
            ref_points.shape[1] != query_points.shape[1]:
        raise DimensionError(
            'reference points have shape {}, query points have shape '
            '{}'.format(ref_points.shape, query_points.shape))
    if len(ref_labels) != len(ref_points):
        raise DimensionError('{} reference points but {} labels'.format(
            len(ref_points), len(ref_labels)))

    n_labels = ref_labels.max() + 1
    predicted = np.empty(len(query_points), dtype=int)
    for start in range(0, len(query_points), chunk_size):
        q = query_points[start:start + chunk_size]
        dists = cdist(q, ref_points, metric='euclidean')
        nearest = np.argsort(dists, axis=1, kind='stable')[:, :k]
        votes = ref_labels[nearest]
        counts = np.zeros((len(q), n_labels), dtype=int)
        for col in range(k):
            np.add.at(counts, (np.arange(len(q)), votes[:, col]), 1)
        predicted[start:start + len(q)] = np.argmax(counts, axis=1)
    return predicted


def knn_accuracy(ref_points, ref_labels, query_points, query_labels, k=1,
                 chunk_size=1024):
    """Fraction of queries whose k-NN vote matches their label.

    Parameters
    ----------
    ref_points : np.ndarray (n_ref, n_features)
    ref_labels : np.ndarray (n_ref,)
    query_points : np.ndarray (n_query, n_features)
    query_labels : np.ndarray (n_query,)
    k : int >= 1
    chunk_size : int

    Returns
    -------
    accuracy : float
        in ``[0, 1]``

    Raises
    ------
    DimensionError
        if reference and query dimensions disagree
    """
    query_labels = np.asarray(query_labels, dtype=int)
    if len(query_labels) != len(query_points):
        raise DimensionError('{} query points but {} labels'.format(
            len(query_points), len(query_labels)))
    predicted = knn_predict(ref_points, ref_labels, query_points, k,
                            chunk_size)
    return float(np.mean(predicted == query_labels))


def knn_probe(model, train, test, k=1):
    """Nearest-neighbor accuracies of latents and reconstructions.

    Training points serve as reference, test points as queries. Latents are
    ``model.encode`` (posterior means for VAEs, quantized codes for VQ
    models); reconstructions decode those latents in eval mode.

    Parameters
    ----------
    model : :class:`~daelab.models.AutoencoderBase`
    train, test : LabeledDataset
    k : int

    Returns
    -------
    accuracies : dict
        ``latent_accuracy`` and ``reconstruction_accuracy`` in ``[0, 1]``
    """
    z_train, z_test = model.encode(train.points), model.encode(test.points)
    return dict(
        latent_accuracy=knn_accuracy(z_train, train.labels, z_test,
                                     test.labels, k),
        reconstruction_accuracy=knn_accuracy(
            model.decode(z_train), train.labels, model.decode(z_test),
            test.labels, k),
    )
