"""Synthetic Gaussian-mixture data on a circle and its orthogonal embedding
into a higher-dimensional ambient space."""

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.linalg import qr
from sklearn.utils import check_random_state

from ..util import ContractError, DimensionError, _check_int


__all__ = [
    'MixtureSpec', 'LabeledDataset', 'OrthogonalEmbedding',
    'cluster_centers', 'sample_mixture', 'make_embedding', 'embed',
    'make_toy_datasets',
]


@dataclass(frozen=True)
class MixtureSpec:
    """Isotropic Gaussian clusters evenly placed on a circle.

    Attributes
    ----------
    num_clusters : int
        number of clusters ``K``
    radius : float
        radius of the circle carrying the cluster centers
    variance : float
        per-dimension variance of each cluster
    intrinsic_dim : int
        dimension of the space the circle lives in (the circle spans the
        first two coordinates)
    ambient_dim : int
        dimension of the embedding space
    seed : int
        seed for all random draws
    """
    num_clusters: int = 8
    radius: float = 1.
    variance: float = .25
    intrinsic_dim: int = 2
    ambient_dim: int = 10
    seed: int = 0

    def __post_init__(self):
        _check_int(self.num_clusters, 'num_clusters', 1)
        _check_int(self.intrinsic_dim, 'intrinsic_dim', 2)
        _check_int(self.ambient_dim, 'ambient_dim', 1)
        if not self.radius > 0:
            raise ContractError('radius must be positive')
        if not self.variance >= 0:
            raise ContractError('variance must be non-negative')
        if self.ambient_dim < self.intrinsic_dim:
            raise ContractError(
                'ambient_dim ({}) < intrinsic_dim ({})'.format(
                    self.ambient_dim, self.intrinsic_dim))


@dataclass
class LabeledDataset:
    """Points with integer cluster labels.

    Attributes
    ----------
    points : np.ndarray (n_samples, dim)
    labels : np.ndarray (n_samples,)
        integers in ``[0, num_clusters)``
    num_clusters : int
    """
    points: np.ndarray
    labels: np.ndarray
    num_clusters: int

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.points.ndim != 2:
            raise DimensionError(
                'points must be 2-dimensional, got shape {}'.format(
                    self.points.shape))
        if len(self.points) != len(self.labels):
            raise DimensionError(
                '{} points but {} labels'.format(
                    len(self.points), len(self.labels)))
        if len(self.labels) > 0 and (self.labels.min() < 0 or
                                     self.labels.max() >= self.num_clusters):
            raise ContractError(
                'labels must lie in [0, {})'.format(self.num_clusters))

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]

    def to_frame(self):
        """Points and labels as a ``pd.DataFrame`` with columns
        ``x0, ..., x{d-1}, label``."""
        df = pd.DataFrame(
            self.points, columns=['x{}'.format(i) for i in range(self.dim)])
        df['label'] = self.labels
        return df

    def to_csv(self, path):
        """Write the dataset as CSV, one row per point."""
        self.to_frame().to_csv(path, index=False, float_format='%.17g')


@dataclass(frozen=True)
class OrthogonalEmbedding:
    """Linear isometry ``x -> A x`` with orthonormal columns.

    Attributes
    ----------
    A : np.ndarray (ambient_dim, intrinsic_dim)
    """
    A: np.ndarray

    @property
    def intrinsic_dim(self):
        return self.A.shape[1]

    @property
    def ambient_dim(self):
        return self.A.shape[0]


def cluster_centers(spec):
    """Cluster centers ``radius * (cos 2 pi k / K, sin 2 pi k / K, 0, ...)``.

    Returns
    -------
    centers : np.ndarray (num_clusters, intrinsic_dim)
    """
    angles = 2 * np.pi * np.arange(spec.num_clusters) / spec.num_clusters
    centers = np.zeros((spec.num_clusters, spec.intrinsic_dim))
    centers[:, 0] = spec.radius * np.cos(angles)
    centers[:, 1] = spec.radius * np.sin(angles)
    return centers


def sample_mixture(spec, n_per_cluster, random_state=None):
    """Draw the same number of points from every cluster.

    Parameters
    ----------
    spec : MixtureSpec
        mixture description
    n_per_cluster : int >= 1
        number of points per cluster
    random_state : None, int or random-number-generator instance
        if ``None``, ``spec.seed`` is used

    Returns
    -------
    dataset : LabeledDataset
        points in the intrinsic dimension, grouped by cluster
    """
    n_per_cluster = _check_int(n_per_cluster, 'n_per_cluster', 1)
    rng = check_random_state(spec.seed if random_state is None
                             else random_state)
    centers = cluster_centers(spec)
    noise = rng.normal(size=(spec.num_clusters, n_per_cluster,
                             spec.intrinsic_dim))
    points = centers[:, np.newaxis, :] + np.sqrt(spec.variance) * noise
    labels = np.repeat(np.arange(spec.num_clusters), n_per_cluster)
    return LabeledDataset(points.reshape(-1, spec.intrinsic_dim), labels,
                          spec.num_clusters)


def make_embedding(intrinsic_dim, ambient_dim, random_state=0):
    """Orthonormalize the columns of a seeded Gaussian matrix.

    Parameters
    ----------
    intrinsic_dim : int
        number of columns
    ambient_dim : int
        number of rows, at least ``intrinsic_dim``
    random_state : None, int or random-number-generator instance
        for random number generator initialization

    Returns
    -------
    embedding : OrthogonalEmbedding
        with ``A^T A = I``

    Raises
    ------
    ContractError
        if ``ambient_dim < intrinsic_dim``
    """
    intrinsic_dim = _check_int(intrinsic_dim, 'intrinsic_dim', 1)
    ambient_dim = _check_int(ambient_dim, 'ambient_dim', 1)
    if ambient_dim < intrinsic_dim:
        raise ContractError(
            'ambient_dim ({}) < intrinsic_dim ({})'.format(
                ambient_dim, intrinsic_dim))
    rng = check_random_state(random_state)
    G = rng.normal(size=(ambient_dim, intrinsic_dim))
    Q, R = qr(G, mode='economic')
    # sign convention makes A a deterministic function of G
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1
    return OrthogonalEmbedding(Q * signs)


def embed(data, embedding):
    """Map every point ``x`` to ``A x``; labels are unchanged.

    Parameters
    ----------
    data : LabeledDataset
        points in the intrinsic dimension
    embedding : OrthogonalEmbedding or np.ndarray (ambient_dim, intrinsic_dim)

    Returns
    -------
    dataset : LabeledDataset
        points in the ambient dimension

    Raises
    ------
    DimensionError
        if the dataset dimension differs from the column count of ``A``
    """
    A = embedding.A if isinstance(embedding, OrthogonalEmbedding) \
        else np.asarray(embedding, dtype=float)
    if data.dim != A.shape[1]:
        raise DimensionError(
            'data has dimension {} but A has shape {}'.format(
                data.dim, A.shape))
    return LabeledDataset(data.points @ A.T, data.labels.copy(),
                          data.num_clusters)


def make_toy_datasets(spec=None, n_train_per_cluster=1000,
                      n_test_per_cluster=200):
    """Train and test sets embedded into the ambient dimension.

    The embedding, the training points and the test points are drawn in
    this order from one random stream seeded with ``spec.seed``.

    Parameters
    ----------
    spec : MixtureSpec or None
        if ``None``, the default 8-cluster toy mixture
    n_train_per_cluster : int
    n_test_per_cluster : int

    Returns
    -------
    train : LabeledDataset
    test : LabeledDataset
    embedding : OrthogonalEmbedding
    """
    if spec is None:
        spec = MixtureSpec()
    rng = check_random_state(spec.seed)
    embedding = make_embedding(spec.intrinsic_dim, spec.ambient_dim, rng)
    train = sample_mixture(spec, n_train_per_cluster, random_state=rng)
    test = sample_mixture(spec, n_test_per_cluster, random_state=rng)
    return embed(train, embedding), embed(test, embedding), embedding
