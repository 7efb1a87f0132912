import numpy as np
import pytest

from numpy.testing import assert_raises, assert_array_equal

from daelab.analysis import knn_predict, knn_accuracy, knn_probe
from daelab.data import LabeledDataset
from daelab.util import ContractError, DimensionError

from testtools import tiny_model, tiny_datasets


def test_knn_predict_1nn():
    ref = np.array([[0.], [1.], [10.]])
    labels = np.array([0, 1, 2])
    query = np.array([[.2], [.9], [7.], [-5.]])
    assert_array_equal(knn_predict(ref, labels, query), [0, 1, 2, 0])


def test_knn_distance_ties_lowest_index():
    ref = np.array([[-1.], [1.]])
    assert_array_equal(knn_predict(ref, [3, 1], [[0.]]), [3])
    assert_array_equal(knn_predict(ref[::-1], [1, 3], [[0.]]), [1])


def test_knn_vote_ties_smallest_label():
    ref = np.array([[0.], [1.], [2.], [3.]])
    labels = np.array([2, 1, 0, 0])
    # neighbors of 0.4 with k=2: labels 2 and 1
    assert_array_equal(knn_predict(ref, labels, [[.4]], k=2), [1])
    assert_array_equal(knn_predict(ref, labels, [[2.6]], k=3), [0])


def test_knn_chunks_agree():
    rs = np.random.RandomState(0)
    ref, query = rs.normal(size=(30, 3)), rs.normal(size=(25, 3))
    labels = rs.randint(4, size=30)
    assert_array_equal(knn_predict(ref, labels, query, k=3, chunk_size=7),
                       knn_predict(ref, labels, query, k=3))


def test_knn_errors():
    ref = np.zeros((3, 2))
    assert_raises(ContractError, knn_predict, np.zeros((0, 2)), [],
                  np.zeros((1, 2)))
    assert_raises(ContractError, knn_predict, ref, [0, 1, 2],
                  np.zeros((1, 2)), k=4)
    assert_raises(DimensionError, knn_predict, ref, [0, 1, 2],
                  np.zeros((1, 3)))
    assert_raises(DimensionError, knn_predict, ref, [0, 1],
                  np.zeros((1, 2)))
    assert_raises(DimensionError, knn_accuracy, ref, [0, 1, 2],
                  np.zeros((2, 2)), [0])


def test_knn_accuracy():
    ref = np.array([[0.], [10.]])
    acc = knn_accuracy(ref, [0, 1], [[1.], [9.], [4.], [6.]], [0, 1, 1, 0])
    assert acc == .5


def test_knn_probe_on_separated_clusters():
    train, test = tiny_datasets()
    model = tiny_model('ae')
    probe = knn_probe(model, train, test)
    assert set(probe) == {'latent_accuracy', 'reconstruction_accuracy'}
    for v in probe.values():
        assert 0 <= v <= 1


def test_knn_probe_identity_recovers_labels():
    class Identity(object):
        def encode(self, X):
            return X

        def decode(self, Z):
            return Z

    train, test = tiny_datasets()
    probe = knn_probe(Identity(), train, test)
    # tiny clusters have variance .01 on a unit circle
    assert probe['latent_accuracy'] == 1.
    assert probe['reconstruction_accuracy'] == 1.
    assert isinstance(train, LabeledDataset)


def _exhaustive_knn(ref, labels, query, k):
    D = ((query[:, np.newaxis, :] - ref[np.newaxis, :, :]) ** 2).sum(-1)
    nearest = np.argsort(D, axis=1, kind='stable')[:, :k]
    votes = [np.bincount(labels[row], minlength=labels.max() + 1)
             for row in nearest]
    return np.array([np.argmax(v) for v in votes])


@pytest.mark.parametrize('k', [1, 5])
def test_knn_matches_exhaustive_scan(k):
    train, test = tiny_datasets(seed=3, n_train=40, n_test=25, ambient_dim=6,
                                num_clusters=8)
    expected = _exhaustive_knn(train.points, train.labels, test.points, k)
    assert_array_equal(knn_predict(train.points, train.labels, test.points,
                                   k=k, chunk_size=17), expected)
