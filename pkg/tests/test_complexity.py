import warnings

import numpy as np
import pytest

from numpy.testing import assert_raises, assert_allclose, assert_array_equal

from daelab.analysis import PairExclusionWarning, ComplexityReport, \
    sample_pairs, lipschitz_complexity, complexity_report
from daelab.util import ContractError, DimensionError

from testtools import tiny_model, tiny_datasets, rng, slow


def test_identity_has_complexity_one():
    X = rng(0).normal(size=(50, 3))
    assert lipschitz_complexity(lambda x: x, X, n_pairs=200) == 1.


@pytest.mark.parametrize('scale', [.5, 2., 10.])
def test_scale_covariance(scale):
    X = rng(1).normal(size=(40, 2))
    assert_allclose(lipschitz_complexity(lambda x: scale * x, X, 100), scale)
    c = lipschitz_complexity(np.tanh, X, 100, random_state=4)
    c_scaled = lipschitz_complexity(lambda x: scale * np.tanh(x), X, 100,
                                    random_state=4)
    assert_allclose(c_scaled, scale * c, rtol=1e-12)


def test_orthogonal_map_has_complexity_one():
    Q, _ = np.linalg.qr(rng(2).normal(size=(4, 4)))
    X = rng(3).normal(size=(30, 4))
    assert_allclose(lipschitz_complexity(lambda x: x @ Q.T, X, 100), 1.)


def test_constant_map_has_complexity_zero():
    X = rng(4).normal(size=(30, 2))
    c = lipschitz_complexity(lambda x: np.zeros((len(x), 5)), X, 100)
    assert c == 0


def test_pairs_depend_only_on_seed():
    X = rng(5).normal(size=(20, 2))
    i1, j1, _ = sample_pairs(X, 50, random_state=3)
    i2, j2, _ = sample_pairs(X, 50, random_state=3)
    assert_array_equal(i1, i2)
    assert_array_equal(j1, j2)
    assert np.all(i1 != j1)
    assert len(i1) == 50
    assert lipschitz_complexity(np.tanh, X, 50, random_state=3) == \
        lipschitz_complexity(np.tanh, X, 50, random_state=3)


def test_duplicate_points_are_redrawn():
    X = np.array([[0., 0.], [0., 0.], [1., 0.], [0., 1.]])
    i, j, n_excluded = sample_pairs(X, 200, random_state=0)
    assert len(i) == 200
    assert n_excluded > 0
    assert np.all(np.linalg.norm(X[i] - X[j], axis=1) > 0)


def test_pairs_dropped_after_max_rounds():
    X = np.array([[0.], [0.], [0.], [1.]])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter('always')
        i, j, n_excluded = sample_pairs(X, 100, random_state=0,
                                        max_rounds=0)
    assert any(issubclass(x.category, PairExclusionWarning) for x in w)
    assert len(i) < 100
    assert n_excluded >= 100 - len(i)


def test_sample_pairs_errors():
    assert_raises(ContractError, sample_pairs, np.ones((5, 2)), 10)
    assert_raises(ContractError, sample_pairs, np.ones((1, 2)), 10)
    assert_raises(ContractError, sample_pairs, rng().normal(size=(5, 2)), 0)
    assert_raises(DimensionError, lipschitz_complexity, lambda x: x[:2],
                  rng().normal(size=(5, 2)), 10)


def test_complexity_report():
    train, _ = tiny_datasets()
    model = tiny_model('ae')
    report = complexity_report(model, train.points, n_pairs=64,
                               random_state=2)
    assert isinstance(report, ComplexityReport)
    assert report.c_lip_encoder > 0
    assert report.c_lip_decoder > 0
    assert report.n_pairs == 64
    assert report.n_pairs_encoder == report.n_pairs_decoder == 64
    assert report.seed == 2
    assert_allclose(report.deviation, abs(report.c_lip_encoder - 1)
                    + abs(report.c_lip_decoder - 1))
    d = report.to_dict()
    assert d['deviation'] == report.deviation
    assert d['denominator_floor'] == 1e-9


def test_complexity_report_collapsed_latents():
    train, _ = tiny_datasets()
    model = tiny_model('vq', n_codes=1)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter('always')
        report = complexity_report(model, train.points, n_pairs=32)
    assert np.isnan(report.c_lip_decoder)
    assert report.c_lip_encoder == 0
    assert any(issubclass(x.category, PairExclusionWarning) for x in w)


class _TwoLatents(object):
    """All points but the first share one latent code."""

    def encode(self, X):
        Z = np.zeros((len(X), 1))
        Z[0] = 1.
        return Z

    def decode(self, Z):
        return np.hstack([Z, -Z])


def test_complexity_report_counts_decoder_pairs():
    X = rng(6).normal(size=(400, 3))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter('always')
        report = complexity_report(_TwoLatents(), X, n_pairs=64)
    assert any(issubclass(x.category, PairExclusionWarning) for x in w)
    assert report.n_pairs_encoder == 64
    assert 0 < report.n_pairs_decoder < 64
    assert report.n_pairs == report.n_pairs_decoder
    assert report.n_excluded_decoder > 0
    assert_allclose(report.c_lip_decoder, np.sqrt(2))
    assert report.to_dict()['n_pairs_decoder'] == report.n_pairs_decoder


def _linear_map_oracle(A, n_pairs, seed):
    # independent Gaussian pairs: x - x' ~ N(0, 2 I)
    U = np.random.RandomState(seed).normal(size=(n_pairs, A.shape[1]))
    return np.mean(np.linalg.norm(U @ A.T, axis=1)
                   / np.linalg.norm(U, axis=1))


def _check_linear_map(n_points, n_pairs, rtol):
    A = rng(7).normal(size=(10, 10)) / np.sqrt(10)
    X = rng(8).normal(size=(n_points, 10))
    c = lipschitz_complexity(lambda x: x @ A.T, X, n_pairs, random_state=9)
    assert_allclose(c, _linear_map_oracle(A, n_pairs, 10), rtol=rtol)


def test_linear_map_matches_monte_carlo():
    _check_linear_map(5000, 20000, .03)


@slow
def test_linear_map_matches_monte_carlo_large():
    _check_linear_map(10 ** 5, 10 ** 6, .01)
