import os

import numpy as np
import pytest
from numpy.testing import assert_array_almost_equal

from daelab.data import MixtureSpec, make_toy_datasets
from daelab.models import MlpConfig, build_model


slow = pytest.mark.skipif(
    not os.environ.get('DAELAB_SLOW_TESTS'),
    reason='set DAELAB_SLOW_TESTS=1 to run acceptance-scale tests')


def assert_array_almost_equal_up_to_sign(actual, desired, decimal=6,
                                         err_msg='', verbose=True):
    """Like numpy.testing.assert_array_almost_equal, but allows ``actual``
    to equal ``-desired``
    """
    msg = ''

    try:
        assert_array_almost_equal(actual, desired, decimal, err_msg, verbose)
    except AssertionError as e_pos:
        error_positive = True
        msg += str(e_pos)
    else:
        error_positive = False

    try:
        assert_array_almost_equal(actual, -desired, decimal, err_msg,
                                  verbose)
    except AssertionError as e_neg:
        error_negative = True
        msg += '\t' + str(e_neg)
    else:
        error_negative = False

    if error_positive and error_negative:
        raise AssertionError(msg)


def tiny_spec(seed=0, ambient_dim=4, num_clusters=4):
    return MixtureSpec(num_clusters=num_clusters, radius=1., variance=.01,
                       intrinsic_dim=2, ambient_dim=ambient_dim, seed=seed)


def tiny_datasets(seed=0, n_train=20, n_test=5, ambient_dim=4,
                  num_clusters=4):
    train, test, _ = make_toy_datasets(
        tiny_spec(seed, ambient_dim, num_clusters), n_train, n_test)
    return train, test


def tiny_configs(d=4, hidden=5, latent=2):
    return (MlpConfig((d, hidden, latent)), MlpConfig((latent, hidden, d)))


def tiny_model(kind='ae', seed=0, d=4, hidden=5, latent=2, **kwargs):
    enc, dec = tiny_configs(d, hidden, latent)
    return build_model(kind, enc, dec, random_state=seed, **kwargs)


def tiny_config_dict(kind='baseline_ae', out_dir=None, epochs=2, **extra):
    """Configuration with a 4-cluster mixture in 4 dimensions and small
    networks."""
    d = dict(
        kind=kind,
        seed=0,
        data=dict(num_clusters=4, variance=.01, ambient_dim=4,
                  n_train_per_cluster=15, n_test_per_cluster=5),
        model=dict(encoder=dict(layer_dims=[4, 6, 2]),
                   decoder=dict(layer_dims=[2, 6, 4]),
                   n_codes=8),
        training=dict(epochs=epochs, batch_size=16, lr=1e-2),
        analysis=dict(n_pairs=64, complexity_every=1, n_eigvals=4,
                      n_bins=11),
    )
    if out_dir is not None:
        d['out_dir'] = str(out_dir)
    d.update(extra)
    return d


def loss_of(model, x, frozen_kwargs):
    """Loss of ``model`` on ``x`` as a function of a list of parameter
    tensors, for :func:`~daelab.autodiff.finite_diff_check`."""
    keys = model.parameter_keys()

    def f(tensors):
        named = dict(zip(keys, tensors))
        total, _, _ = model.loss(named, x, **frozen_kwargs)
        return total

    params = [model.get_parameter(k) for k in keys]
    return f, params


def rng(seed=0):
    return np.random.RandomState(seed)
