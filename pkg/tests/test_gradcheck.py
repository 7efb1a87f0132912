import numpy as np
import pytest

from numpy.testing import assert_raises, assert_allclose

from daelab.autodiff import Tensor, ComputationRecord, backprop, ops, \
    finite_diff_check
from daelab.models import MlpConfig, build_model, mlp_forward, \
    init_mlp_params, reconstruction_loss, lookup_codes
from daelab.util import ContractError

from testtools import loss_of


# input -> hidden -> hidden -> output
ENCODER = MlpConfig((4, 5, 5, 2))
DECODER = MlpConfig((2, 5, 5, 4))


def _batch(seed):
    return np.random.RandomState(1000 + seed).normal(size=(6, 4))


def test_finite_diff_check_rejects_bad_step():
    assert_raises(ContractError, finite_diff_check,
                  lambda t: ops.sum(t), np.ones(2), h=0)


def test_finite_diff_check_detects_wrong_gradient():
    # straight_through reports a gradient the forward value does not have
    def f(t):
        return ops.sum(ops.straight_through(t, np.ones(t.shape)))

    assert finite_diff_check(f, np.ones(3)) > .5


def test_finite_diff_check_single_and_list():
    x = np.random.RandomState(0).normal(size=(2, 3))
    assert finite_diff_check(lambda t: ops.sum(ops.square(t)), x) < 1e-6
    assert finite_diff_check(
        lambda ts: ops.sum(ops.mul(ts[0], ts[1])), [x, x[::-1]]) < 1e-6


@pytest.mark.parametrize('seed', range(20))
def test_mlp_gradient(seed):
    rs = np.random.RandomState(seed)
    layers = init_mlp_params(ENCODER, rs)
    x = rs.normal(size=(5, 4))
    flat = [a for layer in layers for a in layer]

    def f(params):
        pairs = list(zip(params[::2], params[1::2]))
        return ops.mean(ops.square(mlp_forward(pairs, ENCODER, x)))

    assert finite_diff_check(f, flat) < 1e-4


@pytest.mark.parametrize('seed', range(20))
def test_autoencoder_loss_gradient(seed):
    model = build_model('ae', ENCODER, DECODER, random_state=seed)
    f, params = loss_of(model, _batch(seed), dict(mode='eval'))
    assert finite_diff_check(f, params) < 1e-4


@pytest.mark.parametrize('seed', range(20))
def test_vae_loss_gradient(seed):
    model = build_model('vae', ENCODER, DECODER, random_state=seed, beta=.5)
    x = _batch(seed)
    noise = np.random.RandomState(seed).normal(size=(len(x), 2))
    f, params = loss_of(model, x, dict(mode='eval', noise=noise))
    assert finite_diff_check(f, params) < 1e-4


def _vq_surrogate(model, x, indices):
    """Loss whose exact gradient equals the straight-through gradient of the
    VQ loss at the current parameters: every stop-gradient is replaced by
    the constant it evaluates to."""
    keys = model.parameter_keys()
    z0 = model.encode_continuous(x)
    codes0 = model.codebook[indices]

    def f(tensors):
        named = dict(zip(keys, tensors))
        z = model._encode_mlp(named, x)
        x_hat = model._decode(named, ops.add(z, codes0 - z0))
        recon = reconstruction_loss(x, x_hat)
        z_q = lookup_codes(named['codebook/entries'], indices)
        codebook_term = ops.mean(ops.sum(ops.squared_error(z0, z_q), axis=1))
        commitment_term = ops.mean(ops.sum(
            ops.squared_error(z, codes0), axis=1))
        return ops.add(ops.add(recon, codebook_term),
                       ops.mul(commitment_term, model.beta_commit))

    return f, [model.get_parameter(k) for k in keys]


@pytest.mark.parametrize('seed', range(20))
def test_vq_loss_gradient(seed):
    model = build_model('vq', ENCODER, DECODER, random_state=seed,
                        n_codes=8)
    x = _batch(seed)
    tensors = model.parameter_tensors()
    with ComputationRecord() as record:
        total, _, _ = model.loss(tensors, x, mode='eval')
    grads = backprop(total, record)
    indices = np.argmin(((model.encode_continuous(x)[:, None]
                          - model.codebook[None]) ** 2).sum(-1), axis=1)

    f, params = _vq_surrogate(model, x, indices)
    assert finite_diff_check(f, params) < 1e-4

    leaves = [Tensor(p, requires_grad=True) for p in params]
    with ComputationRecord() as record:
        surrogate = f(leaves)
    assert_allclose(surrogate.item(), total.item())
    surrogate_grads = backprop(surrogate, record)
    for key, leaf in zip(model.parameter_keys(), leaves):
        expected = surrogate_grads.get(leaf.id, np.zeros_like(leaf.data))
        actual = grads.get(tensors[key].id, np.zeros_like(leaf.data))
        assert_allclose(actual, expected, atol=1e-12, err_msg=key)
