import numpy as np

from numpy.testing import assert_raises, assert_allclose, assert_array_equal

from daelab.autodiff import Tensor
from daelab.models import MlpConfig, DropoutMask, init_mlp_params, \
    mlp_forward, apply_dropout
from daelab.util import ContractError, DimensionError


def test_mlp_config():
    cfg = MlpConfig([4, 8, 8, 2])
    assert cfg.layer_dims == (4, 8, 8, 2)
    assert cfg.n_layers == 3
    assert cfg.input_dim == 4
    assert cfg.output_dim == 2
    assert cfg.hidden_widths == (8, 8)
    assert MlpConfig(**cfg.to_dict()) == cfg

    assert_raises(ContractError, MlpConfig, (4,))
    assert_raises(ContractError, MlpConfig, (4, 0, 2))
    assert_raises(ContractError, MlpConfig, (4, 2), hidden_activation='sine')
    assert_raises(ContractError, MlpConfig, (4, 2), output_activation='sine')


def test_init_mlp_params():
    cfg = MlpConfig((4, 9, 2))
    params = init_mlp_params(cfg, 0)
    assert [W.shape for W, _ in params] == [(9, 4), (2, 9)]
    assert [b.shape for _, b in params] == [(9,), (2,)]
    assert np.all(np.abs(params[0][0]) <= 1 / np.sqrt(4))
    assert np.all(np.abs(params[1][0]) <= 1 / np.sqrt(9))
    again = init_mlp_params(cfg, 0)
    assert_array_equal(params[1][0], again[1][0])


def test_mlp_forward_matches_numpy():
    cfg = MlpConfig((3, 4, 2), hidden_activation='relu',
                    output_activation='tanh')
    params = init_mlp_params(cfg, 1)
    x = np.random.RandomState(1).normal(size=(5, 3))
    out = mlp_forward(params, cfg, x)
    (W0, b0), (W1, b1) = params
    expected = np.tanh(np.maximum(x @ W0.T + b0, 0) @ W1.T + b1)
    assert_allclose(out.data, expected)
    assert isinstance(out, Tensor)


def test_mlp_forward_errors():
    cfg = MlpConfig((3, 4, 2))
    params = init_mlp_params(cfg, 0)
    assert_raises(DimensionError, mlp_forward, params, cfg, np.ones((5, 2)))
    assert_raises(DimensionError, mlp_forward, params, cfg, np.ones(3))
    assert_raises(ContractError, mlp_forward, params[:1], cfg,
                  np.ones((5, 3)))


def test_dropout_mask():
    mask = DropoutMask.draw((1000, 10), .5, random_state=0)
    assert set(np.unique(mask.mask)) == {0., 2.}
    assert abs((mask.mask == 0).mean() - .5) < .03
    assert mask.keep_probability == .5

    eval_mask = DropoutMask.draw((3, 2), .5, mode='eval')
    assert_array_equal(eval_mask.mask, np.ones((3, 2)))
    assert_array_equal(DropoutMask.draw((3, 2), 0.).mask, np.ones((3, 2)))

    assert_raises(ContractError, DropoutMask.draw, (3,), 1.)
    assert_raises(ContractError, DropoutMask.draw, (3,), -.1)
    assert_raises(ContractError, DropoutMask.draw, (3,), .5, None, 'test')


def test_dropout_preserves_expectation():
    x = np.ones((20000, 1))
    out = apply_dropout(x, .3, random_state=0)
    assert abs(out.data.mean() - 1) < .02
    assert_array_equal(apply_dropout(x, .3, mode='eval').data, x)


def test_mlp_dropout_only_in_train_mode():
    cfg = MlpConfig((3, 50, 2))
    params = init_mlp_params(cfg, 0)
    x = np.random.RandomState(0).normal(size=(4, 3))
    clean = mlp_forward(params, cfg, x).data
    assert_array_equal(
        mlp_forward(params, cfg, x, dropout_p=.5, mode='eval').data, clean)
    noisy = mlp_forward(params, cfg, x, dropout_p=.5, random_state=0,
                        mode='train').data
    assert not np.allclose(noisy, clean)
    assert_array_equal(
        noisy, mlp_forward(params, cfg, x, dropout_p=.5, random_state=0,
                           mode='train').data)
