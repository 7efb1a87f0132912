"""Fully connected networks and dropout masking."""

from dataclasses import dataclass

import numpy as np
from sklearn.utils import check_random_state

from ..autodiff import ops
from ..autodiff.ops import as_tensor
from ..util import ContractError, DimensionError, _check_float, _check_int


__all__ = ['MlpConfig', 'DropoutMask', 'ACTIVATIONS', 'init_mlp_params',
           'mlp_forward', 'apply_dropout']


ACTIVATIONS = {
    'tanh': ops.tanh,
    'relu': ops.relu,
    'identity': lambda x: x,
}


@dataclass(frozen=True)
class MlpConfig:
    """Layer widths and activations of a fully connected network.

    Attributes
    ----------
    layer_dims : tuple of int
        input width, hidden widths, output width; at least 2 entries
    hidden_activation : {'tanh', 'relu'}
    output_activation : {'identity', 'tanh', 'relu'}
    """
    layer_dims: tuple
    hidden_activation: str = 'tanh'
    output_activation: str = 'identity'

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        object.__setattr__(self, 'layer_dims', dims)
        if len(dims) < 2:
            raise ContractError('layer_dims needs at least 2 entries')
        for d in dims:
            _check_int(d, 'layer width', 1)
        if self.hidden_activation not in ('tanh', 'relu'):
            raise ContractError(
                'unknown hidden_activation: {}'.format(self.hidden_activation))
        if self.output_activation not in ACTIVATIONS:
            raise ContractError(
                'unknown output_activation: {}'.format(self.output_activation))

    @property
    def n_layers(self):
        return len(self.layer_dims) - 1

    @property
    def input_dim(self):
        return self.layer_dims[0]

    @property
    def output_dim(self):
        return self.layer_dims[-1]

    @property
    def hidden_widths(self):
        return self.layer_dims[1:-1]

    def to_dict(self):
        return dict(layer_dims=list(self.layer_dims),
                    hidden_activation=self.hidden_activation,
                    output_activation=self.output_activation)


@dataclass(frozen=True)
class DropoutMask:
    """Inverted-dropout mask.

    Attributes
    ----------
    p : float
        drop probability, ``0 <= p < 1``
    mask : np.ndarray
        survivors scaled by ``1 / (1 - p)``, dropped units 0; all ones in
        eval mode
    mode : {'train', 'eval'}
    """
    p: float
    mask: np.ndarray
    mode: str

    @classmethod
    def draw(cls, shape, p, random_state=None, mode='train'):
        _check_float(p, 'p', 0, 1, 'left-closed')
        if mode not in ('train', 'eval'):
            raise ContractError('mode must be "train" or "eval"')
        if mode == 'eval' or p == 0:
            return cls(p, np.ones(shape), mode)
        rng = check_random_state(random_state)
        keep = rng.uniform(size=shape) >= p
        return cls(p, keep / (1. - p), mode)

    @property
    def keep_probability(self):
        return 1. - self.p


def apply_dropout(activations, p, random_state=None, mode='train'):
    """Zero units independently with probability ``p`` and rescale the
    survivors by ``1 / (1 - p)``.

    Parameters
    ----------
    activations : Tensor
        activations to mask
    p : float
        drop probability, ``0 <= p < 1``
    random_state : None, int or random-number-generator instance
        for random number generator initialization
    mode : {'train', 'eval'}
        in eval mode the input is returned unchanged

    Returns
    -------
    masked : Tensor

    Raises
    ------
    ContractError
        if ``p`` is outside ``[0, 1)``
    """
    activations = as_tensor(activations)
    mask = DropoutMask.draw(activations.shape, p, random_state, mode)
    if mode == 'eval' or p == 0:
        return activations
    return ops.mul(activations, mask.mask)


def init_mlp_params(config, random_state=None):
    """Weights and biases drawn from ``U(-1/sqrt(fan_in), 1/sqrt(fan_in))``.

    Returns
    -------
    params : list of (W, b)
        ``W`` has shape ``(n_out, n_in)``, ``b`` has shape ``(n_out,)``
    """
    rng = check_random_state(random_state)
    params = []
    for n_in, n_out in zip(config.layer_dims[:-1], config.layer_dims[1:]):
        bound = 1. / np.sqrt(n_in)
        W = rng.uniform(-bound, bound, size=(n_out, n_in))
        b = rng.uniform(-bound, bound, size=n_out)
        params.append((W, b))
    return params


def mlp_forward(params, config, x, dropout_p=0., random_state=None,
                mode='eval'):
    """Alternating affine layers and activations.

    Hidden layers use ``config.hidden_activation``; the last layer uses
    ``config.output_activation``. When ``dropout_p > 0`` and
    ``mode == 'train'``, dropout follows every hidden activation.

    Parameters
    ----------
    params : list of (W, b)
        tensors or arrays as returned by :func:`init_mlp_params`
    config : MlpConfig
    x : Tensor or np.ndarray (batch, layer_dims[0])
    dropout_p : float
        drop probability after hidden activations
    random_state : None, int or random-number-generator instance
        source of dropout masks
    mode : {'train', 'eval'}

    Returns
    -------
    out : Tensor (batch, layer_dims[-1])

    Raises
    ------
    DimensionError
        if the width of ``x`` differs from ``config.layer_dims[0]``
    """
    h = as_tensor(x)
    if h.ndim != 2 or h.shape[1] != config.input_dim:
        raise DimensionError(
            'input has shape {} but the network expects width {}'.format(
                h.shape, config.input_dim))
    if len(params) != config.n_layers:
        raise ContractError('{} layers configured but {} given'.format(
            config.n_layers, len(params)))

    hidden = ACTIVATIONS[config.hidden_activation]
    rng = None
    for i, (W, b) in enumerate(params):
        h = ops.forward_linear(W, b, h)
        if i < config.n_layers - 1:
            h = hidden(h)
            if dropout_p > 0 and mode == 'train':
                if rng is None:
                    rng = check_random_state(random_state)
                h = apply_dropout(h, dropout_p, rng, mode)
        else:
            h = ACTIVATIONS[config.output_activation](h)
    return h
