"""Autoencoder families assembled from MLPs, a VAE head or a VQ codebook.

Parameters are stored as numpy arrays in named groups (``encoder``,
``head``, ``codebook``, ``decoder``). Training turns them into tensors with
:meth:`AutoencoderBase.parameter_tensors`, evaluates :meth:`loss` inside a
computation record and writes updated arrays back with
:meth:`set_parameter`.
"""

import copy
from collections import OrderedDict

import numpy as np
from sklearn.utils import check_random_state

from ..autodiff import Tensor, ops
from ..util import ConfigError, ContractError, DimensionError, array_checksum
from .mlp import MlpConfig, init_mlp_params, mlp_forward
from .vae import VaeHead, init_vae_head, vae_encode, vae_loss_terms, \
    reconstruction_loss
from .vq import init_codebook, lookup_codes, vq_quantize, vq_loss


__all__ = ['AutoencoderBase', 'Autoencoder', 'VariationalAutoencoder',
           'VQAutoencoder', 'build_model', 'MODEL_KINDS']


class AutoencoderBase(object):
    """Encoder and decoder MLPs with parameter groups.

    Parameters
    ----------
    encoder_config : MlpConfig
        maps data to latents
    decoder_config : MlpConfig
        maps latents to data
    random_state : None, int or random-number-generator instance
        for parameter initialization

    Attributes
    ----------
    params : OrderedDict
        group name -> OrderedDict of parameter name -> np.ndarray
    decoder_dropout : float
        drop probability after the decoder's hidden activations in train
        mode
    """

    kind = None

    def __init__(self, encoder_config, decoder_config, random_state=None):
        if encoder_config.output_dim != decoder_config.input_dim:
            raise DimensionError(
                'encoder output width {} != decoder input width {}'.format(
                    encoder_config.output_dim, decoder_config.input_dim))
        if decoder_config.output_dim != encoder_config.input_dim:
            raise DimensionError(
                'decoder output width {} != encoder input width {}'.format(
                    decoder_config.output_dim, encoder_config.input_dim))
        self.encoder_config = encoder_config
        self.decoder_config = decoder_config
        self.decoder_dropout = 0.
        rng = check_random_state(random_state)
        self.params = OrderedDict()
        self._init_encoder(rng)
        self.params['decoder'] = self._layers_to_group(
            init_mlp_params(decoder_config, rng))

    # -- parameters ---------------------------------------------------------

    @staticmethod
    def _layers_to_group(layers):
        group = OrderedDict()
        for i, (W, b) in enumerate(layers):
            group['W{}'.format(i)] = W
            group['b{}'.format(i)] = b
        return group

    @staticmethod
    def _group_to_layers(group_tensors, n_layers):
        return [(group_tensors['W{}'.format(i)],
                 group_tensors['b{}'.format(i)]) for i in range(n_layers)]

    def _init_encoder(self, rng):
        self.params['encoder'] = self._layers_to_group(
            init_mlp_params(self.encoder_config, rng))

    @property
    def input_dim(self):
        return self.encoder_config.input_dim

    @property
    def latent_dim(self):
        return self.decoder_config.input_dim

    @property
    def groups(self):
        return list(self.params.keys())

    def parameter_keys(self):
        return ['{}/{}'.format(g, n)
                for g, group in self.params.items() for n in group]

    def get_parameter(self, key):
        group, name = key.split('/')
        return self.params[group][name]

    def set_parameter(self, key, value):
        group, name = key.split('/')
        old = self.params[group][name]
        value = np.array(value, dtype=np.float64)
        if value.shape != old.shape:
            raise DimensionError('{} has shape {}, got {}'.format(
                key, old.shape, value.shape))
        self.params[group][name] = value

    def parameter_arrays(self):
        """Flat ``OrderedDict`` of parameter key -> array."""
        return OrderedDict((k, self.get_parameter(k))
                           for k in self.parameter_keys())

    def parameter_tensors(self, frozen=()):
        """Tensors for every parameter; those of ``frozen`` groups do not
        require gradients.

        Returns
        -------
        tensors : OrderedDict
            parameter key -> Tensor
        """
        unknown = set(frozen) - set(self.groups)
        if unknown:
            raise ConfigError(
                'unknown parameter group(s): {}'.format(sorted(unknown)),
                field='frozen')
        return OrderedDict(
            (k, Tensor(v, requires_grad=k.split('/')[0] not in frozen, name=k))
            for k, v in self.parameter_arrays().items())

    def group_checksum(self, group):
        """sha256 of the float64 bytes of all parameters in ``group``."""
        return array_checksum(*self.params[group].values())

    def copy(self):
        return copy.deepcopy(self)

    def replace_decoder(self, decoder_config, random_state=None):
        """Swap in a freshly initialized decoder.

        Parameters
        ----------
        decoder_config : MlpConfig
            must map the latent width to the data width
        random_state : None, int or random-number-generator instance
            for the new decoder's initialization
        """
        if decoder_config.input_dim != self.latent_dim or \
                decoder_config.output_dim != self.input_dim:
            raise DimensionError(
                'decoder layer_dims {} incompatible with latent width {} and '
                'data width {}'.format(decoder_config.layer_dims,
                                       self.latent_dim, self.input_dim))
        self.decoder_config = decoder_config
        self.params['decoder'] = self._layers_to_group(
            init_mlp_params(decoder_config, check_random_state(random_state)))

    def _group_tensors(self, tensors, group):
        prefix = group + '/'
        return {k[len(prefix):]: t for k, t in tensors.items()
                if k.startswith(prefix)}

    def _default_tensors(self):
        return self.parameter_tensors(frozen=self.groups)

    # -- forward passes -----------------------------------------------------

    def _decode(self, tensors, z, random_state=None, mode='eval'):
        layers = self._group_to_layers(self._group_tensors(tensors, 'decoder'),
                                       self.decoder_config.n_layers)
        return mlp_forward(layers, self.decoder_config, z,
                           dropout_p=self.decoder_dropout,
                           random_state=random_state, mode=mode)

    def _encode_mlp(self, tensors, x):
        layers = self._group_to_layers(self._group_tensors(tensors, 'encoder'),
                                       self.encoder_config.n_layers)
        return mlp_forward(layers, self.encoder_config, x)

    def loss(self, tensors, x, random_state=None, mode='train', **kwargs):
        """Training objective on a batch.

        Parameters
        ----------
        tensors : dict
            parameter key -> Tensor, see :meth:`parameter_tensors`
        x : np.ndarray (batch, input_dim)
        random_state : None, int or random-number-generator instance
            source of noise and dropout masks
        mode : {'train', 'eval'}

        Returns
        -------
        total, recon, reg : Tensor
            scalar total loss, reconstruction term and regularization term
        """
        raise NotImplementedError()

    def encode(self, X):
        """Latent codes used by the probes (eval mode).

        Returns
        -------
        Z : np.ndarray (n_samples, latent_dim)
        """
        return self._encode_mlp(self._default_tensors(), X).data

    def decode(self, Z):
        """Decoder outputs in eval mode."""
        return self._decode(self._default_tensors(), Z).data

    def reconstruct(self, X):
        return self.decode(self.encode(X))

    def config_dict(self):
        return dict(kind=self.kind,
                    encoder=self.encoder_config.to_dict(),
                    decoder=self.decoder_config.to_dict(),
                    decoder_dropout=self.decoder_dropout)

    def __repr__(self):
        return '{}(encoder={}, decoder={})'.format(
            type(self).__name__, self.encoder_config.layer_dims,
            self.decoder_config.layer_dims)


class Autoencoder(AutoencoderBase):
    """Deterministic autoencoder trained on reconstruction error only."""

    kind = 'ae'

    def loss(self, tensors, x, random_state=None, mode='train', **kwargs):
        z = self._encode_mlp(tensors, x)
        x_hat = self._decode(tensors, z, random_state, mode)
        recon = reconstruction_loss(x, x_hat)
        reg = Tensor(0.)
        return ops.add(recon, reg), recon, reg


class VariationalAutoencoder(AutoencoderBase):
    """Gaussian VAE; the last encoder layer is replaced by a
    :class:`~daelab.models.VaeHead`.

    Parameters
    ----------
    encoder_config : MlpConfig
        at least 3 entries in ``layer_dims``; the trunk is
        ``layer_dims[:-1]`` with activated output and the head maps
        ``layer_dims[-2]`` to ``layer_dims[-1]``
    decoder_config : MlpConfig
    beta : float
        weight of the KL term
    random_state : None, int or random-number-generator instance
    """

    kind = 'vae'

    def __init__(self, encoder_config, decoder_config, beta=1.,
                 random_state=None):
        if len(encoder_config.layer_dims) < 3:
            raise ContractError('VAE encoder needs a hidden layer')
        if not beta >= 0:
            raise ContractError('beta must be non-negative')
        self.beta = float(beta)
        super().__init__(encoder_config, decoder_config, random_state)

    @property
    def trunk_config(self):
        cfg = self.encoder_config
        return MlpConfig(cfg.layer_dims[:-1], cfg.hidden_activation,
                         output_activation=cfg.hidden_activation)

    def _init_encoder(self, rng):
        trunk = self.trunk_config
        self.params['encoder'] = self._layers_to_group(
            init_mlp_params(trunk, rng))
        head = init_vae_head(trunk.output_dim, self.encoder_config.output_dim,
                             rng)
        self.params['head'] = OrderedDict([
            ('mu_W', head.mu[0]), ('mu_b', head.mu[1]),
            ('logvar_W', head.logvar[0]), ('logvar_b', head.logvar[1]),
        ])

    def _head(self, tensors):
        h = self._group_tensors(tensors, 'head')
        return VaeHead(mu=(h['mu_W'], h['mu_b']),
                       logvar=(h['logvar_W'], h['logvar_b']))

    def _trunk_layers(self, tensors):
        return self._group_to_layers(self._group_tensors(tensors, 'encoder'),
                                     self.trunk_config.n_layers)

    def encode_distribution(self, X, tensors=None):
        """``mu`` and ``logvar`` of the approximate posterior."""
        if tensors is None:
            tensors = self._default_tensors()
        zeros = np.zeros((len(X), self.latent_dim))
        mu, logvar, _ = vae_encode(self._trunk_layers(tensors),
                                   self.trunk_config, self._head(tensors),
                                   X, zeros)
        return mu.data, logvar.data

    def encode(self, X):
        return self.encode_distribution(X)[0]

    def loss(self, tensors, x, random_state=None, mode='train', noise=None,
             **kwargs):
        rng = check_random_state(random_state)
        if noise is None:
            noise = rng.normal(size=(len(x), self.latent_dim))
        mu, logvar, z = vae_encode(self._trunk_layers(tensors),
                                   self.trunk_config, self._head(tensors),
                                   x, noise)
        x_hat = self._decode(tensors, z, rng, mode)
        recon, kl = vae_loss_terms(x, x_hat, mu, logvar)
        return ops.add(recon, ops.mul(kl, self.beta)), recon, kl

    def config_dict(self):
        d = super().config_dict()
        d['beta'] = self.beta
        return d


class VQAutoencoder(AutoencoderBase):
    """Autoencoder with a vector-quantized bottleneck.

    Parameters
    ----------
    encoder_config : MlpConfig
    decoder_config : MlpConfig
    n_codes : int
        codebook size ``K``
    beta_commit : float
        weight of the commitment term
    random_state : None, int or random-number-generator instance
    """

    kind = 'vq'

    def __init__(self, encoder_config, decoder_config, n_codes=64,
                 beta_commit=.25, random_state=None):
        self.n_codes = int(n_codes)
        self.beta_commit = float(beta_commit)
        super().__init__(encoder_config, decoder_config, random_state)

    def _init_encoder(self, rng):
        super()._init_encoder(rng)
        codebook = init_codebook(self.n_codes, self.encoder_config.output_dim,
                                 rng)
        self.params['codebook'] = OrderedDict([('entries', codebook.entries)])

    @property
    def codebook(self):
        return self.params['codebook']['entries']

    def encode_continuous(self, X):
        """Encoder outputs before quantization."""
        return self._encode_mlp(self._default_tensors(), X).data

    def encode(self, X):
        tensors = self._default_tensors()
        z = self._encode_mlp(tensors, X)
        _, z_q = vq_quantize(tensors['codebook/entries'], z)
        return z_q.data

    def loss(self, tensors, x, random_state=None, mode='train', indices=None,
             **kwargs):
        codebook = tensors['codebook/entries']
        z = self._encode_mlp(tensors, x)
        indices, z_q = vq_quantize(codebook, z, indices=indices)
        x_hat = self._decode(tensors, z_q, random_state, mode)
        recon = reconstruction_loss(x, x_hat)
        reg = vq_loss(z, lookup_codes(codebook, indices), self.beta_commit)
        return ops.add(recon, reg), recon, reg

    def config_dict(self):
        d = super().config_dict()
        d.update(n_codes=self.n_codes, beta_commit=self.beta_commit)
        return d


MODEL_KINDS = {
    'ae': Autoencoder,
    'vae': VariationalAutoencoder,
    'vq': VQAutoencoder,
}


def build_model(kind, encoder_config, decoder_config, random_state=None,
                **kwargs):
    """Instantiate a model by kind (``'ae'``, ``'vae'`` or ``'vq'``).

    Parameters
    ----------
    kind : str
    encoder_config, decoder_config : MlpConfig
    random_state : None, int or random-number-generator instance
    kwargs : dict
        ``beta`` for VAEs, ``n_codes`` and ``beta_commit`` for VQ models;
        ignored by other kinds

    Returns
    -------
    model : AutoencoderBase
    """
    if kind not in MODEL_KINDS:
        raise ContractError('unknown model kind: {}'.format(kind))
    if kind == 'vae':
        extra = dict(beta=kwargs.get('beta', 1.))
    elif kind == 'vq':
        extra = dict(n_codes=kwargs.get('n_codes', 64),
                     beta_commit=kwargs.get('beta_commit', .25))
    else:
        extra = dict()
    return MODEL_KINDS[kind](encoder_config, decoder_config,
                             random_state=random_state, **extra)
