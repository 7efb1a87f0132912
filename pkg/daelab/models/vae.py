"""Gaussian reparameterization head and the VAE objective."""

from dataclasses import dataclass

import numpy as np
from sklearn.utils import check_random_state

from ..autodiff import ops
from ..autodiff.ops import as_tensor
from ..util import ContractError, DimensionError, NumericError
from .mlp import mlp_forward


__all__ = ['VaeHead', 'init_vae_head', 'vae_encode', 'reconstruction_loss',
           'kl_divergence', 'vae_loss', 'vae_loss_terms']


@dataclass
class VaeHead:
    """Two affine layers mapping the last hidden layer to ``mu`` and
    ``logvar``.

    Attributes
    ----------
    mu : tuple (W, b)
    logvar : tuple (W, b)
    """
    mu: tuple
    logvar: tuple

    @property
    def latent_dim(self):
        return as_tensor(self.mu[0]).shape[0]


def init_vae_head(in_dim, latent_dim, random_state=None):
    """Head with weights from ``U(-1/sqrt(in_dim), 1/sqrt(in_dim))``."""
    rng = check_random_state(random_state)
    bound = 1. / np.sqrt(in_dim)
    layers = []
    for _ in range(2):
        W = rng.uniform(-bound, bound, size=(latent_dim, in_dim))
        b = rng.uniform(-bound, bound, size=latent_dim)
        layers.append((W, b))
    return VaeHead(mu=layers[0], logvar=layers[1])


def vae_encode(encoder_params, trunk_config, head, x, noise):
    """Encode ``x`` and draw ``z = mu + exp(logvar / 2) * noise``.

    Parameters
    ----------
    encoder_params : list of (W, b)
        parameters of the encoder trunk
    trunk_config : MlpConfig
        trunk ending in the last hidden layer (its output is activated)
    head : VaeHead
    x : Tensor or np.ndarray (batch, input_dim)
    noise : Tensor or np.ndarray (batch, latent_dim)
        standard-normal draws

    Returns
    -------
    mu, logvar, z : Tensor (batch, latent_dim)

    Raises
    ------
    DimensionError
        if ``noise`` and ``mu`` differ in shape
    """
    h = mlp_forward(encoder_params, trunk_config, x)
    mu = ops.forward_linear(head.mu[0], head.mu[1], h)
    logvar = ops.forward_linear(head.logvar[0], head.logvar[1], h)
    noise = as_tensor(noise)
    if noise.shape != mu.shape:
        raise DimensionError(
            'noise has shape {} but mu has shape {}'.format(
                noise.shape, mu.shape))
    std = ops.exp(ops.mul(logvar, .5))
    z = ops.add(mu, ops.mul(std, noise))
    return mu, logvar, z


def reconstruction_loss(x, x_hat):
    """Squared error summed over features and averaged over the batch."""
    return ops.mean(ops.sum(ops.squared_error(x_hat, x), axis=1))


def kl_divergence(mu, logvar):
    """Closed-form ``KL(N(mu, diag exp(logvar)) || N(0, I))`` averaged over
    the batch."""
    mu, logvar = as_tensor(mu), as_tensor(logvar)
    terms = ops.sub(ops.add(ops.square(mu), ops.exp(logvar)),
                    ops.add(logvar, 1.))
    return ops.mul(ops.mean(ops.sum(terms, axis=1)), .5)


def vae_loss_terms(x, x_hat, mu, logvar):
    """Reconstruction and KL terms of :func:`vae_loss`.

    Raises
    ------
    NumericError
        naming the term (``'reconstruction'`` or ``'kl'``) that produced a
        non-finite value
    """
    x, x_hat = as_tensor(x), as_tensor(x_hat)
    mu, logvar = as_tensor(mu), as_tensor(logvar)
    if x.shape != x_hat.shape or mu.shape != logvar.shape \
            or mu.shape[0] != x.shape[0]:
        raise DimensionError(
            'inconsistent shapes: x {}, x_hat {}, mu {}, logvar {}'.format(
                x.shape, x_hat.shape, mu.shape, logvar.shape))
    try:
        recon = reconstruction_loss(x, x_hat)
    except NumericError as e:
        raise NumericError('reconstruction term: {}'.format(e),
                           op='reconstruction') from e
    try:
        kl = kl_divergence(mu, logvar)
    except NumericError as e:
        raise NumericError('KL term: {}'.format(e), op='kl') from e
    return recon, kl


def vae_loss(x, x_hat, mu, logvar, beta=1.):
    """Reconstruction error plus ``beta`` times the KL divergence to the
    standard normal prior.

    Parameters
    ----------
    x, x_hat : Tensor (batch, dim)
    mu, logvar : Tensor (batch, latent_dim)
    beta : float >= 0

    Returns
    -------
    loss : Tensor
        scalar
    """
    if not beta >= 0:
        raise ContractError('beta must be non-negative')
    recon, kl = vae_loss_terms(x, x_hat, mu, logvar)
    return ops.add(recon, ops.mul(kl, beta))
