"""Encoder/decoder networks, VAE heads and VQ bottlenecks."""

from .mlp import *
from .vae import *
from .vq import *
from .autoencoder import *
from .checkpoint import *
