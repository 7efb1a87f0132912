"""Closed forms and brute-force checks for linear autoencoders, Gaussian
projections and Lipschitz-constrained generators."""

from .linear_ae import *
from .gaussian import *
from .truncation import *
