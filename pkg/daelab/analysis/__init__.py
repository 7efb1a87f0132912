"""Lipschitz complexity, nearest-neighbor and codebook probes."""

from .complexity import *
from .knn import *
from .codebook import *
from .addon import *
