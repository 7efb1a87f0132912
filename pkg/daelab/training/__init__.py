"""Single-stage and two-stage (decoupled) training."""

from .stages import *
from .dae import *
