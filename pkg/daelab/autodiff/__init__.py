"""Minimal dense tensors with reverse-mode automatic differentiation."""

from .tensor import *
from .ops import *
from .optim import *
from .gradcheck import *
