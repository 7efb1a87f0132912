"""Configuration-driven experiments: single training runs, the replication
harness, the oracle suite and the artifacts they write."""

from .config import *
from .io import *
from .pipeline import *
from .width_study import *
from .oracles import *
from .runner import *
