"""Decoupled Autoencoder laboratory"""

__version__ = '0.1.0'

from .analysis import complexity_report, knn_probe, lipschitz_complexity
from .experiments import run_width_study, run_experiment, run_oracle_suite
from .training import run_dae
