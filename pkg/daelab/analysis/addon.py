"""Add-ons for :func:`~daelab.training.train_stage`.

Add-ons are called after every epoch with signature

.. code-block:: python

    addon(model, dataset, schedule, epoch, log_row)
"""

import warnings

import numpy as np
import pandas as pd

from ..util import _check_int
from .complexity import complexity_report


__all__ = ['COMPLEXITY_TRACE_COLUMNS', 'ComplexityTrace']


COMPLEXITY_TRACE_COLUMNS = ['stage', 'epoch', 'c_lip_encoder',
                            'c_lip_decoder']


class ComplexityTrace(object):
    """Records encoder and decoder Lipschitz complexity during training.

    Every evaluation reuses the same seed, so consecutive values differ
    only because the model changed.

    Parameters
    ----------
    X : np.ndarray (n_samples, input_dim)
        points the complexity pairs are drawn from
    n_pairs : int
    random_state : int
    every : int or None
        evaluate every ``every``-th epoch; the last epoch of a stage is
        always evaluated, and only it if ``every`` is ``None``
    """

    def __init__(self, X, n_pairs=4096, random_state=0, every=1):
        self.X = np.asarray(X, dtype=np.float64)
        self.n_pairs = n_pairs
        self.random_state = random_state
        self.every = None if every is None else _check_int(every, 'every', 1)
        self.rows = []

    def __call__(self, model, dataset, schedule, epoch, log_row):
        periodic = self.every is not None and epoch % self.every == 0
        if not periodic and epoch != schedule.epochs:
            return
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            report = complexity_report(model, self.X, self.n_pairs,
                                       self.random_state)
        self.rows.append(dict(stage=schedule.stage, epoch=epoch,
                              c_lip_encoder=report.c_lip_encoder,
                              c_lip_decoder=report.c_lip_decoder))

    def to_frame(self):
        """Trace as a DataFrame with columns ``stage, epoch, c_lip_encoder,
        c_lip_decoder``."""
        return pd.DataFrame(self.rows, columns=COMPLEXITY_TRACE_COLUMNS)
