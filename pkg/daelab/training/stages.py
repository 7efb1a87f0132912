"""Single training stages with optional frozen parameter groups."""

import logging
import time
from dataclasses import dataclass, asdict

import numpy as np
import pandas as pd
from sklearn.utils import check_random_state

from ..autodiff import Adam, ComputationRecord, backprop
from ..data import LabeledDataset
from ..util import ConfigError, ContractError, DimensionError, NumericError, \
    _check_float, _check_int, _prep_progressbar


__all__ = ['StageSchedule', 'TRAIN_LOG_COLUMNS', 'WEAK_DECODER_MODES',
           'empty_train_log', 'train_stage', 'run_baseline']


logger = logging.getLogger(__name__)


TRAIN_LOG_COLUMNS = ['stage', 'epoch', 'recon_loss', 'reg_loss', 'seconds']

WEAK_DECODER_MODES = ('none', 'halved_width', 'dropout')


@dataclass(frozen=True)
class StageSchedule:
    """Configuration of one training stage.

    Attributes
    ----------
    epochs : int
        number of passes over the data
    batch_size : int
    frozen : tuple of str
        parameter groups that are not updated during the stage
    weak_decoder_mode : {'none', 'halved_width', 'dropout'}
        how the decoder is weakened during the stage; in ``'dropout'`` mode
        :func:`train_stage` applies dropout with ``dropout_p`` after every
        hidden decoder activation
    dropout_p : float
        drop probability for ``'dropout'`` mode
    seed : int
        seed for shuffling, noise and dropout masks
    stage : int
        stage id written to the train log
    """
    epochs: int
    batch_size: int = 128
    frozen: tuple = ()
    weak_decoder_mode: str = 'none'
    dropout_p: float = .5
    seed: int = 0
    stage: int = 1

    def __post_init__(self):
        _check_int(self.epochs, 'epochs', 0)
        _check_int(self.batch_size, 'batch_size', 1)
        object.__setattr__(self, 'frozen', tuple(self.frozen))
        if self.weak_decoder_mode not in WEAK_DECODER_MODES:
            raise ContractError('unknown weak_decoder_mode: {}'.format(
                self.weak_decoder_mode))
        _check_float(self.dropout_p, 'dropout_p', 0, 1, 'left-closed')

    def to_dict(self):
        d = asdict(self)
        d['frozen'] = list(self.frozen)
        return d


def empty_train_log():
    return pd.DataFrame({c: pd.Series(dtype=int if c in ('stage', 'epoch')
                                      else float)
                         for c in TRAIN_LOG_COLUMNS})


def _points(dataset):
    if isinstance(dataset, LabeledDataset):
        return dataset.points
    return np.asarray(dataset, dtype=np.float64)


def train_stage(model, dataset, schedule, lr=1e-3, beta1=.9, beta2=.999,
                eps=1e-8, addons=tuple(), show_progress=False, verbose=False):
    """Train ``model`` for ``schedule.epochs`` passes over shuffled data.

    Parameters
    ----------
    model : :class:`~daelab.models.AutoencoderBase`
        updated in place
    dataset : LabeledDataset or np.ndarray (n_samples, input_dim)
    schedule : StageSchedule
    lr, beta1, beta2, eps : float
        Adam hyperparameters
    addons : list-like of callables
        called in the given order after every epoch with signature

        .. code-block:: python

            addon(model, dataset, schedule, epoch, log_row)

        where ``log_row`` is the dict that becomes the epoch's train-log row
    show_progress : bool
        whether to show a progress bar over epochs
    verbose : bool
        whether to log per-epoch losses

    Returns
    -------
    model : AutoencoderBase
        the same instance
    log : pd.DataFrame
        one row per epoch with columns ``stage, epoch, recon_loss,
        reg_loss, seconds``

    Raises
    ------
    DimensionError
        if the data width differs from the model's input width
    ConfigError
        if ``schedule.frozen`` names a group the model does not have
    NumericError
        if a loss becomes non-finite; ``location`` holds stage, epoch and
        batch
    """
    X = _points(dataset)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionError('data has shape {} but the model expects width '
                             '{}'.format(X.shape, model.input_dim))
    unknown = set(schedule.frozen) - set(model.groups)
    if unknown:
        raise ConfigError(
            'unknown parameter group(s) {} in stage {}'.format(
                sorted(unknown), schedule.stage), field='frozen')
    if schedule.weak_decoder_mode == 'dropout' and 'decoder' in \
            schedule.frozen:
        raise ConfigError('dropout mode with a frozen decoder',
                          field='weak_decoder_mode')

    n = len(X)
    rng = check_random_state(schedule.seed)
    optimizer = Adam(model, frozen=schedule.frozen, lr=lr, beta1=beta1,
                     beta2=beta2, eps=eps)
    _tqdm = _prep_progressbar(show_progress)

    previous_dropout = model.decoder_dropout
    if schedule.weak_decoder_mode == 'dropout':
        model.decoder_dropout = schedule.dropout_p

    rows = []
    try:
        for epoch in _tqdm(range(1, schedule.epochs + 1),
                           total=schedule.epochs, leave=False,
                           desc='stage {}'.format(schedule.stage)):
            t0 = time.perf_counter()
            perm = rng.permutation(n)
            recon_sum, reg_sum = 0., 0.
            for bi, start in enumerate(range(0, n, schedule.batch_size)):
                idx = perm[start:start + schedule.batch_size]
                tensors = model.parameter_tensors(frozen=schedule.frozen)
                try:
                    with ComputationRecord() as record:
                        total, recon, reg = model.loss(
                            tensors, X[idx], random_state=rng, mode='train')
                except NumericError as e:
                    location = dict(stage=schedule.stage, epoch=epoch,
                                    batch=bi)
                    raise NumericError(
                        'stage {stage}, epoch {epoch}, batch {batch}: '
                        '{msg}'.format(msg=e, **location),
                        op=e.op, location=location) from e

                if total.requires_grad:
                    grads = backprop(total, record)
                    optimizer.step({k: grads[t.id] for k, t in tensors.items()
                                    if t.id in grads})
                recon_sum += recon.item() * len(idx)
                reg_sum += reg.item() * len(idx)

            row = dict(stage=schedule.stage, epoch=epoch,
                       recon_loss=recon_sum / n, reg_loss=reg_sum / n,
                       seconds=time.perf_counter() - t0)
            rows.append(row)
            if verbose:
                logger.info('stage %d epoch %d: recon %.6g, reg %.6g',
                            schedule.stage, epoch, row['recon_loss'],
                            row['reg_loss'])
            for addon in addons:
                addon(model, dataset, schedule, epoch, row)
    finally:
        model.decoder_dropout = previous_dropout

    if len(rows) == 0:
        return model, empty_train_log()
    return model, pd.DataFrame(rows, columns=TRAIN_LOG_COLUMNS)


def run_baseline(model, dataset, epochs=200, batch_size=128, seed=0,
                 addons=tuple(), show_progress=False, verbose=False,
                 **adam_params):
    """Single-stage training of all parameter groups jointly.

    Returns
    -------
    model : AutoencoderBase
    log : pd.DataFrame
    """
    schedule = StageSchedule(epochs=epochs, batch_size=batch_size, seed=seed,
                             stage=1)
    return train_stage(model, dataset, schedule, addons=addons,
                       show_progress=show_progress, verbose=verbose,
                       **adam_params)
