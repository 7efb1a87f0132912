"""Two-stage Decoupled Autoencoder training.

Stage 1 trains the encoder (with its VAE head or codebook) jointly with a
weakened auxiliary decoder. Stage 2 freezes everything except the decoder
and trains the full decoder.
"""

import math
from dataclasses import replace

import pandas as pd

from ..models import MlpConfig
from ..util import ContractError, _check_float, _check_int
from .stages import StageSchedule, train_stage


__all__ = ['build_aux_decoder', 'dae_schedules', 'dae_stage_one',
           'dae_stage_two', 'run_dae']


def build_aux_decoder(reference, mode, p=.5):
    """Weakened version of a reference decoder.

    Parameters
    ----------
    reference : MlpConfig
        full decoder configuration
    mode : {'halved_width', 'dropout'}
        ``'halved_width'`` halves every hidden width (rounding up);
        ``'dropout'`` keeps the structure and adds dropout with
        probability ``p`` after every hidden activation in train mode
    p : float
        drop probability, ``0 <= p < 1``

    Returns
    -------
    config : MlpConfig
        decoder configuration for stage 1
    dropout_p : float
        drop probability to use with ``config`` (0 in halved-width mode)

    Raises
    ------
    ContractError
        if ``mode`` is unknown or ``p`` is outside ``[0, 1)``
    """
    if mode == 'halved_width':
        dims = (reference.layer_dims[:1]
                + tuple(int(math.ceil(w / 2)) for w in reference.hidden_widths)
                + reference.layer_dims[-1:])
        return MlpConfig(dims, reference.hidden_activation,
                         reference.output_activation), 0.
    elif mode == 'dropout':
        _check_float(p, 'p', 0, 1, 'left-closed')
        return reference, float(p)
    else:
        raise ContractError(
            'auxiliary decoder mode must be "halved_width" or "dropout", '
            'got {!r}'.format(mode))


def dae_schedules(total_epochs=200, weak_decoder_mode='dropout',
                  dropout_p=.5, split=None, batch_size=128, seed=0):
    """Stage schedules splitting ``total_epochs`` between the two stages.

    Parameters
    ----------
    total_epochs : int
        must be even when ``split`` is ``None`` (equal split)
    weak_decoder_mode : {'halved_width', 'dropout'}
    dropout_p : float
    split : float or None
        fraction of epochs spent in stage 1
    batch_size : int
    seed : int
        stage 1 uses ``seed``, stage 2 ``seed + 1``

    Returns
    -------
    stage1, stage2 : StageSchedule
        ``stage2.frozen`` is empty; :func:`dae_stage_two` freezes every
        non-decoder group of the model it trains
    """
    total_epochs = _check_int(total_epochs, 'total_epochs', 0)
    if weak_decoder_mode not in ('halved_width', 'dropout'):
        raise ContractError('unknown weak_decoder_mode: {!r}'.format(
            weak_decoder_mode))
    _check_float(dropout_p, 'dropout_p', 0, 1, 'left-closed')
    if split is None:
        if total_epochs % 2 != 0:
            raise ContractError(
                'total_epochs must be even for the equal split, got '
                '{}'.format(total_epochs))
        epochs1 = total_epochs // 2
    else:
        _check_float(split, 'split', 0, 1, 'inclusive')
        epochs1 = int(round(total_epochs * split))
    stage1 = StageSchedule(epochs=epochs1, batch_size=batch_size,
                           weak_decoder_mode=weak_decoder_mode,
                           dropout_p=dropout_p, seed=seed, stage=1)
    stage2 = StageSchedule(epochs=total_epochs - epochs1,
                           batch_size=batch_size, seed=seed + 1, stage=2)
    return stage1, stage2


def dae_stage_one(model, dataset, schedule, addons=tuple(), **train_params):
    """Train encoder and auxiliary decoder.

    In halved-width mode the model's decoder is replaced by a freshly
    initialized decoder with halved hidden widths.

    Returns
    -------
    model : AutoencoderBase
    log : pd.DataFrame
    reference_decoder : MlpConfig
        the full decoder configuration, needed by :func:`dae_stage_two`
    """
    reference = model.decoder_config
    if schedule.weak_decoder_mode == 'halved_width':
        aux, _ = build_aux_decoder(reference, 'halved_width')
        model.replace_decoder(aux, random_state=schedule.seed)
    elif schedule.weak_decoder_mode != 'dropout':
        raise ContractError('stage 1 needs a weak decoder, got mode '
                            '{!r}'.format(schedule.weak_decoder_mode))
    model, log = train_stage(model, dataset, schedule, addons=addons,
                             **train_params)
    return model, log, reference


def dae_stage_two(model, dataset, schedule, reference_decoder,
                  weak_decoder_mode, addons=tuple(), **train_params):
    """Train the full decoder with every other parameter group frozen.

    If the stage-1 decoder differs structurally from ``reference_decoder``
    (halved-width mode) a fresh decoder is trained from scratch; otherwise
    the stage-1 decoder weights are the starting point.

    Returns
    -------
    model : AutoencoderBase
    log : pd.DataFrame
    """
    if weak_decoder_mode == 'halved_width' or \
            model.decoder_config != reference_decoder:
        model.replace_decoder(reference_decoder, random_state=schedule.seed)
    frozen = tuple(g for g in model.groups if g != 'decoder')
    schedule = replace(schedule, frozen=frozen, weak_decoder_mode='none')
    return train_stage(model, dataset, schedule, addons=addons,
                       **train_params)


def run_dae(model, dataset, total_epochs=200, weak_decoder_mode='dropout',
            dropout_p=.5, split=None, batch_size=128, seed=0,
            schedules=None, addons=tuple(), show_progress=False,
            verbose=False, **adam_params):
    """Two-stage training: weak auxiliary decoder, then frozen encoder.

    Parameters
    ----------
    model : AutoencoderBase
        trained in place
    dataset : LabeledDataset or np.ndarray
    total_epochs : int
        epochs of both stages together
    weak_decoder_mode : {'halved_width', 'dropout'}
    dropout_p : float
    split : float or None
        fraction of epochs in stage 1, ``None`` for an equal split
    batch_size : int
    seed : int
    schedules : tuple of 2 StageSchedule or None
        explicit schedules overriding the epoch/seed arguments
    addons : list-like of callables
        forwarded to :func:`~daelab.training.train_stage` in both stages
    show_progress, verbose : bool
    adam_params : dict
        ``lr``, ``beta1``, ``beta2``, ``eps``

    Returns
    -------
    model : AutoencoderBase
    log : pd.DataFrame
        stage 1 and stage 2 logs concatenated
    """
    if schedules is None:
        schedules = dae_schedules(total_epochs, weak_decoder_mode, dropout_p,
                                  split, batch_size, seed)
    stage1, stage2 = schedules
    train_params = dict(show_progress=show_progress, verbose=verbose,
                        **adam_params)
    model, log1, reference = dae_stage_one(model, dataset, stage1,
                                           addons=addons, **train_params)
    model, log2 = dae_stage_two(model, dataset, stage2, reference,
                                stage1.weak_decoder_mode, addons=addons,
                                **train_params)
    return model, pd.concat([log1, log2], ignore_index=True)
