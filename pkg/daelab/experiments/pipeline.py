"""Data, model, training and evaluation steps shared by experiment kinds."""

import logging
from dataclasses import replace

import numpy as np
import pandas as pd

from ..analysis import ComplexityTrace, codebook_report, complexity_report, \
    knn_probe
from ..data import make_toy_datasets
from ..models import build_model
from ..training import empty_train_log, run_baseline, run_dae, train_stage


__all__ = ['derive_seeds', 'make_datasets', 'make_model', 'train_model',
           'evaluate_model', 'make_trace']


logger = logging.getLogger(__name__)


def derive_seeds(seed):
    """Independent seeds for data, initialization and training, all
    determined by ``seed``."""
    rng = np.random.RandomState(seed)
    data, init, train = rng.randint(2**31 - 1, size=3)
    return dict(base=int(seed), data=int(data), init=int(init),
                train=int(train))


def make_datasets(config, seeds):
    """Train and test sets of ``config``'s mixture drawn with
    ``seeds['data']``."""
    spec = replace(config.mixture, seed=seeds['data'])
    train, test, _ = make_toy_datasets(spec, config.n_train_per_cluster,
                                       config.n_test_per_cluster)
    return train, test


def make_model(config, seeds, model_kind=None, encoder=None, decoder=None):
    """Freshly initialized model; kind and networks default to
    ``config``'s."""
    return build_model(model_kind or config.model_kind,
                       encoder or config.encoder, decoder or config.decoder,
                       random_state=seeds['init'], **config.model_params)


def train_model(config, model, train, seeds, two_stage=None,
                weak_decoder_mode=None, trace=None, show_progress=False,
                verbose=False):
    """Train ``model`` as described by ``config.training`` or
    ``config.stages``.

    Parameters
    ----------
    config : ExperimentConfig
    model : AutoencoderBase
    train : LabeledDataset
    seeds : dict
        from :func:`derive_seeds`
    two_stage : bool or None
        defaults to ``config.two_stage``
    weak_decoder_mode : {'dropout', 'halved_width'} or None
        defaults to ``config.training['weak_decoder']['mode']``
    trace : ComplexityTrace or None
        added to the epoch add-ons
    show_progress, verbose : bool

    Returns
    -------
    model : AutoencoderBase
    log : pd.DataFrame
    """
    if two_stage is None:
        two_stage = config.two_stage
    training = config.training
    weak = training['weak_decoder']
    if verbose:
        logger.info('training %s model (%s)', model.kind,
                    'two-stage' if two_stage else 'single-stage')
    addons = [] if trace is None else [trace]
    kwargs = dict(addons=addons, show_progress=show_progress,
                  verbose=verbose, **config.adam_params())

    if two_stage:
        return run_dae(
            model, train, total_epochs=training['epochs'],
            weak_decoder_mode=weak_decoder_mode or weak['mode'],
            dropout_p=weak['p'], split=training['split'],
            batch_size=training['batch_size'], seed=seeds['train'],
            schedules=config.stages, **kwargs)
    elif config.stages is not None:
        logs = [empty_train_log()]
        for schedule in config.stages:
            model, log = train_stage(model, train, schedule, **kwargs)
            logs.append(log)
        return model, pd.concat(logs, ignore_index=True)
    else:
        return run_baseline(model, train, epochs=training['epochs'],
                            batch_size=training['batch_size'],
                            seed=seeds['train'], **kwargs)


def evaluate_model(config, model, train, test, seeds):
    """Nearest-neighbor, complexity and (for VQ models) codebook probes.

    Returns
    -------
    analysis : dict
        JSON-serializable
    """
    analysis = config.analysis
    accuracies = knn_probe(model, train, test, k=analysis['knn_k'])
    complexity = complexity_report(model, train.points, analysis['n_pairs'],
                                   seeds['base'])
    result = dict(
        knn=dict(k=analysis['knn_k'], **accuracies),
        complexity=complexity.to_dict(),
    )
    if model.kind == 'vq':
        report = codebook_report(model, train.points, analysis['n_bins'],
                                 analysis['n_eigvals'])
        result['codebook'] = report.to_dict()
    return result


def make_trace(config, train, seeds):
    """Complexity trace evaluated every ``analysis.complexity_every``
    epochs, or at stage ends only if that is 0."""
    return ComplexityTrace(train.points, config.analysis['n_pairs'],
                           seeds['base'],
                           every=config.analysis['complexity_every'] or None)
