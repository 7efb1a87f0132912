"""Config-driven experiment execution with manifests and exit codes."""

import copy
import json
import logging
import os
import time

import pandas as pd

from ..models import load_checkpoint, save_checkpoint
from ..util import ConfigError, NumericError
from .config import DEFAULT_CONFIG, ExperimentConfig, TRAINING_KINDS, \
    config_from_dict, read_config_file
from .io import write_csv, write_json, write_manifest, write_netcdf
from .oracles import run_oracle_suite
from .pipeline import derive_seeds, evaluate_model, make_datasets, \
    make_model, make_trace, train_model
from .width_study import run_width_study


__all__ = ['EXIT_OK', 'EXIT_FAILURE', 'EXIT_CONFIG', 'EXIT_NUMERIC',
           'EXIT_ACCEPTANCE', 'METRICS_COLUMNS', 'resolve_config',
           'error_record', 'run_experiment']


logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_ACCEPTANCE = 4

METRICS_COLUMNS = ['latent_accuracy', 'reconstruction_accuracy',
                   'c_lip_encoder', 'c_lip_decoder', 'final_recon_loss']


def resolve_config(config, seed=None, out_dir=None, replications=None,
                   kind=None, checkpoint=None):
    """Turn a path, dict or :class:`ExperimentConfig` into a validated
    configuration with command-line overrides applied.

    Raises
    ------
    ConfigError
    """
    if isinstance(config, ExperimentConfig):
        d = config.to_dict()
    elif isinstance(config, dict):
        d = copy.deepcopy(config)
    else:
        d = read_config_file(config)
    for key, value in (('seed', seed), ('out_dir', out_dir),
                       ('replications', replications), ('kind', kind)):
        if value is not None:
            d[key] = value
    if checkpoint is not None and isinstance(d.get('analysis', {}), dict):
        d['analysis'] = dict(d.get('analysis', {}), checkpoint=checkpoint)
    return config_from_dict(d)


def _fallback_out_dir(config, out_dir):
    if out_dir is not None:
        return out_dir
    if isinstance(config, ExperimentConfig):
        return config.out_dir
    if isinstance(config, dict) and isinstance(config.get('out_dir'), str):
        return config['out_dir']
    if isinstance(config, str) and os.path.isfile(config):
        try:
            with open(config) as f:
                d = json.load(f)
            if isinstance(d, dict) and isinstance(d.get('out_dir'), str):
                return d['out_dir']
        except (OSError, ValueError):
            pass
    return DEFAULT_CONFIG['out_dir']


def error_record(exc, exit_code):
    """Machine-readable description of a failed run."""
    return dict(
        error=type(exc).__name__,
        message=str(exc),
        exit_code=exit_code,
        field=list(getattr(exc, 'field', ())),
        op=getattr(exc, 'op', None),
        location=getattr(exc, 'location', {}),
    )


def _metrics_frame(analysis, log):
    knn, complexity = analysis['knn'], analysis['complexity']
    return pd.DataFrame([dict(
        latent_accuracy=knn['latent_accuracy'],
        reconstruction_accuracy=knn['reconstruction_accuracy'],
        c_lip_encoder=complexity['c_lip_encoder'],
        c_lip_decoder=complexity['c_lip_decoder'],
        final_recon_loss=float(log.recon_loss.iloc[-1])
        if log is not None and len(log) > 0 else float('nan'),
    )], columns=METRICS_COLUMNS)


def _run_training(config, out, seeds, verbose, show_progress):
    train, test = make_datasets(config, seeds)
    model = make_model(config, seeds)
    trace = make_trace(config, train, seeds)
    model, log = train_model(config, model, train, seeds, trace=trace,
                             show_progress=show_progress, verbose=verbose)
    analysis = evaluate_model(config, model, train, test, seeds)

    save_checkpoint(model, os.path.join(out, 'checkpoint.json'))
    write_csv(os.path.join(out, 'train_log.csv'), log)
    write_csv(os.path.join(out, 'complexity.csv'), trace.to_frame())
    write_csv(os.path.join(out, 'metrics.csv'), _metrics_frame(analysis, log))
    write_json(os.path.join(out, 'analysis.json'), analysis)
    artifacts = ['checkpoint.json', 'train_log.csv', 'complexity.csv',
                 'metrics.csv', 'analysis.json']
    return artifacts, dict(status='pass', exit_code=EXIT_OK,
                           **analysis['knn'])


def _run_diagnose(config, out, seeds, verbose, show_progress):
    path = config.analysis['checkpoint']
    try:
        model = load_checkpoint(path)
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError('cannot load checkpoint {}: {}'.format(path, e),
                          field='analysis.checkpoint') from e
    if model.input_dim != config.mixture.ambient_dim:
        raise ConfigError(
            'checkpoint expects width {} but data.ambient_dim is {}'.format(
                model.input_dim, config.mixture.ambient_dim),
            field=('analysis.checkpoint', 'data.ambient_dim'))
    train, test = make_datasets(config, seeds)
    analysis = evaluate_model(config, model, train, test, seeds)
    analysis['checkpoint'] = dict(path=path, kind=model.kind)
    write_json(os.path.join(out, 'analysis.json'), analysis)
    write_csv(os.path.join(out, 'metrics.csv'), _metrics_frame(analysis, None))
    return ['analysis.json', 'metrics.csv'], dict(
        status='pass', exit_code=EXIT_OK, **analysis['knn'])


def _run_width_study(config, out, seeds, verbose, show_progress):
    result = run_width_study(config, show_progress=show_progress,
                             verbose=verbose)
    write_netcdf(os.path.join(out, 'width_study.nc'), result.results)
    write_csv(os.path.join(out, 'width_study_summary.csv'), result.summary)
    write_json(os.path.join(out, 'width_study.json'), result.to_dict())
    if result.n_failed > 0:
        status, exit_code = 'fail', EXIT_NUMERIC
    elif not result.passed:
        status, exit_code = 'fail', EXIT_ACCEPTANCE
    else:
        status, exit_code = 'pass', EXIT_OK
    failed_checks = [c['name'] for c in result.checks
                     if c['hard'] and not c['passed']]
    artifacts = ['width_study.nc', 'width_study_summary.csv',
                 'width_study.json']
    return artifacts, dict(
        status=status, exit_code=exit_code, n_failed=result.n_failed,
        failed_checks=failed_checks)


def _run_oracles(config, out, seeds, verbose, show_progress):
    report = run_oracle_suite(random_state=config.seed, verbose=verbose)
    write_json(os.path.join(out, 'oracles.json'), report.to_dict())
    return ['oracles.json'], dict(
        status='pass' if report.passed else 'fail',
        exit_code=EXIT_OK if report.passed else EXIT_ACCEPTANCE,
        failed_checks=report.failed)


_RUNNERS = dict(width_study=_run_width_study, oracles=_run_oracles,
                diagnose=_run_diagnose,
                **{kind: _run_training for kind in TRAINING_KINDS})


def run_experiment(config, seed=None, out_dir=None, replications=None,
                   kind=None, checkpoint=None, verbose=False,
                   show_progress=False):
    """Run the experiment described by ``config`` and write its artifacts.

    Every run writes ``manifest.json`` (configuration echo, seeds, artifact
    hashes, versions, wall-clock time and summary) into the output
    directory; failed runs also write ``error.json``.

    Parameters
    ----------
    config : str, dict or ExperimentConfig
        path of a JSON configuration file, its contents, or a validated
        configuration
    seed, out_dir, replications, kind : optional
        override the configuration's top-level entries
    checkpoint : str, optional
        overrides ``analysis.checkpoint``
    verbose : bool
        whether to log progress information
    show_progress : bool
        whether to show progress bars

    Returns
    -------
    exit_code : int
        0 success, 2 invalid configuration, 3 numeric abort, 4 failed
        acceptance checks, 1 any other error
    """
    t0 = time.perf_counter()
    try:
        config = resolve_config(config, seed, out_dir, replications, kind,
                                checkpoint)
    except ConfigError as e:
        out = _fallback_out_dir(config, out_dir)
        logger.error('invalid configuration (%s): %s',
                     ', '.join(e.field) or '<root>', e)
        write_json(os.path.join(out, 'error.json'),
                   error_record(e, EXIT_CONFIG))
        write_manifest(out, None, {}, ['error.json'],
                       time.perf_counter() - t0,
                       dict(status='fail', exit_code=EXIT_CONFIG,
                            error=type(e).__name__))
        return EXIT_CONFIG

    out = config.out_dir
    seeds = derive_seeds(config.seed)
    artifacts = []
    try:
        artifacts, summary = _RUNNERS[config.kind](config, out, seeds,
                                                   verbose, show_progress)
    except ConfigError as e:
        summary = error_record(e, EXIT_CONFIG)
    except NumericError as e:
        summary = error_record(e, EXIT_NUMERIC)
    except Exception as e:
        logger.exception('experiment %s failed', config.kind)
        summary = error_record(e, EXIT_FAILURE)

    if 'error' in summary:
        logger.error('%s: %s', summary['error'], summary['message'])
        write_json(os.path.join(out, 'error.json'), summary)
        artifacts = artifacts + ['error.json']
        summary = dict(status='fail', exit_code=summary['exit_code'],
                       error=summary['error'])

    write_manifest(out, config.to_dict(), seeds, artifacts,
                   time.perf_counter() - t0, summary)
    if verbose:
        logger.info('%s finished with exit code %d; artifacts in %s',
                    config.kind, summary['exit_code'], out)
    return summary['exit_code']
