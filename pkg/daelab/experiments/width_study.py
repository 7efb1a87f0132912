"""Replication harness for the VAE width / Decoupled Autoencoder accuracy
comparison on the toy mixture.

Every replication draws its own data and initialization from seed
``base_seed + i`` and trains all configurations on the same data and from
the same initialization, so configurations are compared pairwise per
replication.
"""

import json
import logging
import math
import warnings
from collections import OrderedDict
from dataclasses import dataclass
from datetime import datetime

import numpy as np
import pandas as pd
import xarray as xr
from joblib import Parallel, delayed
from statsmodels.stats.descriptivestats import sign_test

from ..analysis import complexity_report, knn_probe
from ..metrics import mk_accuracyPercent, mk_complexityDeviation, \
    mk_pairedDifference, mk_validReps, mk_winCount
from ..models import MlpConfig
from ..util import ContractError, NumericError, _check_int, \
    _prep_progressbar
from .config import config_from_dict
from .pipeline import derive_seeds, make_datasets, make_model, train_model


__all__ = ['WIDTH_STUDY_CONFIGS', 'REFERENCE_ACCURACIES',
           'ReplicationFailureWarning', 'ReferenceComparisonWarning',
           'WidthStudyResult', 'run_width_study_replication',
           'summarize_width_study', 'directional_checks', 'run_width_study']


logger = logging.getLogger(__name__)


class ReplicationFailureWarning(Warning):
    pass


class ReferenceComparisonWarning(Warning):
    pass


warnings.simplefilter('always', ReplicationFailureWarning)
warnings.simplefilter('always', ReferenceComparisonWarning)


# name -> (encoder hidden width, decoder hidden width, two-stage, weak mode)
WIDTH_STUDY_CONFIGS = OrderedDict([
    ('vae_64_128', (64, 128, False, None)),
    ('vae_128_64', (128, 64, False, None)),
    ('vae_128_128', (128, 128, False, None)),
    ('dae_dropout', (128, 128, True, 'dropout')),
    ('dae_halved', (128, 128, True, 'halved_width')),
])

# (config, metric) -> reference (mean %, std %)
REFERENCE_ACCURACIES = OrderedDict([
    (('vae_64_128', 'latent'), (80.6, 7.0)),
    (('vae_128_64', 'latent'), (87.8, 5.8)),
    (('vae_128_128', 'reconstruction'), (92.2, 6.1)),
    (('dae_dropout', 'reconstruction'), (98.0, 1.3)),
    (('dae_halved', 'reconstruction'), (98.0, 1.3)),
])

WIDTH_STUDY_VARIABLES = ('latent_accuracy', 'reconstruction_accuracy',
                         'c_lip_encoder', 'c_lip_decoder', 'final_recon_loss')

# (check name, config a, config b, metric, required win fraction, hard)
_CHECKS = (
    ('latent_width_ordering', 'vae_128_64', 'vae_64_128', 'latent', .8,
     True),
    ('dae_reconstruction_ordering', 'dae_dropout', 'vae_128_128',
     'reconstruction', .8, True),
    ('dae_halved_reconstruction_ordering', 'dae_halved', 'vae_128_128',
     'reconstruction', .8, False),
    ('dae_complexity_ordering', 'dae_dropout', 'vae_128_128', 'complexity',
     .7, True),
)

_TOLERANCE = 10.


@dataclass
class WidthStudyResult:
    """Replication outcomes, their summary and the directional checks.

    Attributes
    ----------
    results : xr.Dataset
        dimensions ``config`` and ``rep``; accuracies are fractions in
        ``[0, 1]``
    summary : pd.DataFrame
        mean and standard deviation (``ddof=1``) in percent per
        configuration and metric
    checks : list of dict
    n_failed : int
        number of replications with at least one aborted configuration
    """
    results: xr.Dataset
    summary: pd.DataFrame
    checks: list
    n_failed: int

    @property
    def passed(self):
        return self.n_failed == 0 and all(c['passed'] for c in self.checks
                                          if c['hard'])

    def to_dict(self):
        return dict(
            replications=int(self.results.sizes['rep']),
            n_failed=self.n_failed,
            passed=self.passed,
            summary=self.summary.to_dict(orient='records'),
            checks=self.checks,
        )


def _with_hidden_width(config, width):
    dims = config.layer_dims
    return MlpConfig((dims[0],) + (width,) * len(config.hidden_widths)
                     + (dims[-1],), config.hidden_activation,
                     config.output_activation)


def _completed(results):
    return results.isel(rep=np.flatnonzero(mk_validReps(results).values))


def run_width_study_replication(config, seed, verbose=False):
    """Train and probe every configuration of
    :data:`WIDTH_STUDY_CONFIGS` once.

    A configuration whose training aborts with a :class:`NumericError`
    yields NaN outcomes and ``failed = True``.

    Parameters
    ----------
    config : ExperimentConfig
        data, network depth, training and analysis settings
    seed : int
        replication seed
    verbose : bool

    Returns
    -------
    results : xr.Dataset
        dimension ``config``
    """
    seeds = derive_seeds(seed)
    train, test = make_datasets(config, seeds)
    outcomes = {v: [] for v in WIDTH_STUDY_VARIABLES}
    failed = []
    for name, (enc_w, dec_w, two_stage, mode) in WIDTH_STUDY_CONFIGS.items():
        encoder = _with_hidden_width(config.encoder, enc_w)
        decoder = _with_hidden_width(config.decoder, dec_w)
        model = make_model(config, seeds, 'vae', encoder, decoder)
        try:
            model, log = train_model(config, model, train, seeds,
                                     two_stage=two_stage,
                                     weak_decoder_mode=mode, verbose=verbose)
        except NumericError as e:
            logger.warning('seed %d, %s aborted: %s', seed, name, e)
            for v in WIDTH_STUDY_VARIABLES:
                outcomes[v].append(np.nan)
            failed.append(True)
            continue
        accuracies = knn_probe(model, train, test, config.analysis['knn_k'])
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            complexity = complexity_report(
                model, train.points, config.analysis['n_pairs'], seed)
        outcomes['latent_accuracy'].append(accuracies['latent_accuracy'])
        outcomes['reconstruction_accuracy'].append(
            accuracies['reconstruction_accuracy'])
        outcomes['c_lip_encoder'].append(complexity.c_lip_encoder)
        outcomes['c_lip_decoder'].append(complexity.c_lip_decoder)
        outcomes['final_recon_loss'].append(
            float(log.recon_loss.iloc[-1]) if len(log) > 0 else np.nan)
        failed.append(False)

    results = xr.Dataset(
        {v: ('config', np.asarray(outcomes[v], dtype=float))
         for v in WIDTH_STUDY_VARIABLES},
        coords=dict(config=list(WIDTH_STUDY_CONFIGS)),
    )
    results['failed'] = ('config', np.asarray(failed, dtype=bool))
    return results


def summarize_width_study(results):
    """Mean and standard deviation (``ddof=1``) of both accuracies in
    percent, over replications that completed for every configuration.

    Means farther than 10 points from the reference accuracies raise a
    :class:`ReferenceComparisonWarning`; they are reported, not asserted.

    Returns
    -------
    summary : pd.DataFrame
        columns ``config, metric, mean, std, n, reference_mean,
        reference_std, within_tolerance``
    """
    valid = _completed(results)
    rows = []
    for config in results.config.values:
        for metric in ('latent', 'reconstruction'):
            values = mk_accuracyPercent(valid, metric).sel(
                config=config).values
            n = len(values)
            mean = float(np.mean(values)) if n > 0 else np.nan
            std = float(np.std(values, ddof=1)) if n > 1 else np.nan
            ref_mean, ref_std = REFERENCE_ACCURACIES.get((config, metric),
                                                         (np.nan, np.nan))
            within = bool(abs(mean - ref_mean) <= _TOLERANCE) \
                if np.isfinite(ref_mean) else None
            if within is False:
                warnings.warn(
                    '{} {} accuracy {:.1f} is more than {:g} points from the '
                    'reference {:.1f}'.format(config, metric, mean,
                                              _TOLERANCE, ref_mean),
                    ReferenceComparisonWarning)
            rows.append(dict(config=config, metric=metric, mean=mean,
                             std=std, n=n, reference_mean=ref_mean,
                             reference_std=ref_std,
                             within_tolerance=within))
    return pd.DataFrame(rows, columns=[
        'config', 'metric', 'mean', 'std', 'n', 'reference_mean',
        'reference_std', 'within_tolerance'])


def directional_checks(results):
    """Paired ordering checks between configurations.

    A check passes if the first configuration wins (strictly) in at least
    the required fraction of completed replications. For complexity, lower
    deviation from 1 wins. A sign test p-value on the paired differences is
    reported alongside.

    Returns
    -------
    checks : list of dict
    """
    valid = _completed(results)
    n = int(valid.sizes['rep'])
    checks = []
    for name, a, b, metric, fraction, hard in _CHECKS:
        if metric == 'complexity':
            # lower deviation wins
            values = -mk_complexityDeviation(valid)
        else:
            values = mk_accuracyPercent(valid, metric)
        difference = mk_pairedDifference(values, a, b)
        wins = mk_winCount(difference)
        required = int(math.ceil(fraction * n))
        diffs = difference.values[np.isfinite(difference.values)]
        p_value = float(sign_test(diffs, mu0=0)[1]) \
            if np.any(diffs != 0) else np.nan
        checks.append(dict(
            name=name, config_a=a, config_b=b, metric=metric, wins=wins,
            n=n, required=required,
            mean_a=float(values.sel(config=a).mean()) if n > 0 else np.nan,
            mean_b=float(values.sel(config=b).mean()) if n > 0 else np.nan,
            sign_test_p=p_value, passed=bool(n > 0 and wins >= required),
            hard=hard,
        ))
    return checks


def run_width_study(config=None, base_seed=None, replications=None,
                    n_jobs=None, show_progress=False, verbose=False):
    """Run all configurations over ``replications`` seeds and summarize.

    Parameters
    ----------
    config : ExperimentConfig or None
        if ``None`` the default configuration is used
    base_seed : int or None
        replication ``i`` uses seed ``base_seed + i``; defaults to
        ``config.seed``
    replications : int >= 2 or None
        defaults to ``config.replications``
    n_jobs : int or None
        number of parallel jobs (see :class:`joblib.Parallel`); defaults to
        ``config.n_jobs``
    show_progress : bool
        whether to show a progress bar over replications
    verbose : bool

    Returns
    -------
    result : WidthStudyResult
    """
    if config is None:
        config = config_from_dict(dict(kind='width_study'))
    base_seed = config.seed if base_seed is None else base_seed
    replications = config.replications if replications is None \
        else replications
    replications = _check_int(replications, 'replications', 0)
    if replications < 2:
        raise ContractError('replications must be >= 2, got {}'.format(
            replications))
    n_jobs = config.n_jobs if n_jobs is None else n_jobs

    _tqdm = _prep_progressbar(show_progress)
    seeds = [base_seed + i for i in range(replications)]
    parallel = Parallel(n_jobs=n_jobs)
    rep_results = parallel(
        delayed(run_width_study_replication)(config, seed, verbose)
        for seed in _tqdm(seeds, total=replications, leave=False,
                          desc='replication')
    )
    results = xr.concat(rep_results, pd.Index(np.arange(replications),
                                              name='rep'))
    results = results.assign_coords(seed=('rep', np.asarray(seeds)))

    from .. import __version__ as daelab_version
    results.attrs['base_seed'] = base_seed
    results.attrs['replications'] = replications
    results.attrs['config'] = json.dumps(config.to_dict(), sort_keys=True)
    results.attrs['created'] = str(datetime.now())
    results.attrs['daelab_version'] = daelab_version

    n_failed = int((~mk_validReps(results)).sum())
    if n_failed > 0:
        failed_seeds = results.seed.values[~mk_validReps(results).values]
        warnings.warn('{} of {} replications aborted (seeds {}); summaries '
                      'use the remaining ones'.format(
                          n_failed, replications, failed_seeds.tolist()),
                      ReplicationFailureWarning)

    return WidthStudyResult(results=results,
                            summary=summarize_width_study(results),
                            checks=directional_checks(results),
                            n_failed=n_failed)
