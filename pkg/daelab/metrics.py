"""Metrics to evaluate replication outcomes.

The functions take the dataset returned by
:func:`~daelab.experiments.run_width_study`, with dimensions ``config``
and ``rep``.
"""

import numpy as np


__all__ = [
    'mk_accuracyPercent', 'mk_complexityDeviation', 'mk_pairedDifference',
    'mk_winCount', 'mk_validReps',
]


def mk_accuracyPercent(ds, metric='latent'):
    """Nearest-neighbor accuracy in percent.

    Parameters
    ----------
    ds : xr.Dataset
        outcome dataset
    metric : {'latent', 'reconstruction'}

    Returns
    -------
    metric : xr.DataArray
        evaluated metric
    """
    return 100 * ds[f'{metric}_accuracy']


def mk_complexityDeviation(ds):
    """``|C_enc - 1| + |C_dec - 1|``, the distance of encoder and decoder
    complexities from an isometry.

    Parameters
    ----------
    ds : xr.Dataset
        outcome dataset

    Returns
    -------
    metric : xr.DataArray
        evaluated metric
    """
    return np.abs(ds.c_lip_encoder - 1) + np.abs(ds.c_lip_decoder - 1)


def mk_pairedDifference(metric, config_a, config_b):
    """Per-replication difference ``metric[a] - metric[b]``.

    Parameters
    ----------
    metric : xr.DataArray
        with dimension ``config``
    config_a, config_b : str

    Returns
    -------
    difference : xr.DataArray
        with the ``config`` dimension removed
    """
    return metric.sel(config=config_a, drop=True) - \
        metric.sel(config=config_b, drop=True)


def mk_winCount(difference):
    """Number of replications with a strictly positive difference; NaN
    differences count as losses."""
    return int((difference > 0).sum('rep'))


def mk_validReps(ds):
    """Replications that completed for every configuration."""
    return ~ds.failed.any('config')
