"""Plot functions."""

import numpy as np
import holoviews as hv


__all__ = ['train_log_curve', 'complexity_trace_curve', 'cosine_histogram',
           'eigenvalue_spectrum', 'usage_curve', 'width_study_bars']


def _global_epoch(df):
    """Epoch counter running across consecutive stages."""
    offsets = df.groupby('stage').epoch.max().cumsum().shift(fill_value=0)
    return df.epoch + df.stage.map(offsets)


def train_log_curve(log, column='recon_loss', mark_stages=True):
    """Plots a training-log column against the epoch count.

    Parameters
    ----------
    log : pd.DataFrame
        train log with columns ``stage, epoch`` and ``column``
    column : str
        ``'recon_loss'`` or ``'reg_loss'``
    mark_stages : bool
        whether to mark the end of every stage but the last with a vertical
        line

    Returns
    -------
    panel : hv.Overlay
    """
    if len(log) == 0:
        raise ValueError('empty train log')
    x = _global_epoch(log)
    panel = hv.Overlay()
    for stage in np.unique(log.stage):
        mask = (log.stage == stage).values
        panel *= hv.Curve((x[mask], log[column][mask]), 'epoch', column,
                          label='stage {}'.format(stage))
    if mark_stages:
        for end in x.groupby(log.stage).max().values[:-1]:
            panel *= hv.VLine(end)
    return panel


def complexity_trace_curve(trace):
    """Plots encoder and decoder Lipschitz complexity during training.

    Parameters
    ----------
    trace : pd.DataFrame
        output of :meth:`~daelab.analysis.ComplexityTrace.to_frame`

    Returns
    -------
    panel : hv.Overlay
    """
    x = _global_epoch(trace)
    return (
        hv.Curve((x, trace.c_lip_encoder), 'epoch', 'C_Lip',
                 label='encoder')
        * hv.Curve((x, trace.c_lip_decoder), 'epoch', 'C_Lip',
                   label='decoder')
        * hv.HLine(1)
    )


def cosine_histogram(report):
    """Histogram of pairwise cosine similarities between codebook entries.

    Parameters
    ----------
    report : CodebookReport or dict
        a :class:`~daelab.analysis.CodebookReport` or its ``to_dict()``

    Returns
    -------
    fig : hv.Histogram
    """
    if isinstance(report, dict):
        hist = report['cosine_similarity_histogram']
        edges = report['bin_edges']
    else:
        hist, edges = report.histogram, report.bin_edges
    return hv.Histogram((np.asarray(edges), np.asarray(hist)),
                        kdims='cosine similarity', vdims='count')


def eigenvalue_spectrum(eigenvalues):
    """Eigenvalues in descending order against their rank.

    Fast decay indicates codes that concentrate on a low-dimensional
    subspace.
    """
    eigenvalues = np.asarray(eigenvalues)
    fig = hv.Curve((np.arange(1, len(eigenvalues) + 1), eigenvalues),
                   'rank', 'eigenvalue') * \
        hv.Scatter((np.arange(1, len(eigenvalues) + 1), eigenvalues))
    return fig


def usage_curve(usage_counts, normalize=True):
    """Code usage sorted in descending order.

    Parameters
    ----------
    usage_counts : array-like
        per-code assignment counts (in any order)
    normalize : bool
        if ``True`` frequencies are plotted instead of counts

    Returns
    -------
    fig : hv.Curve
    """
    counts = np.sort(np.asarray(usage_counts, dtype=float))[::-1]
    if normalize:
        counts = counts / max(counts.sum(), 1)
    return hv.Curve((np.arange(1, len(counts) + 1), counts), 'code rank',
                    'frequency' if normalize else 'count')


def width_study_bars(summary, metric='reconstruction'):
    """Mean accuracy per configuration with standard-deviation error bars
    and reference means.

    Parameters
    ----------
    summary : pd.DataFrame
        output of :func:`~daelab.experiments.summarize_width_study`
    metric : {'latent', 'reconstruction'}

    Returns
    -------
    panel : hv.Overlay
    """
    df = summary[summary.metric == metric]
    ylabel = '{} accuracy (%)'.format(metric)
    panel = hv.Bars((df.config, df['mean']), 'configuration', ylabel)
    panel *= hv.ErrorBars((df.config, df['mean'], df['std'].fillna(0)),
                          'configuration', [ylabel, 'std'])
    ref = df[np.isfinite(df.reference_mean)]
    if len(ref) > 0:
        panel *= hv.Scatter((ref.config, ref.reference_mean),
                            'configuration', ylabel, label='reference')
    return panel
