"""JSON checkpoints with bit-exact float64 round trips.

Parameter values are stored as hexadecimal float strings
(:meth:`float.hex`), which :meth:`float.fromhex` reads back exactly.
"""

import json

import numpy as np

from ..util import ContractError, atomic_write_text
from .mlp import MlpConfig
from .autoencoder import build_model


__all__ = ['model_to_dict', 'model_from_dict', 'save_checkpoint',
           'load_checkpoint', 'CHECKPOINT_FORMAT']


CHECKPOINT_FORMAT = 'daelab-checkpoint-1'


def _encode_array(a):
    a = np.asarray(a, dtype=np.float64)
    return dict(shape=list(a.shape), data=[float(v).hex() for v in a.ravel()])


def _decode_array(d):
    values = np.array([float.fromhex(v) for v in d['data']], dtype=np.float64)
    return values.reshape(d['shape'])


def model_to_dict(model):
    """Configuration echo plus every parameter array of ``model``."""
    return dict(
        format=CHECKPOINT_FORMAT,
        config=model.config_dict(),
        parameters={k: _encode_array(v)
                    for k, v in model.parameter_arrays().items()},
    )


def model_from_dict(d):
    """Inverse of :func:`model_to_dict`.

    Raises
    ------
    ContractError
        if the format tag is unknown or parameters are missing
    """
    if d.get('format') != CHECKPOINT_FORMAT:
        raise ContractError('unknown checkpoint format: {!r}'.format(
            d.get('format')))
    cfg = d['config']
    model = build_model(
        cfg['kind'], MlpConfig(**cfg['encoder']), MlpConfig(**cfg['decoder']),
        random_state=0, beta=cfg.get('beta', 1.),
        n_codes=cfg.get('n_codes', 64),
        beta_commit=cfg.get('beta_commit', .25),
    )
    model.decoder_dropout = cfg.get('decoder_dropout', 0.)
    missing = set(model.parameter_keys()) - set(d['parameters'])
    if missing:
        raise ContractError('checkpoint lacks parameters {}'.format(
            sorted(missing)))
    for key in model.parameter_keys():
        model.set_parameter(key, _decode_array(d['parameters'][key]))
    return model


def save_checkpoint(model, path):
    """Write ``model`` to ``path`` atomically.

    Returns
    -------
    path : str
    """
    return atomic_write_text(path, json.dumps(model_to_dict(model), indent=1))


def load_checkpoint(path):
    with open(path) as f:
        return model_from_dict(json.load(f))
