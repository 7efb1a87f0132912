"""Experiment configuration: strict JSON schema, defaults and typed view.

A configuration file is a JSON object; sections that are left out are
filled from :data:`DEFAULT_CONFIG`. Unknown keys are rejected at every
level.
"""

import copy
import json
from dataclasses import dataclass

import jsonschema

from ..data import MixtureSpec
from ..models import MlpConfig
from ..training import StageSchedule, WEAK_DECODER_MODES
from ..util import ConfigError, ContractError


__all__ = ['EXPERIMENT_KINDS', 'TRAINING_KINDS', 'DEFAULT_CONFIG',
           'CONFIG_SCHEMA', 'ExperimentConfig', 'config_from_dict',
           'read_config_file', 'load_config']


EXPERIMENT_KINDS = ('baseline_ae', 'baseline_vae', 'vq_ae', 'dae_ae',
                    'dae_vae', 'dae_vq', 'width_study', 'oracles', 'diagnose')

# experiment kind -> (model kind, two-stage)
TRAINING_KINDS = {
    'baseline_ae': ('ae', False),
    'baseline_vae': ('vae', False),
    'vq_ae': ('vq', False),
    'dae_ae': ('ae', True),
    'dae_vae': ('vae', True),
    'dae_vq': ('vq', True),
}


DEFAULT_CONFIG = {
    'kind': 'baseline_ae',
    'seed': 0,
    'out_dir': 'daelab-out',
    'replications': 10,
    'n_jobs': 1,
    'data': {
        'num_clusters': 8,
        'radius': 1.,
        'variance': .25,
        'intrinsic_dim': 2,
        'ambient_dim': 10,
        'n_train_per_cluster': 1000,
        'n_test_per_cluster': 200,
    },
    'model': {
        'encoder': {'layer_dims': [10, 128, 128, 2],
                    'hidden_activation': 'tanh',
                    'output_activation': 'identity'},
        'decoder': {'layer_dims': [2, 128, 128, 10],
                    'hidden_activation': 'tanh',
                    'output_activation': 'identity'},
        'beta': 1.,
        'n_codes': 64,
        'beta_commit': .25,
    },
    'training': {
        'epochs': 200,
        'batch_size': 128,
        'lr': 1e-3,
        'beta1': .9,
        'beta2': .999,
        'eps': 1e-8,
        'weak_decoder': {'mode': 'dropout', 'p': .5},
        'split': None,
    },
    'stages': None,
    'analysis': {
        'n_pairs': 4096,
        'knn_k': 1,
        'complexity_every': 0,
        'n_bins': 101,
        'n_eigvals': 20,
        'checkpoint': None,
    },
}


def _obj(properties, required=()):
    return {'type': 'object', 'properties': properties,
            'required': list(required), 'additionalProperties': False}


_POS_INT = {'type': 'integer', 'minimum': 1}
_NONNEG_INT = {'type': 'integer', 'minimum': 0}
_POS_NUM = {'type': 'number', 'exclusiveMinimum': 0}

_MLP_SCHEMA = _obj({
    'layer_dims': {'type': 'array', 'items': _POS_INT, 'minItems': 2},
    'hidden_activation': {'enum': ['tanh', 'relu']},
    'output_activation': {'enum': ['identity', 'tanh', 'relu']},
}, required=['layer_dims'])

_STAGE_SCHEMA = _obj({
    'epochs': _NONNEG_INT,
    'batch_size': _POS_INT,
    'frozen': {'type': 'array', 'items': {'type': 'string'}},
    'weak_decoder_mode': {'enum': list(WEAK_DECODER_MODES)},
    'dropout_p': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
    'seed': _NONNEG_INT,
    'stage': _POS_INT,
}, required=['epochs'])

CONFIG_SCHEMA = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    **_obj({
        'kind': {'enum': list(EXPERIMENT_KINDS)},
        'seed': _NONNEG_INT,
        'out_dir': {'type': 'string', 'minLength': 1},
        'replications': _POS_INT,
        'n_jobs': {'type': 'integer'},
        'data': _obj({
            'num_clusters': _POS_INT,
            'radius': _POS_NUM,
            'variance': {'type': 'number', 'minimum': 0},
            'intrinsic_dim': {'type': 'integer', 'minimum': 2},
            'ambient_dim': _POS_INT,
            'n_train_per_cluster': _POS_INT,
            'n_test_per_cluster': _POS_INT,
        }),
        'model': _obj({
            'encoder': _MLP_SCHEMA,
            'decoder': _MLP_SCHEMA,
            'beta': {'type': 'number', 'minimum': 0},
            'n_codes': _POS_INT,
            'beta_commit': {'type': 'number', 'minimum': 0},
        }),
        'training': _obj({
            'epochs': _NONNEG_INT,
            'batch_size': _POS_INT,
            'lr': _POS_NUM,
            'beta1': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
            'beta2': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
            'eps': _POS_NUM,
            'weak_decoder': _obj({
                'mode': {'enum': ['halved_width', 'dropout']},
                'p': {'type': 'number', 'minimum': 0,
                      'exclusiveMaximum': 1},
            }),
            'split': {'type': ['number', 'null'], 'minimum': 0,
                      'maximum': 1},
        }),
        'stages': {'type': ['array', 'null'], 'items': _STAGE_SCHEMA,
                   'minItems': 1},
        'analysis': _obj({
            'n_pairs': _POS_INT,
            'knn_k': _POS_INT,
            'complexity_every': _NONNEG_INT,
            'n_bins': _POS_INT,
            'n_eigvals': _POS_INT,
            'checkpoint': {'type': ['string', 'null']},
        }),
    }),
}


def _merge(defaults, overrides):
    merged = copy.deepcopy(defaults)
    for k, v in overrides.items():
        if isinstance(v, dict) and isinstance(merged.get(k), dict):
            merged[k] = _merge(merged[k], v)
        else:
            merged[k] = copy.deepcopy(v)
    return merged


def _error_field(error):
    path = '.'.join(str(p) for p in error.absolute_path)
    if error.validator == 'additionalProperties':
        allowed = set(error.schema.get('properties', {}))
        unknown = sorted(set(error.instance) - allowed)
        return tuple('.'.join(filter(None, [path, k])) for k in unknown)
    return (path,)


def _validate_schema(d):
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(d),
                    key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        fields = tuple(f for e in errors for f in _error_field(e))
        raise ConfigError('; '.join(
            '{}: {}'.format('.'.join(str(p) for p in e.absolute_path) or
                            '<root>', e.message)
            for e in errors), field=fields)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration.

    Attributes
    ----------
    kind : str
        one of :data:`EXPERIMENT_KINDS`
    seed : int
        base seed
    out_dir : str
    replications : int
    n_jobs : int
    mixture : MixtureSpec
        data-generating mixture; its ``seed`` is set per run from ``seed``
    n_train_per_cluster, n_test_per_cluster : int
    encoder, decoder : MlpConfig
    model_params : dict
        ``beta``, ``n_codes``, ``beta_commit``
    training : dict
        epochs, batch size, Adam hyperparameters, weak decoder and split
    stages : tuple of StageSchedule or None
        explicit stage schedules overriding ``training``
    analysis : dict
    """
    kind: str
    seed: int
    out_dir: str
    replications: int
    n_jobs: int
    mixture: MixtureSpec
    n_train_per_cluster: int
    n_test_per_cluster: int
    encoder: MlpConfig
    decoder: MlpConfig
    model_params: dict
    training: dict
    stages: tuple
    analysis: dict

    @property
    def model_kind(self):
        return TRAINING_KINDS.get(self.kind, (None, False))[0]

    @property
    def two_stage(self):
        return TRAINING_KINDS.get(self.kind, (None, False))[1]

    def adam_params(self):
        return {k: self.training[k] for k in ('lr', 'beta1', 'beta2', 'eps')}

    def to_dict(self):
        """JSON-serializable form; ``config_from_dict(cfg.to_dict())``
        reproduces ``cfg``."""
        return dict(
            kind=self.kind,
            seed=self.seed,
            out_dir=self.out_dir,
            replications=self.replications,
            n_jobs=self.n_jobs,
            data=dict(
                num_clusters=self.mixture.num_clusters,
                radius=self.mixture.radius,
                variance=self.mixture.variance,
                intrinsic_dim=self.mixture.intrinsic_dim,
                ambient_dim=self.mixture.ambient_dim,
                n_train_per_cluster=self.n_train_per_cluster,
                n_test_per_cluster=self.n_test_per_cluster,
            ),
            model=dict(encoder=self.encoder.to_dict(),
                       decoder=self.decoder.to_dict(),
                       **copy.deepcopy(self.model_params)),
            training=copy.deepcopy(self.training),
            stages=None if self.stages is None else
            [s.to_dict() for s in self.stages],
            analysis=copy.deepcopy(self.analysis),
        )


def _check_dims(d):
    enc = d['model']['encoder']['layer_dims']
    dec = d['model']['decoder']['layer_dims']
    ambient = d['data']['ambient_dim']
    if enc[-1] != dec[0]:
        raise ConfigError(
            'encoder output width {} differs from decoder input width '
            '{}'.format(enc[-1], dec[0]),
            field=('model.encoder.layer_dims[-1]',
                   'model.decoder.layer_dims[0]'))
    if enc[0] != ambient:
        raise ConfigError(
            'encoder input width {} differs from data.ambient_dim '
            '{}'.format(enc[0], ambient),
            field=('model.encoder.layer_dims[0]', 'data.ambient_dim'))
    if dec[-1] != ambient:
        raise ConfigError(
            'decoder output width {} differs from data.ambient_dim '
            '{}'.format(dec[-1], ambient),
            field=('model.decoder.layer_dims[-1]', 'data.ambient_dim'))


def config_from_dict(d):
    """Merge ``d`` into the defaults, validate and build the typed view.

    Raises
    ------
    ConfigError
        naming the offending field(s) if the configuration is invalid
    """
    if not isinstance(d, dict):
        raise ConfigError('configuration must be a JSON object')
    d = _merge(DEFAULT_CONFIG, d)
    _validate_schema(d)
    _check_dims(d)

    kind = d['kind']
    model_kind, two_stage = TRAINING_KINDS.get(kind, (None, False))
    enc_dims = d['model']['encoder']['layer_dims']
    vae_kinds = ('baseline_vae', 'dae_vae', 'width_study')
    if kind in vae_kinds and len(enc_dims) < 3:
        raise ConfigError('VAE encoders need at least one hidden layer',
                          field='model.encoder.layer_dims')
    if two_stage and d['stages'] is None and d['training']['split'] is None \
            and d['training']['epochs'] % 2 != 0:
        raise ConfigError('two-stage training with an equal split needs an '
                          'even number of epochs',
                          field='training.epochs')
    if two_stage and d['stages'] is not None and len(d['stages']) != 2:
        raise ConfigError('two-stage training needs exactly 2 stages, got '
                          '{}'.format(len(d['stages'])), field='stages')
    if kind == 'diagnose' and not d['analysis']['checkpoint']:
        raise ConfigError('diagnose needs a checkpoint path',
                          field='analysis.checkpoint')

    data = d['data']
    try:
        mixture = MixtureSpec(
            num_clusters=data['num_clusters'], radius=data['radius'],
            variance=data['variance'], intrinsic_dim=data['intrinsic_dim'],
            ambient_dim=data['ambient_dim'])
        encoder = MlpConfig(**d['model']['encoder'])
        decoder = MlpConfig(**d['model']['decoder'])
        stages = None if d['stages'] is None else \
            tuple(StageSchedule(**s) for s in d['stages'])
    except ContractError as e:
        raise ConfigError(str(e), field=('data', 'model', 'stages')) from e

    return ExperimentConfig(
        kind=kind, seed=d['seed'], out_dir=d['out_dir'],
        replications=d['replications'], n_jobs=d['n_jobs'],
        mixture=mixture,
        n_train_per_cluster=data['n_train_per_cluster'],
        n_test_per_cluster=data['n_test_per_cluster'],
        encoder=encoder, decoder=decoder,
        model_params={k: d['model'][k]
                      for k in ('beta', 'n_codes', 'beta_commit')},
        training=d['training'], stages=stages, analysis=d['analysis'],
    )


def read_config_file(path):
    """Parse a JSON configuration file without validating it.

    Parameters
    ----------
    path : str or None
        if ``None`` an empty configuration (all defaults) is returned

    Returns
    -------
    d : dict

    Raises
    ------
    ConfigError
        if the file cannot be read, is not JSON or not a JSON object
    """
    if path is None:
        return dict()
    try:
        with open(path) as f:
            d = json.load(f)
    except OSError as e:
        raise ConfigError('cannot read {}: {}'.format(path, e)) from e
    except json.JSONDecodeError as e:
        raise ConfigError('{} is not valid JSON: {}'.format(path, e)) from e
    if not isinstance(d, dict):
        raise ConfigError('configuration must be a JSON object')
    return d


def load_config(path, seed=None, out_dir=None, replications=None):
    """Read and validate a JSON configuration file.

    Parameters
    ----------
    path : str or None
        if ``None`` the defaults are used
    seed, out_dir, replications : optional
        override the corresponding top-level entries

    Returns
    -------
    config : ExperimentConfig
    """
    d = read_config_file(path)
    for key, value in (('seed', seed), ('out_dir', out_dir),
                       ('replications', replications)):
        if value is not None:
            d[key] = value
    return config_from_dict(d)
