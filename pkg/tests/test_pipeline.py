import numpy as np

from numpy.testing import assert_array_equal

from daelab.experiments import config_from_dict, derive_seeds, \
    make_datasets, make_model, train_model, evaluate_model, make_trace

from testtools import tiny_config_dict


def _setup(kind='baseline_ae', **extra):
    config = config_from_dict(tiny_config_dict(kind, **extra))
    seeds = derive_seeds(config.seed)
    train, test = make_datasets(config, seeds)
    return config, seeds, train, test


def test_derive_seeds():
    seeds = derive_seeds(3)
    assert seeds == derive_seeds(3)
    assert seeds['base'] == 3
    assert len({seeds['data'], seeds['init'], seeds['train']}) == 3
    assert derive_seeds(4) != seeds


def test_make_datasets():
    config, seeds, train, test = _setup()
    assert train.points.shape == (4 * 15, 4)
    assert test.points.shape == (4 * 5, 4)
    _, _, train2, _ = _setup()
    assert_array_equal(train.points, train2.points)


def test_make_model_defaults_and_overrides():
    config, seeds, _, _ = _setup('baseline_vae')
    model = make_model(config, seeds)
    assert model.kind == 'vae'
    assert make_model(config, seeds, 'vq').kind == 'vq'


def test_train_model_explicit_stages():
    stages = [dict(epochs=1, frozen=['decoder']),
              dict(epochs=2, frozen=['decoder'], stage=2)]
    config, seeds, train, _ = _setup(stages=stages)
    model = make_model(config, seeds)
    decoder = model.group_checksum('decoder')
    encoder = model.group_checksum('encoder')
    model, log = train_model(config, model, train, seeds)
    assert list(log.stage) == [1, 2, 2]
    assert list(log.epoch) == [1, 1, 2]
    assert model.group_checksum('decoder') == decoder
    assert model.group_checksum('encoder') != encoder


def test_train_model_two_stage():
    config, seeds, train, _ = _setup('dae_ae', epochs=4)
    trace = make_trace(config, train, seeds)
    model, log = train_model(config, make_model(config, seeds), train, seeds,
                             trace=trace)
    assert list(log.stage) == [1, 1, 2, 2]
    assert list(trace.to_frame().stage) == [1, 1, 2, 2]


def test_evaluate_model():
    config, seeds, train, test = _setup('vq_ae')
    model = make_model(config, seeds)
    analysis = evaluate_model(config, model, train, test, seeds)
    assert set(analysis) == {'knn', 'complexity', 'codebook'}
    assert analysis['knn']['k'] == 1
    assert 0 <= analysis['knn']['latent_accuracy'] <= 1
    assert analysis['complexity']['seed'] == seeds['base']
    assert np.isfinite(analysis['complexity']['c_lip_encoder'])

    config, seeds, train, test = _setup('baseline_ae')
    analysis = evaluate_model(config, make_model(config, seeds), train, test,
                              seeds)
    assert 'codebook' not in analysis
