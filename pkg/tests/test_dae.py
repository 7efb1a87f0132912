import numpy as np
import pytest

from numpy.testing import assert_raises, assert_array_equal

from daelab.models import MlpConfig, save_checkpoint, load_checkpoint
from daelab.training import StageSchedule, build_aux_decoder, \
    dae_schedules, dae_stage_one, dae_stage_two, run_dae, run_baseline, \
    TRAIN_LOG_COLUMNS
from daelab.util import ContractError

from testtools import tiny_model, tiny_datasets


def test_build_aux_decoder():
    ref = MlpConfig((2, 7, 6, 4))
    aux, p = build_aux_decoder(ref, 'halved_width')
    assert aux.layer_dims == (2, 4, 3, 4)
    assert p == 0
    assert aux.hidden_activation == ref.hidden_activation

    aux, p = build_aux_decoder(ref, 'dropout', p=.3)
    assert aux == ref
    assert p == .3

    assert_raises(ContractError, build_aux_decoder, ref, 'dropout', 1.)
    assert_raises(ContractError, build_aux_decoder, ref, 'none')


def test_dae_schedules():
    s1, s2 = dae_schedules(10, 'dropout', .4, seed=3)
    assert (s1.epochs, s2.epochs) == (5, 5)
    assert (s1.stage, s2.stage) == (1, 2)
    assert (s1.seed, s2.seed) == (3, 4)
    assert s1.weak_decoder_mode == 'dropout'
    assert s1.dropout_p == .4
    assert s2.weak_decoder_mode == 'none'

    s1, s2 = dae_schedules(10, 'halved_width', split=.3)
    assert (s1.epochs, s2.epochs) == (3, 7)
    s1, s2 = dae_schedules(10, 'halved_width', split=1.)
    assert s2.epochs == 0

    assert_raises(ContractError, dae_schedules, 9)
    assert_raises(ContractError, dae_schedules, 10, 'none')
    assert_raises(ContractError, dae_schedules, 10, split=1.5)


def test_stage_one_halved_width_replaces_decoder():
    train, _ = tiny_datasets()
    model = tiny_model('ae', hidden=6)
    s1, _ = dae_schedules(4, 'halved_width', batch_size=16)
    model, log, reference = dae_stage_one(model, train, s1)
    assert reference.layer_dims == (2, 6, 4)
    assert model.decoder_config.layer_dims == (2, 3, 4)
    assert len(log) == 2

    stage1 = StageSchedule(epochs=1, weak_decoder_mode='none')
    assert_raises(ContractError, dae_stage_one, tiny_model('ae'), train,
                  stage1)


@pytest.mark.parametrize('kind', ['ae', 'vae', 'vq'])
@pytest.mark.parametrize('mode', ['halved_width', 'dropout'])
def test_stage_two_freezes_everything_but_decoder(kind, mode):
    train, _ = tiny_datasets()
    model = tiny_model(kind)
    s1, s2 = dae_schedules(4, mode, batch_size=16)
    model, _, reference = dae_stage_one(model, train, s1, lr=1e-2)
    after_stage_one = {g: model.group_checksum(g) for g in model.groups}

    model, log = dae_stage_two(model, train, s2, reference, mode, lr=1e-2)
    assert model.decoder_config == reference
    for g in model.groups:
        if g == 'decoder':
            assert model.group_checksum(g) != after_stage_one[g]
        else:
            assert model.group_checksum(g) == after_stage_one[g], g
    assert_array_equal(log['stage'], [2, 2])


def test_run_dae():
    train, _ = tiny_datasets()
    model = tiny_model('vae')
    model, log = run_dae(model, train, total_epochs=6,
                         weak_decoder_mode='dropout', batch_size=16, seed=2,
                         lr=1e-2)
    assert list(log.columns) == TRAIN_LOG_COLUMNS
    assert_array_equal(log['stage'], [1, 1, 1, 2, 2, 2])
    assert_array_equal(log['epoch'], [1, 2, 3, 1, 2, 3])
    assert model.decoder_dropout == 0
    assert np.all(np.isfinite(log['recon_loss']))


def test_run_dae_explicit_schedules():
    train, _ = tiny_datasets()
    schedules = (StageSchedule(epochs=1, weak_decoder_mode='halved_width',
                               stage=1),
                 StageSchedule(epochs=3, stage=2))
    _, log = run_dae(tiny_model('ae'), train, schedules=schedules)
    assert_array_equal(log['stage'], [1, 2, 2, 2])


def test_run_dae_is_deterministic():
    train, _ = tiny_datasets()
    results = []
    for _ in range(2):
        model, log = run_dae(tiny_model('vq', seed=1), train, total_epochs=4,
                             batch_size=16, seed=5)
        results.append((log.drop(columns='seconds'),
                        [model.group_checksum(g) for g in model.groups]))
    assert results[0][0].equals(results[1][0])
    assert results[0][1] == results[1][1]


@pytest.mark.parametrize('kind', ['ae', 'vae', 'vq'])
@pytest.mark.parametrize('mode', ['dropout', 'halved_width'])
def test_stage_two_from_checkpoint_is_bit_exact(kind, mode, tmpdir):
    train, _ = tiny_datasets()
    s1, s2 = dae_schedules(4, mode, batch_size=16, seed=3)
    model, _, reference = dae_stage_one(tiny_model(kind), train, s1,
                                        lr=1e-2)
    path = str(tmpdir.join('stage1.json'))
    save_checkpoint(model, path)
    restored = load_checkpoint(path)

    model, log = dae_stage_two(model, train, s2, reference, mode, lr=1e-2)
    restored, restored_log = dae_stage_two(restored, train, s2, reference,
                                           mode, lr=1e-2)
    assert log.drop(columns='seconds').equals(
        restored_log.drop(columns='seconds'))
    for g in model.groups:
        assert model.group_checksum(g) == restored.group_checksum(g), g


def _assert_progress(log):
    # median loss over the last tenth of each stage below the first tenth
    for stage, rows in log.groupby('stage'):
        loss = rows['recon_loss'].values
        m = max(1, len(loss) // 10)
        assert np.median(loss[-m:]) < np.median(loss[:m]), stage


@pytest.mark.parametrize('kind', ['ae', 'vae'])
def test_training_makes_progress(kind):
    train, _ = tiny_datasets()
    _, log = run_dae(tiny_model(kind), train, total_epochs=40,
                     weak_decoder_mode='halved_width', batch_size=16,
                     lr=1e-2)
    assert_array_equal(np.unique(log['stage']), [1, 2])
    _assert_progress(log)

    _, log = run_baseline(tiny_model(kind), train, epochs=20, batch_size=16,
                          lr=1e-2)
    _assert_progress(log)
