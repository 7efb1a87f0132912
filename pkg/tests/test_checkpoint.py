import json
import os

import numpy as np
import pytest

from numpy.testing import assert_raises, assert_array_equal

from daelab.models import save_checkpoint, load_checkpoint, model_to_dict, \
    model_from_dict, CHECKPOINT_FORMAT
from daelab.util import ContractError

from testtools import tiny_model, rng


@pytest.mark.parametrize('kind', ['ae', 'vae', 'vq'])
def test_checkpoint_is_bit_exact(kind, tmpdir):
    model = tiny_model(kind, seed=5)
    # values that decimal printing would not preserve
    model.set_parameter('decoder/b0', rng(0).normal(size=5) / 3)
    model.decoder_dropout = .25
    path = save_checkpoint(model, str(tmpdir.join('sub', 'ckpt.json')))
    assert os.path.exists(path)

    loaded = load_checkpoint(path)
    assert type(loaded) is type(model)
    assert loaded.decoder_dropout == .25
    assert loaded.config_dict() == model.config_dict()
    for g in model.groups:
        assert loaded.group_checksum(g) == model.group_checksum(g)
    x = rng(1).normal(size=(3, 4))
    assert_array_equal(loaded.encode(x), model.encode(x))


def test_checkpoint_format(tmpdir):
    model = tiny_model('ae')
    path = save_checkpoint(model, str(tmpdir.join('ckpt.json')))
    with open(path) as f:
        d = json.load(f)
    assert d['format'] == CHECKPOINT_FORMAT
    assert d['config']['kind'] == 'ae'
    W = d['parameters']['encoder/W0']
    assert W['shape'] == [5, 4]
    assert float.fromhex(W['data'][0]) == model.get_parameter(
        'encoder/W0')[0, 0]


def test_checkpoint_errors():
    d = model_to_dict(tiny_model('ae'))
    bad = dict(d, format='other')
    assert_raises(ContractError, model_from_dict, bad)

    d['parameters'].pop('decoder/b1')
    with assert_raises(ContractError) as cm:
        model_from_dict(d)
    assert 'decoder/b1' in str(cm.exception)


def test_vq_checkpoint_keeps_codebook_size():
    model = tiny_model('vq', n_codes=9, beta_commit=.5)
    loaded = model_from_dict(model_to_dict(model))
    assert loaded.n_codes == 9
    assert loaded.beta_commit == .5
    assert_array_equal(loaded.codebook, model.codebook)
    assert not np.shares_memory(loaded.codebook, model.codebook)
