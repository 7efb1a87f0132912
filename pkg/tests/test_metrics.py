import numpy as np
import xarray as xr

from numpy.testing import assert_array_equal, assert_allclose

from daelab.metrics import *


CONFIGS = ['a', 'b']


def _setup_ds(n_reps=4, failed=None):
    ds = xr.Dataset(coords=dict(config=CONFIGS))
    np.random.seed(0)
    for v in ['latent_accuracy', 'reconstruction_accuracy']:
        ds[v] = xr.DataArray(np.random.uniform(0, 1, size=(2, n_reps)),
                             dims=('config', 'rep'))
    for v in ['c_lip_encoder', 'c_lip_decoder']:
        ds[v] = xr.DataArray(np.random.uniform(0, 3, size=(2, n_reps)),
                             dims=('config', 'rep'))
    if failed is None:
        failed = np.zeros((2, n_reps), dtype=bool)
    ds['failed'] = xr.DataArray(failed, dims=('config', 'rep'))
    return ds


def test_mk_accuracyPercent():
    ds = _setup_ds()
    e = mk_accuracyPercent(ds, 'latent')
    assert np.all(0 <= e.values) and np.all(e.values <= 100)
    assert_allclose(mk_accuracyPercent(ds, 'reconstruction'),
                    100 * ds.reconstruction_accuracy)


def test_mk_complexityDeviation():
    ds = _setup_ds()
    e = mk_complexityDeviation(ds)
    assert np.all(e.values >= 0)
    ds['c_lip_encoder'][:] = 1
    ds['c_lip_decoder'][:] = 1
    assert np.all(mk_complexityDeviation(ds).values == 0)


def test_mk_pairedDifference():
    ds = _setup_ds()
    diff = mk_pairedDifference(ds.latent_accuracy, 'a', 'b')
    assert diff.dims == ('rep',)
    assert_allclose(diff.values, ds.latent_accuracy.values[0]
                    - ds.latent_accuracy.values[1])


def test_mk_winCount():
    diff = xr.DataArray([1., 0., -1., np.nan, 2.], dims=('rep',))
    # ties and NaN are not wins
    assert mk_winCount(diff) == 2


def test_mk_validReps():
    failed = np.zeros((2, 4), dtype=bool)
    failed[1, 2] = True
    ds = _setup_ds(failed=failed)
    assert_array_equal(mk_validReps(ds), [True, True, False, True])
