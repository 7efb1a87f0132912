import json
import os

import numpy as np
import pandas as pd
import xarray as xr

from unittest.mock import patch

from daelab.experiments import EXIT_OK, EXIT_FAILURE, EXIT_CONFIG, \
    EXIT_NUMERIC, EXIT_ACCEPTANCE, METRICS_COLUMNS, OracleReport, \
    WidthStudyResult, derive_seeds, error_record, resolve_config, \
    run_experiment, sha256_file
from daelab.models import load_checkpoint
from daelab.util import ConfigError, NumericError

from testtools import tiny_config_dict


TRAINING_ARTIFACTS = ['analysis.json', 'checkpoint.json', 'complexity.csv',
                      'metrics.csv', 'train_log.csv']


def _read(out, name):
    with open(os.path.join(str(out), name)) as f:
        return f.read()


def _manifest(out):
    return json.loads(_read(out, 'manifest.json'))


def test_baseline_run_writes_artifacts(tmpdir):
    out = tmpdir.join('ae')
    assert run_experiment(tiny_config_dict(out_dir=out)) == EXIT_OK
    for name in TRAINING_ARTIFACTS + ['manifest.json']:
        assert out.join(name).check()
    assert not out.join('error.json').check()

    metrics = pd.read_csv(str(out.join('metrics.csv')))
    assert list(metrics.columns) == METRICS_COLUMNS
    assert len(metrics) == 1
    assert 0 <= metrics.latent_accuracy[0] <= 1

    trace = pd.read_csv(str(out.join('complexity.csv')))
    assert list(trace.epoch) == [1, 2]

    model = load_checkpoint(str(out.join('checkpoint.json')))
    assert model.kind == 'ae'


def test_manifest(tmpdir):
    out = tmpdir.join('ae')
    run_experiment(tiny_config_dict(out_dir=out, seed=4))
    manifest = _manifest(out)
    assert [a['name'] for a in manifest['artifacts']] == TRAINING_ARTIFACTS
    for a in manifest['artifacts']:
        path = str(out.join(a['name']))
        assert a['sha256'] == sha256_file(path)
        assert a['bytes'] == os.path.getsize(path)
    assert manifest['seeds'] == derive_seeds(4)
    assert manifest['config']['seed'] == 4
    assert manifest['config']['kind'] == 'baseline_ae'
    assert manifest['summary']['status'] == 'pass'
    assert manifest['summary']['exit_code'] == EXIT_OK
    assert manifest['wall_clock_seconds'] >= 0
    assert {'daelab', 'python', 'numpy'} <= set(manifest['versions'])


def test_runs_are_deterministic(tmpdir):
    for name in ('a', 'b'):
        run_experiment(tiny_config_dict('dae_ae', out_dir=tmpdir.join(name)))
    for artifact in ('metrics.csv', 'complexity.csv', 'analysis.json',
                     'checkpoint.json'):
        assert _read(tmpdir.join('a'), artifact) == \
            _read(tmpdir.join('b'), artifact)


def test_vq_run_reports_codebook(tmpdir):
    out = tmpdir.join('vq')
    assert run_experiment(tiny_config_dict('dae_vq', out_dir=out)) == EXIT_OK
    analysis = json.loads(_read(out, 'analysis.json'))
    assert 'codebook' in analysis
    trace = pd.read_csv(str(out.join('complexity.csv')))
    assert list(trace.stage) == [1, 2]


def test_config_error_names_both_fields(tmpdir):
    out = tmpdir.join('bad')
    d = tiny_config_dict(out_dir=out)
    d['model']['decoder']['layer_dims'] = [3, 6, 4]
    assert run_experiment(d) == EXIT_CONFIG

    error = json.loads(_read(out, 'error.json'))
    assert error['error'] == 'ConfigError'
    assert error['exit_code'] == EXIT_CONFIG
    assert error['field'] == ['model.encoder.layer_dims[-1]',
                              'model.decoder.layer_dims[0]']
    manifest = _manifest(out)
    assert manifest['config'] is None
    assert manifest['summary']['status'] == 'fail'
    assert manifest['summary']['exit_code'] == EXIT_CONFIG
    assert [a['name'] for a in manifest['artifacts']] == ['error.json']
    assert not out.join('checkpoint.json').check()


def test_unreadable_config_file(tmpdir):
    path = tmpdir.join('broken.json')
    path.write('{"kind": ')
    out = tmpdir.join('out')
    assert run_experiment(str(path), out_dir=str(out)) == EXIT_CONFIG
    assert out.join('error.json').check()


def test_numeric_abort(tmpdir):
    out = tmpdir.join('nan')
    error = NumericError('reconstruction loss is inf', op='reconstruction',
                         location=dict(stage=1, epoch=2, batch=3))
    with patch('daelab.experiments.runner.train_model', side_effect=error):
        code = run_experiment(tiny_config_dict(out_dir=out))
    assert code == EXIT_NUMERIC
    record = json.loads(_read(out, 'error.json'))
    assert record['op'] == 'reconstruction'
    assert record['location'] == dict(stage=1, epoch=2, batch=3)
    manifest = _manifest(out)
    assert manifest['summary']['exit_code'] == EXIT_NUMERIC
    assert manifest['config']['kind'] == 'baseline_ae'


def test_unexpected_error(tmpdir):
    out = tmpdir.join('boom')
    with patch('daelab.experiments.runner.train_model',
               side_effect=RuntimeError('boom')):
        assert run_experiment(tiny_config_dict(out_dir=out)) == EXIT_FAILURE
    assert json.loads(_read(out, 'error.json'))['message'] == 'boom'


def test_diagnose(tmpdir):
    trained = tmpdir.join('trained')
    run_experiment(tiny_config_dict('baseline_vae', out_dir=trained))
    out = tmpdir.join('diagnose')
    code = run_experiment(tiny_config_dict('diagnose', out_dir=out),
                          checkpoint=str(trained.join('checkpoint.json')))
    assert code == EXIT_OK
    analysis = json.loads(_read(out, 'analysis.json'))
    assert analysis['checkpoint']['kind'] == 'vae'
    # same seeds, same data: the probe sees the trained model unchanged
    original = json.loads(_read(trained, 'analysis.json'))
    assert analysis['knn'] == original['knn']
    assert analysis['complexity'] == original['complexity']
    metrics = pd.read_csv(str(out.join('metrics.csv')))
    assert np.isnan(metrics.final_recon_loss[0])


def test_diagnose_missing_checkpoint(tmpdir):
    out = tmpdir.join('diagnose')
    code = run_experiment(tiny_config_dict('diagnose', out_dir=out),
                          checkpoint=str(tmpdir.join('missing.json')))
    assert code == EXIT_CONFIG
    assert json.loads(_read(out, 'error.json'))['field'] == \
        ['analysis.checkpoint']


def test_oracle_failure_exit_code(tmpdir):
    report = OracleReport(dict(truncation_peak=dict(
        passed=False, residual=1., tolerance=0., inputs=dict())))
    out = tmpdir.join('oracles')
    with patch('daelab.experiments.runner.run_oracle_suite',
               return_value=report):
        code = run_experiment(tiny_config_dict('oracles', out_dir=out))
    assert code == EXIT_ACCEPTANCE
    assert json.loads(_read(out, 'oracles.json'))['failed'] == \
        ['truncation_peak']
    assert _manifest(out)['summary']['failed_checks'] == ['truncation_peak']


def _width_study_result(passed_check, n_failed=0):
    ds = xr.Dataset(dict(latent_accuracy=(('config', 'rep'),
                                          np.full((1, 2), .5))),
                    coords=dict(config=['vae_64_128'], rep=[0, 1]))
    check = dict(name='latent_width_ordering', passed=passed_check,
                 hard=True)
    return WidthStudyResult(results=ds, summary=pd.DataFrame(dict(n=[2])),
                            checks=[check], n_failed=n_failed)


def test_width_study_exit_codes(tmpdir):
    for name, result, expected in (
            ('pass', _width_study_result(True), EXIT_OK),
            ('checks', _width_study_result(False), EXIT_ACCEPTANCE),
            ('aborted', _width_study_result(True, 1), EXIT_NUMERIC)):
        out = tmpdir.join(name)
        with patch('daelab.experiments.runner.run_width_study',
                   return_value=result):
            code = run_experiment(tiny_config_dict('width_study',
                                                   out_dir=out))
        assert code == expected
        for artifact in ('width_study.nc', 'width_study_summary.csv',
                         'width_study.json', 'manifest.json'):
            assert out.join(artifact).check()


def test_resolve_config_overrides():
    config = resolve_config(tiny_config_dict(), seed=9, kind='dae_ae',
                            checkpoint='ckpt.json')
    assert config.seed == 9
    assert config.kind == 'dae_ae'
    assert config.analysis['checkpoint'] == 'ckpt.json'
    # an ExperimentConfig passes through
    assert resolve_config(config) == config


def test_error_record():
    record = error_record(ConfigError('bad', field='a.b'), EXIT_CONFIG)
    assert record == dict(error='ConfigError', message='bad',
                          exit_code=EXIT_CONFIG, field=['a.b'], op=None,
                          location={})
