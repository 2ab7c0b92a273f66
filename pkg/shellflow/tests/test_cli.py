from __future__ import absolute_import, division, print_function

import json
import os

import pytest

import numpy as np
import pandas as pd

from shellflow.cli import OPTIONS, main, parse_options, viscosity_grid
from shellflow.initial import INITIAL_KINDS
from shellflow.manifest import read_manifest
from shellflow.utils import filetext, tmpfile


def read(path):
    with open(path, 'rb') as f:
        return f.read()


def test_simulate_writes_run_directory():
    with tmpfile() as out:
        assert main(['simulate', '--c', '2', '--nu', '0.1', '--f0', '1',
                     '--shells', '12', '--t-end', '5', '--init', 'zero',
                     '--out', out]) == 0
        assert sorted(os.listdir(out)) == ['final_state.json',
                                           'manifest.json', 'series.csv']
        df = pd.read_csv(os.path.join(out, 'series.csv'))
        assert np.all(np.diff(df.t) > 0)
        assert list(df.columns[:5]) == ['t', 'E', 'H1_sq', 'injection',
                                        'Pi_0']
        manifest = read_manifest(out)
        assert manifest.command == 'simulate'
        assert manifest.params['n_shells'] == 12
        assert manifest.checks == {'positivity': True,
                                   'energy_inequality': True}


def test_simulate_from_fixed_point_stays_there():
    with tmpfile() as out:
        assert main(['simulate', '--nu', '0.1', '--t-end', '5',
                     '--rel-tol', '1e-10', '--init', 'fixed-point',
                     '--out', out]) == 0
        df = pd.read_csv(os.path.join(out, 'series.csv'))
        assert (df.b_norm < 1e-8).all()


def test_simulate_inviscid_energy_grows():
    with tmpfile() as out:
        assert main(['simulate', '--nu', '0', '--shells', '4',
                     '--t-end', '10', '--init', 'zero', '--out', out]) == 0
        df = pd.read_csv(os.path.join(out, 'series.csv'))
        assert np.all(np.diff(df.E) > 0)
        assert 'b_norm' not in df.columns


def test_simulate_json_full_state():
    with tmpfile() as out:
        assert main(['simulate', '--shells', '3', '--t-end', '1',
                     '--format', 'json', '--full-state', '--init', 'random',
                     '--seed', '5', '--out', out]) == 0
        with open(os.path.join(out, 'series.json')) as f:
            doc = json.load(f)
        assert 'a_3' in doc['columns']
        assert read_manifest(out).seed == 5


def test_simulate_refuses_non_empty_out():
    with tmpfile() as out:
        args = ['simulate', '--shells', '3', '--t-end', '1', '--out', out]
        assert main(args) == 0
        assert main(args) == 1
        assert main(args + ['--force']) == 0



def test_init_help_names_every_kind():
    init = dict((o.name, o) for o in OPTIONS['simulate'])['init']
    assert all(kind in init.help for kind in INITIAL_KINDS)


@pytest.mark.parametrize('kind', [k for k in INITIAL_KINDS if k != 'file'])
def test_simulate_every_named_kind(kind, capsys):
    with tmpfile() as out:
        assert main(['simulate', '--shells', '4', '--t-end', '1',
                     '--init', kind, '--seed', '0', '--out', out]) == 0


@pytest.mark.parametrize('args', [['--c', '3'], ['--nu', '-1'],
                                  ['--init', 'random'], ['--init', 'file'],
                                  ['--init', 'gaussian'], ['--bogus', '1'],
                                  ['--scheme', 'euler']])
def test_simulate_bad_input(args, capsys):
    with tmpfile() as out:
        assert main(['simulate', '--t-end', '1', '--out', out] + args) == 1
    assert capsys.readouterr().err


def test_simulate_from_state_file():
    with filetext('{"t": 0, "a": [1, 0.5, 0.25, 0.125]}',
                  extension='json') as state:
        with tmpfile() as out:
            assert main(['simulate', '--shells', '3', '--t-end', '1',
                         '--init', 'file', '--state', state,
                         '--out', out]) == 0
            df = pd.read_csv(os.path.join(out, 'series.csv'))
            assert df.E.iloc[0] == 0.5 * (1 + 0.25 + 0.0625 + 0.015625)


def test_config_file_layers_under_flags():
    with filetext('nu = 0.5\nt-end = 1\nshells = 3\n',
                  extension='cfg') as cfg:
        command, options = parse_options(['simulate', '--config', cfg,
                                          '--nu', '0.2'])
    assert command == 'simulate'
    assert options['nu'] == 0.2
    assert options['t_end'] == 1.0
    assert options['shells'] == 3
    assert options['f0'] == 1.0


def test_config_file_rejects_unknown_keys():
    with filetext('[shellflow]\nviscosity = 0.5\n', extension='cfg') as cfg:
        with tmpfile() as out:
            assert main(['simulate', '--config', cfg, '--out', out]) == 1


def test_out_dir_from_environment(monkeypatch):
    with tmpfile() as root:
        monkeypatch.setenv('SHELLFLOW_OUT_DIR', root)
        assert main(['simulate', '--shells', '3', '--t-end', '1',
                     '--out', 'run1']) == 0
        assert os.path.exists(os.path.join(root, 'run1', 'manifest.json'))


def test_rerun_is_bit_identical():
    with tmpfile() as first:
        with tmpfile() as second:
            assert main(['simulate', '--shells', '6', '--t-end', '2',
                         '--init', 'random', '--seed', '11',
                         '--out', first]) == 0
            assert main(['rerun', first, '--out', second]) == 0
            for name in ('series.csv', 'final_state.json'):
                assert read(os.path.join(first, name)) == \
                    read(os.path.join(second, name))
            assert read_manifest(second).seed == 11


def test_rerun_needs_out():
    with tmpfile() as first:
        assert main(['simulate', '--shells', '3', '--t-end', '1',
                     '--out', first]) == 0
        assert main(['rerun', first]) == 1


def steady_doc(args, capsys):
    assert main(['steady'] + args) == 0
    return json.loads(capsys.readouterr().out)


def test_steady_inviscid(capsys):
    doc = steady_doc(['--c', '2', '--nu', '0', '--f0', '1'], capsys)
    assert all(x == 1 for x in doc['A'])
    assert doc['residual'] < 1e-14
    assert doc['J'] is None
    assert doc['warnings'] == []


def test_steady_unproven_range(capsys):
    doc = steady_doc(['--c', '1.4', '--nu', '0.1'], capsys)
    assert doc['warnings'] == ['c outside (3/2,5/2]: monotonicity unproven']


def test_steady_newton_check(capsys):
    doc = steady_doc(['--c', '2', '--nu', '0.01', '--newton-check'], capsys)
    checks = doc['checks']
    assert checks['newton_agreement'] is True
    assert checks['monotonic'] and checks['decay_bound']


def test_steady_writes_document(capsys):
    with tmpfile() as out:
        assert main(['steady', '--nu', '0.1', '--out', out]) == 0
        with open(os.path.join(out, 'steady.json')) as f:
            assert json.load(f)['mu'] > 0
        assert read_manifest(out).command == 'steady'


def test_viscosity_grid():
    assert viscosity_grid({'nu_list': '0.1, 0.01'}) == [0.1, 0.01]
    assert viscosity_grid({'nu_decades': '2:4'}) == [1e-2, 1e-3, 1e-4]


@pytest.mark.parametrize('args', [['--nu-list', ''], [],
                                  ['--nu-list', '0.1', '--nu-decades', '1:2'],
                                  ['--nu-list', '0.01,0.1'],
                                  ['--nu-decades', 'a:b'],
                                  ['--jobs', '0', '--nu-list', '0.1']])
def test_sweep_bad_grid(args):
    with tmpfile() as out:
        assert main(['sweep', '--out', out] + args) == 1


def test_sweep_is_deterministic_across_jobs():
    with tmpfile() as serial:
        with tmpfile() as parallel:
            args = ['sweep', '--c', '2', '--f0', '1', '--nu-list', '0.5,0.2',
                    '--t-end', '20']
            assert main(args + ['--jobs', '1', '--out', serial]) == 0
            assert main(args + ['--jobs', '4', '--out', parallel]) == 0
            summary = read(os.path.join(serial, 'summary.csv'))
            assert summary == read(os.path.join(parallel, 'summary.csv'))
            df = pd.read_csv(os.path.join(serial, 'summary.csv'))
            assert list(df.nu) == [0.5, 0.2]
            assert sorted(os.listdir(serial)) == ['manifest.json',
                                                  'point-00', 'point-01',
                                                  'summary.csv']


def test_sweep_points_rerun_from_their_manifests():
    with tmpfile() as out:
        with tmpfile() as again:
            assert main(['sweep', '--nu-list', '0.5', '--t-end', '20',
                         '--out', out]) == 0
            point = os.path.join(out, 'point-00')
            assert main(['rerun', point, '--out', again]) == 0
            assert read(os.path.join(point, 'series.csv')) == \
                read(os.path.join(again, 'series.csv'))


@pytest.mark.slow
def test_verify_quick(capsys):
    assert main(['verify', '--quick']) == 0
    assert 'FAIL' not in capsys.readouterr().out


@pytest.mark.slow
def test_verify_detects_flux_mutation(capsys):
    assert main(['verify', '--quick', '--mutate', 'flux']) == 2
    assert 'FAIL' in capsys.readouterr().out


@pytest.mark.slow
def test_five_decade_sweep(capsys):
    with tmpfile() as out:
        assert main(['sweep', '--c', '2', '--f0', '1', '--nu-decades', '1:5',
                     '--jobs', '4', '--out', out]) == 0
        df = pd.read_csv(os.path.join(out, 'summary.csv'))
        last = df.iloc[-1]
        assert abs(last.avg_dissipation - last.epsilon_d) <= \
            0.05 * last.epsilon_d
