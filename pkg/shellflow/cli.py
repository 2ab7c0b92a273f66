""" Command line front end

    shellflow simulate --c 2 --nu 0.1 --shells 12 --t-end 50 --out run1
    shellflow steady --c 2 --nu 0.01 --newton-check
    shellflow sweep --c 2 --nu-decades 1:4 --jobs 4 --out sweep1
    shellflow verify --quick
    shellflow rerun run1/manifest.json --out run1-again

Options come from built-in defaults, then ``--config FILE`` (``key = value``
lines with the long flag names), then the flags themselves.  Relative
``--out`` directories live under ``$SHELLFLOW_OUT_DIR`` when it is set.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure or
failed checks.
"""
from __future__ import absolute_import, division, print_function

import argparse
import os
import shutil
import sys
from collections import namedtuple
from configparser import ConfigParser, Error as ConfigError
from warnings import catch_warnings, simplefilter

import pandas as pd
from toolz import merge

from .backends.json import dumps
from .convert import convert
from .experiments import sweep_config, sweep_points
from .initial import INITIAL_KINDS, initial_state
from .integrate import (SCHEMES, IntegratorConfig, energy_inequality_bound,
                        energy_inequality_check, integrate,
                        min_amplitude_ratio)
from .into import into
from .manifest import (build_manifest, read_manifest, rerun_options,
                       timestamp, write_manifest)
from .model import ModelParams, NumericalFailure, UnprovenRangeWarning
from .steady import ShootingError, solve_fixed_point
from .utils import is_empty_dir
from .verify import format_table, run_checks


class UsageError(ValueError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError('%s%s: error: %s' % (self.format_usage(), self.prog,
                                              message))


def as_bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError('not a boolean: %r' % (value,))


def positive_int(value):
    n = int(value)
    if n < 1:
        raise ValueError('expected a positive integer, got %r' % (value,))
    return n


Option = namedtuple('Option', 'name type default help choices')
Option.__new__.__defaults__ = (None,)

SIMULATION_OPTIONS = [
    Option('c', float, 2.0, 'intermittency exponent in [1, 5/2]'),
    Option('nu', float, 0.1, 'viscosity'),
    Option('f0', float, 1.0, 'force amplitude on shell 0'),
    Option('shells', int, 12, 'truncation index N'),
    Option('t-end', float, 50.0, 'final time'),
    Option('rel-tol', float, 1e-8, 'relative step tolerance'),
    Option('abs-tol', float, 1e-12, 'absolute step tolerance'),
    Option('sample-every', float, None, 'output cadence, t_end / 100 if unset'),
    Option('scheme', str, 'ifrk', 'time stepping scheme', SCHEMES),
    Option('init', str, 'zero',
           '%s or a .json state path' % ', '.join(INITIAL_KINDS)),
    Option('state', str, None, 'state file for --init file'),
    Option('seed', int, None, 'seed of --init random'),
]

OPTIONS = {
    'simulate': SIMULATION_OPTIONS + [
        Option('format', str, 'csv', 'series file format', ('csv', 'json')),
        Option('full-state', as_bool, False, 'add columns a_0..a_N'),
        Option('out', str, 'simulate', 'run directory'),
        Option('force', as_bool, False, 'overwrite a non-empty run directory'),
    ],
    'steady': [
        Option('c', float, 2.0, 'intermittency exponent in [1, 5/2]'),
        Option('nu', float, 0.1, 'viscosity'),
        Option('f0', float, 1.0, 'force amplitude on shell 0'),
        Option('shells', int, 12, 'shells reported in alpha'),
        Option('jmax', int, None, 'shooting horizon, ceil(J) + 60 if unset'),
        Option('newton-check', as_bool, False,
               'compare with the Newton solution'),
        Option('out', str, None, 'also write steady.json here'),
        Option('force', as_bool, False, 'overwrite a non-empty directory'),
    ],
    'sweep': [
        Option('c', float, 2.0, 'intermittency exponent in [1, 5/2]'),
        Option('f0', float, 1.0, 'force amplitude on shell 0'),
        Option('nu-list', str, None, 'comma separated viscosities'),
        Option('nu-decades', str, None, 'a:b for nu = 10^-a .. 10^-b'),
        Option('t-end', float, 100.0, 'final time of every point'),
        Option('scheme', str, 'bdf', 'time stepping scheme', SCHEMES),
        Option('init', str, 'zero', 'initial data of every point'),
        Option('seed', int, 0, 'seed of the first point, then +1 per point'),
        Option('jobs', positive_int, 1, 'points integrated at once'),
        Option('out', str, 'sweep', 'sweep directory'),
        Option('force', as_bool, False, 'overwrite a non-empty directory'),
    ],
    'verify': [
        Option('quick', as_bool, False, 'fast subset of the checks'),
        Option('mutate', str, None, 'tamper with the model', ('flux',)),
    ],
    'rerun': [
        Option('out', str, None, 'directory of the new run'),
        Option('force', as_bool, False, 'overwrite a non-empty directory'),
    ],
}


def dest(name):
    return name.replace('-', '_')


def build_parser():
    parser = ArgumentParser(prog='shellflow',
                            description='Viscous dyadic model experiments')
    sub = parser.add_subparsers(dest='command')
    sub.required = True
    for command, options in sorted(OPTIONS.items()):
        p = sub.add_parser(command, argument_default=argparse.SUPPRESS)
        if command == 'rerun':
            p.add_argument('manifest', help='manifest.json or its directory')
        else:
            p.add_argument('--config', help='key = value defaults')
        for o in options:
            if o.type is as_bool:
                p.add_argument('--' + o.name, dest=dest(o.name),
                               action='store_true', help=o.help)
            else:
                p.add_argument('--' + o.name, dest=dest(o.name), type=o.type,
                               choices=o.choices, help=o.help)
    return parser


def defaults(command):
    return dict((dest(o.name), o.default) for o in OPTIONS[command])


def read_config(path, command):
    """ Typed options from a ``key = value`` file

    A leading ``[shellflow]`` section header is optional.
    """
    if not os.path.exists(path):
        raise UsageError('config file %s does not exist' % path)
    with open(path) as f:
        text = f.read()
    if not text.lstrip().startswith('['):
        text = '[shellflow]\n' + text
    parser = ConfigParser()
    try:
        parser.read_string(text, source=path)
    except ConfigError as e:
        raise UsageError('cannot parse %s: %s' % (path, e))
    if not parser.has_section('shellflow'):
        raise UsageError('%s has no [shellflow] section' % path)
    known = dict((dest(o.name), o) for o in OPTIONS[command])
    out = {}
    for key, value in parser.items('shellflow'):
        key = dest(key)
        if key not in known:
            raise UsageError('%s: unknown option %r for %s'
                             % (path, key, command))
        option = known[key]
        try:
            out[key] = option.type(value)
        except ValueError as e:
            raise UsageError('%s: bad value for %s: %s' % (path, key, e))
        if option.choices and out[key] not in option.choices:
            raise UsageError('%s: %s must be one of %s'
                             % (path, key, ', '.join(option.choices)))
    return out


def parse_options(argv):
    """ Subcommand and options, layered defaults <- config <- flags

    >>> parse_options(['simulate', '--nu', '0.5'])[1]['nu']
    0.5
    """
    explicit = vars(build_parser().parse_args(argv))
    command = explicit.pop('command')
    config = explicit.pop('config', None)
    from_file = read_config(config, command) if config else {}
    return command, merge(defaults(command), from_file, explicit)


def resolve_out(path):
    root = os.environ.get('SHELLFLOW_OUT_DIR')
    if root and not os.path.isabs(path):
        return os.path.join(root, path)
    return path


OWNED = ('series.csv', 'series.json', 'final_state.json', 'manifest.json',
         'steady.json', 'summary.csv')


def prepare_out(path, force):
    """ Create the run directory, refusing a non-empty one without force """
    if os.path.exists(path) and not os.path.isdir(path):
        raise UsageError('%s exists and is not a directory' % path)
    if not is_empty_dir(path):
        if not force:
            raise UsageError('%s is not empty, pass --force to overwrite'
                             % path)
        for name in os.listdir(path):
            full = os.path.join(path, name)
            if name in OWNED:
                os.remove(full)
            elif name.startswith('point-') and os.path.isdir(full):
                shutil.rmtree(full)
    if not os.path.exists(path):
        os.makedirs(path)
    return path


def simulation_inputs(options):
    """ ModelParams, IntegratorConfig and initial ShellState of a run """
    params = ModelParams(c=options['c'], nu=options['nu'], f0=options['f0'],
                         n_shells=options['shells'])
    config = IntegratorConfig(rel_tol=options['rel_tol'],
                              abs_tol=options['abs_tol'],
                              t_end=options['t_end'],
                              sample_every=options['sample_every'],
                              scheme=options['scheme'])
    init = options['init']
    if init == 'file':
        if not options.get('state'):
            raise UsageError('--init file needs --state PATH')
        init = options['state']
    if init == 'random' and options['seed'] is None:
        raise UsageError('--init random needs --seed')
    return params, config, initial_state(init, params, seed=options['seed'])


def fixed_point_alpha(params):
    """ alpha^nu for the b_norm column, None when it is not available """
    if not params.nu > 0:
        return None
    try:
        with catch_warnings():
            simplefilter('ignore', UnprovenRangeWarning)
            return solve_fixed_point(params).alpha
    except NumericalFailure:
        return None


def trajectory_checks(series):
    return {'positivity': min_amplitude_ratio(series)
            >= -series.config.positivity_tol,
            'energy_inequality': energy_inequality_check(series)
            <= energy_inequality_bound(series)}


def write_run(out, options, params, config, series, alpha=None,
              command='simulate', started=None):
    """ series, final_state.json and manifest.json of one integration """
    full_state = options.get('full_state', False)
    name = 'series.%s' % options.get('format', 'csv')
    into(os.path.join(out, name), series, full_state=full_state, alpha=alpha)
    into(os.path.join(out, 'final_state.json'), series.final_state)
    manifest = build_manifest(command, options, params, config,
                              artifacts={'series': name,
                                         'final_state': 'final_state.json'},
                              checks=trajectory_checks(series),
                              started=started)
    write_manifest(manifest, out)
    return manifest


def simulate(options):
    started = timestamp()
    params, config, initial = simulation_inputs(options)
    out = prepare_out(resolve_out(options['out']), options['force'])
    options = merge(options, {'out': out})
    series = integrate(params, config, initial)
    write_run(out, options, params, config, series,
              alpha=fixed_point_alpha(params), started=started)
    print('%r written to %s' % (series, out))
    return 0


def steady(options):
    params = ModelParams(c=options['c'], nu=options['nu'], f0=options['f0'],
                         n_shells=options['shells'])
    try:
        state = solve_fixed_point(params, j_max=options['jmax'])
    except ShootingError as e:
        r = e.result
        print('shooting failed: %s (classification %s, first failure at '
              'shell %s, A0 %r)' % (e, r.classification, r.first_fail_index,
                                    r.A0), file=sys.stderr)
        return 2
    doc = convert(dict, state, newton_check=options['newton_check'])
    print(dumps(doc))
    if options['out']:
        out = prepare_out(resolve_out(options['out']), options['force'])
        into(os.path.join(out, 'steady.json'), doc)
        write_manifest(build_manifest('steady', merge(options, {'out': out}),
                                      params,
                                      artifacts={'steady': 'steady.json'},
                                      checks=dict((k, v) for k, v in
                                                  doc['checks'].items()
                                                  if isinstance(v, bool))),
                       out)
    return 0


def viscosity_grid(options):
    """ The strictly decreasing viscosities of a sweep

    >>> viscosity_grid({'nu_list': None, 'nu_decades': '1:3'})
    [0.1, 0.01, 0.001]
    """
    nu_list, decades = options.get('nu_list'), options.get('nu_decades')
    if (nu_list is None) == (decades is None):
        raise UsageError('give exactly one of --nu-list and --nu-decades')
    try:
        if nu_list is not None:
            grid = [float(x) for x in nu_list.split(',') if x.strip()]
        else:
            a, b = [int(x) for x in decades.split(':')]
            grid = [10.0 ** -k for k in range(a, b + 1)]
    except ValueError:
        raise UsageError('cannot read the viscosity grid from %r'
                         % (nu_list or decades))
    if not grid:
        raise UsageError('empty viscosity grid')
    return grid


def sweep(options):
    grid = viscosity_grid(options)
    out = prepare_out(resolve_out(options['out']), options['force'])
    options = merge(options, {'out': out})
    started = timestamp()
    config = sweep_config(t_end=options['t_end'], scheme=options['scheme'])
    points = sweep_points(options['c'], options['f0'], grid, config=config,
                          initial=options['init'], seed=options['seed'],
                          jobs=options['jobs'])
    artifacts = {'summary': 'summary.csv'}
    for i, point in enumerate(points):
        if point.series is None:
            continue
        name = 'point-%02d' % i
        path = prepare_out(os.path.join(out, name), True)
        r = point.result
        point_options = merge(defaults('simulate'), {
            'c': options['c'], 'nu': r.nu, 'f0': options['f0'],
            'shells': r.n_shells, 't_end': config.t_end,
            'rel_tol': config.rel_tol, 'abs_tol': config.abs_tol,
            'sample_every': config.sample_every, 'scheme': config.scheme,
            'init': options['init'],
            'seed': options['seed'] + i if options['seed'] is not None
            else None,
            'out': path})
        write_run(path, point_options, point.series.params, config,
                  point.series, alpha=point.steady.alpha)
        artifacts[name] = name
    results = [p.result for p in points]
    into(os.path.join(out, 'summary.csv'), results)
    write_manifest(build_manifest('sweep', options, config=config,
                                  artifacts=artifacts,
                                  checks=dict(('nu=%r' % r.nu, r.valid)
                                              for r in results),
                                  started=started), out)
    print(convert(pd.DataFrame, results).to_string(index=False))
    return 0 if any(r.valid for r in results) else 2


def verify(options):
    rows = run_checks(quick=options['quick'], mutate=options['mutate'])
    print(format_table(rows))
    return 0 if all(r.passed for r in rows) else 2


def rerun(options):
    manifest = read_manifest(options['manifest'])
    if manifest.command not in COMMANDS or manifest.command == 'rerun':
        raise UsageError('cannot rerun a %r manifest' % manifest.command)
    overrides = {'force': options['force']}
    if options['out']:
        overrides['out'] = options['out']
    elif manifest.options.get('out'):
        raise UsageError('rerun needs --out')
    return COMMANDS[manifest.command](rerun_options(manifest, **overrides))


COMMANDS = {'simulate': simulate, 'steady': steady, 'sweep': sweep,
            'verify': verify, 'rerun': rerun}


def main(argv=None):
    """ Run one subcommand, returning its exit code """
    argv = sys.argv[1:] if argv is None else argv
    try:
        command, options = parse_options(argv)
        return COMMANDS[command](options)
    except (ValueError, TypeError) as e:
        print(str(e), file=sys.stderr)
        return 1
    except NumericalFailure as e:
        print('numerical failure: %s' % e, file=sys.stderr)
        return 2
