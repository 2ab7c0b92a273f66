""" Run manifests: enough of a run to execute it again

Every run directory holds exactly one ``manifest.json``.
"""
from __future__ import absolute_import, division, print_function

import os
from collections import namedtuple
from datetime import datetime

from toolz import keyfilter, merge

from .convert import convert
from .into import into
from .backends.json import JSON


SCHEMA_VERSION = 1

MANIFEST_NAME = 'manifest.json'


RunManifest = namedtuple('RunManifest',
                         'schema_version command options params config seed '
                         'started finished artifacts checks')


def timestamp(when=None):
    """ ISO-8601 UTC time, to the second """
    when = when or datetime.utcnow()
    return when.replace(microsecond=0).isoformat() + 'Z'


def build_manifest(command, options, params=None, config=None, artifacts=None,
                   checks=None, started=None, finished=None):
    """ Collect a run into a RunManifest

    Parameters
    ----------
    command : str
        CLI subcommand that produced the run
    options : dict
        Fully resolved options, defaults and config file included
    params : ModelParams, optional
    config : IntegratorConfig, optional
    artifacts : dict
        Artifact name to path relative to the run directory
    checks : dict
        Check name to pass / fail

    >>> m = build_manifest('simulate', {'c': 2.0, 'seed': 3})
    >>> m.seed, m.schema_version
    (3, 1)
    """
    return RunManifest(schema_version=SCHEMA_VERSION,
                       command=command,
                       options=dict(options),
                       params=dict(params._asdict()) if params else None,
                       config=dict(config._asdict()) if config else None,
                       seed=options.get('seed'),
                       started=started or timestamp(),
                       finished=finished or timestamp(),
                       artifacts=dict(artifacts or {}),
                       checks=dict((k, bool(v))
                                   for k, v in (checks or {}).items()))


@convert.register(dict, RunManifest, cost=1.0)
def manifest_to_dict(m, **kwargs):
    return dict(m._asdict())


@convert.register(RunManifest, dict, cost=1.0)
def dict_to_manifest(doc, **kwargs):
    missing = set(RunManifest._fields) - set(doc)
    if missing:
        raise ValueError('manifest lacks %s' % ', '.join(sorted(missing)))
    if doc['schema_version'] != SCHEMA_VERSION:
        raise ValueError('manifest schema version %r, this version reads %d'
                         % (doc['schema_version'], SCHEMA_VERSION))
    return RunManifest(**keyfilter(RunManifest._fields.__contains__, doc))


def write_manifest(manifest, directory):
    path = os.path.join(directory, MANIFEST_NAME)
    into(path, manifest)
    return path


def read_manifest(path):
    """ RunManifest from a manifest file or the run directory holding it """
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    if not os.path.exists(path):
        raise ValueError('no manifest at %s' % path)
    return into(RunManifest, JSON(path))


def rerun_options(manifest, **overrides):
    """ Options that execute the run again, ``overrides`` taking precedence

    >>> m = build_manifest('simulate', {'c': 2.0, 'out': 'run1'})
    >>> rerun_options(m, out='run2')['out']
    'run2'
    """
    return merge(manifest.options, overrides)
