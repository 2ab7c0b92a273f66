from __future__ import absolute_import, division, print_function

import json

import pytest

import numpy as np

from shellflow import append, convert, resource
from shellflow.backends.json import (JSON, dumps, read_json, read_state,
                                     write_json)
from shellflow.model import ShellState
from shellflow.utils import filetext, tmpfile


def test_resource():
    assert isinstance(resource('run1/manifest.json'), JSON)


def test_dumps_is_sorted_and_handles_numpy():
    text = dumps({'b': np.float64(0.5), 'a': np.arange(3),
                  'flag': np.bool_(True), 'J': float('inf')})
    doc = json.loads(text)
    assert list(doc) == ['J', 'a', 'b', 'flag']
    assert doc == {'J': None, 'a': [0, 1, 2], 'b': 0.5, 'flag': True}


def test_write_and_read():
    doc = {'x': [0.1, 1 / 3], 'name': 'run'}
    with tmpfile('.json') as fn:
        write_json(fn, doc)
        assert read_json(fn) == doc
        assert convert(dict, JSON(fn)) == doc


def test_append_replaces_document():
    with tmpfile('.json') as fn:
        append(JSON(fn), {'a': 1})
        append(JSON(fn), {'b': 2})
        assert read_json(fn) == {'b': 2}


def test_read_state():
    with filetext('{"t": 1.5, "a": [1.0, 0.5]}', extension='json') as fn:
        state = read_state(fn)
        assert convert(ShellState, JSON(fn)).t == 1.5
    assert state.t == 1.5
    assert list(state.a) == [1.0, 0.5]


@pytest.mark.parametrize('text', ['{"a": [1.0]}', '[1, 2]',
                                  '{"t": 0, "a": [1.0, null]}'])
def test_read_state_rejects_other_documents(text):
    with filetext(text, extension='json') as fn:
        with pytest.raises(ValueError):
            read_state(fn)
