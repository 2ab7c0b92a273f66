from __future__ import absolute_import, division, print_function

import pytest

import pandas as pd

from shellflow import into
from shellflow.backends.csv import CSV
from shellflow.backends.json import JSON, read_state
from shellflow.initial import initial_state
from shellflow.integrate import IntegratorConfig, integrate
from shellflow.model import ModelParams
from shellflow.utils import tmpfile


p = ModelParams(c=2.0, nu=0.5, f0=1.0, n_shells=4)


def test_into_convert():
    assert into(list, [1, 2, 3]) == [1, 2, 3]


def test_into_append_onto_proxy():
    series = integrate(p, IntegratorConfig(t_end=1.0),
                       initial_state('zero', p))
    with tmpfile('.csv') as fn:
        csv = CSV(fn)
        assert into(csv, series) is csv
        assert len(into(pd.DataFrame, csv)) == len(series)


def test_into_unknown_target():
    with pytest.raises(NotImplementedError):
        into([0], [1, 2])


def test_into_string_target():
    series = integrate(p, IntegratorConfig(t_end=1.0),
                       initial_state('zero', p))
    with tmpfile('.csv') as fn:
        csv = into(fn, series, full_state=True)
        assert isinstance(csv, CSV)
        df = into(pd.DataFrame, csv)
        assert list(df.t) == list(series.times)
        assert (df.a_4.values == series.states[:, 4]).all()

    with tmpfile('.json') as fn:
        js = into(fn, series.final_state)
        assert isinstance(js, JSON)
        state = read_state(fn)
        assert state.t == series.final_state.t
        assert (state.a == series.final_state.a).all()
