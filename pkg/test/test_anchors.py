import json
import os

import pytest

from bergosc import anchors
from bergosc.checks import CheckResult
from bergosc.config import SCHEMA
from bergosc.errors import RefusesIfChecksRed
from bergosc.operators import CoefficientVector, truncation_convergence
from bergosc.quadrature import DEFAULT_CONFIG
from bergosc.symbols import example45
from bergosc.utils import config_hash


# In[1]:
def _green(fast=True):
    return [CheckResult('box_area', True, 0.0)]


def _red(fast=True):
    return [CheckResult('box_area', False, 1.0, 'broken'), CheckResult('winding', True, 0.0)]


def test_refuses_when_checks_fail(tmp_path, monkeypatch):
    monkeypatch.setattr(anchors, 'run_checks', _red)
    path = tmp_path / 'anchors.json'
    with pytest.raises(RefusesIfChecksRed) as info:
        anchors.regenerate_anchor_table(str(path))
    assert info.value.failed == ['box_area']
    assert not path.exists()


def test_regeneration_reports_changed_values(tmp_path, monkeypatch):
    monkeypatch.setattr(anchors, 'run_checks', _green)
    values = {'a': 1.0, 'b': 2.0}
    monkeypatch.setattr(anchors, 'ANCHORS', {
        'a': (lambda cfg: values['a'], {'symbol': 'one'}),
        'b': (lambda cfg: values['b'], {'symbol': 'zk(1)'}),
    })
    path = str(tmp_path / 'docs' / 'anchors.json')
    diff = anchors.regenerate_anchor_table(path)
    assert diff == [('a', None, 1.0), ('b', None, 2.0)]
    doc = json.loads(open(path).read())
    assert doc['schema'] == SCHEMA and len(doc['anchors']) == 2
    assert anchors.regenerate_anchor_table(path) == []
    values['b'] = 2.5
    diff = anchors.regenerate_anchor_table(path)
    assert diff == [('b', 2.0, 2.5)]
    assert anchors.max_relative_change(diff) == pytest.approx(0.25)
    table = anchors.load_anchor_table(path)
    assert table['b'].value == 2.5 and table['a'].value == 1.0


def test_partial_regeneration_keeps_other_records(tmp_path, monkeypatch):
    monkeypatch.setattr(anchors, 'run_checks', _green)
    monkeypatch.setattr(anchors, 'ANCHORS', {'a': (lambda cfg: 1.0, {}), 'b': (lambda cfg: 2.0, {})})
    path = str(tmp_path / 'anchors.json')
    anchors.regenerate_anchor_table(path)
    monkeypatch.setattr(anchors, 'ANCHORS', {'a': (lambda cfg: 3.0, {}), 'b': (lambda cfg: 4.0, {})})
    assert anchors.regenerate_anchor_table(path, names=['a']) == [('a', 1.0, 3.0)]
    assert anchors.load_anchor_table(path)['b'].value == 2.0


def test_missing_table_is_empty(tmp_path):
    assert anchors.load_anchor_table(str(tmp_path / 'none.json')) == {}


# In[2]:
shipped = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'docs', 'anchors.json')
residual_name = 'truncation_residual[example45(1.5,1),e0,0.999]'


def test_shipped_truncation_anchor():
    table = anchors.load_anchor_table(shipped)
    rec = table[residual_name]
    params = anchors.ANCHORS[residual_name][1]
    assert rec.config_hash == config_hash({'params': params, 'quadrature': DEFAULT_CONFIG.to_dict()})
    assert 0.0 < rec.value < 1e-3


def test_truncation_residuals_decrease_to_the_anchor():
    res = truncation_convergence(example45(1.5, 1.0), CoefficientVector.basis(0, 8), [0.9, 0.99, 0.999], 8,
                                 precheck=False)
    assert res[1] < res[0]
    assert res[-1] < 1e-3
    assert res[-1] == pytest.approx(anchors.load_anchor_table(shipped)[residual_name].value, abs=1e-8)
