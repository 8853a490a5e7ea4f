import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bergosc import cli, geometry
from bergosc.config import SCHEMA, Thresholds
from bergosc.oscillation import RadialProfile
from bergosc.spectra import SpectrumReport

# In[1]:
ladder = '0.9,0.95,0.99,0.995,0.999'


def test_check_fast_passes(capsys):
    assert cli.main(['check', '--fast']) == 0
    out = capsys.readouterr().out
    assert 'PASS box_area' in out and 'FAIL' not in out


def test_check_fails_on_a_broken_area_formula(monkeypatch, capsys):
    area = geometry.box_area
    monkeypatch.setattr(geometry, 'box_area', lambda z: 2.0 * area(z))
    assert cli.main(['check', '--fast']) == 1
    captured = capsys.readouterr()
    assert 'FAIL box_area' in captured.out
    assert 'box_area' in captured.err


def test_profile_writes_files(tmp_path, capsys):
    prefix = str(tmp_path / 'hat')
    code = cli.main(['profile', '--symbol', 'example45(b=1,beta=1)', '--functional', 'hat', '--radii', ladder,
                     '--out', prefix, '--format', 'csv,json,dat'])
    assert code == 0
    assert 'slope' in capsys.readouterr().out
    p = RadialProfile.from_json((tmp_path / 'hat.json').read_text())
    assert_allclose(p.radii, [0.9, 0.95, 0.99, 0.995, 0.999])
    doc = json.loads((tmp_path / 'hat.json').read_text())
    assert doc['schema'] == SCHEMA and 'hash' in doc['config'] and doc['config']['quadrature']['tol'] == 1e-9
    assert (tmp_path / 'hat.csv').read_text().startswith('r,value,slope_to_date')
    assert (tmp_path / 'hat.dat').read_text().startswith('# r value')


def test_profile_verdict_for_vanishing_weak_oscillation(tmp_path, capsys):
    code = cli.main(['profile', '--symbol', 'example45(b=1,beta=1)', '--functional', 'vwmo', '--radii', ladder,
                     '--out', str(tmp_path / 'vw')])
    assert code == 0
    assert capsys.readouterr().out.startswith('VWMO proxy: PASS')


@pytest.mark.parametrize('argv', [
    ['profile', '--symbol', 'nosuch(1)'],
    ['profile', '--symbol', 'one', '--radii', '0.9,0.5'],
    ['profile', '--symbol', 'one', '--grid', '16by16'],
    ['profile', '--symbol', 'one', '--format', 'xml'],
    ['profile', '--symbol', 'one', '--nodes', '1'],
])
def test_configuration_errors_exit_2(argv, tmp_path):
    assert cli.main(argv + ['--out', str(tmp_path / 'x')]) == 2


# In[2]:
def test_spectrum(tmp_path, capsys):
    prefix = str(tmp_path / 'spec')
    code = cli.main(['spectrum', '--symbol', 'abs_sq', '--n', '16', '--radii', '0.9,0.99', '--out', prefix,
                     '--format', 'csv,json'])
    assert code == 0
    rep = SpectrumReport.from_json((tmp_path / 'spec.json').read_text())
    n = np.arange(16)
    assert_allclose(np.sort(rep.eigenvalues.real), (n + 1.0) / (n + 2.0), atol=1e-9)
    assert (tmp_path / 'spec_eigs.csv').exists() and (tmp_path / 'spec_cluster.dat').exists()
    assert 'essential norm estimate' in capsys.readouterr().out


def test_index_reports_status(tmp_path, capsys):
    code = cli.main(['index', '--symbol', 'example45(1,1)', '--radii', '0.99,0.999', '--out', str(tmp_path / 'i')])
    assert code == 0
    assert 'NotFredholm' in capsys.readouterr().out
    assert json.loads((tmp_path / 'i.json').read_text())['status'] == 'NotFredholm'
    assert cli.main(['index', '--symbol', 'example45(1,1) + 1', '--radii', '0.99,0.999']) == 0
    assert 'index: 0' in capsys.readouterr().out


def test_study_radii_respect_the_phase_budget():
    for b in (1.0, 1.5, 2.0):
        for disc in (False, True):
            radii = cli.study_radii(b, 6, disc=disc)
            assert radii[0] == pytest.approx(0.9) and np.all(np.diff(radii) > 0)
            assert radii[-1] <= 0.999 + 1e-12
    assert cli.study_radii(2.0, 6)[-1] < 0.999


def test_example45_study_on_reduced_radii(tmp_path, capsys):
    code = cli.main(['example45', '--out', str(tmp_path / 'study'), '--n-radii', '5', '--n', '64'])
    assert code == 0
    doc = json.loads((tmp_path / 'study.json').read_text())
    rows = {(r['b'], r['beta']): r for r in doc['rows']}
    assert sorted(rows) == [(1.0, 1.0), (1.5, 1.0), (2.0, 1.0)]
    bounded = rows[1.0, 1.0]
    assert np.isfinite(bounded['diagonal_decay'])
    assert bounded['diagonal_decay'] < Thresholds.decay_ratio
    assert bounded['bmo1_bounded'] and 'diagonal decays' in bounded['verdict']
    growing = rows[1.5, 1.0]
    assert growing['vwmo_slope'] == pytest.approx(1.0, abs=0.2)
    assert growing['bmo1_slope'] == pytest.approx(-0.5, abs=0.15)
    assert growing['bmo1_growth'] > 5.0
    assert growing['L1'] and not growing['bmo1_bounded']
    assert (tmp_path / 'study.csv').read_text().splitlines()[0].startswith('b,beta,L1')
    assert capsys.readouterr().out.count('(b=') == 3
