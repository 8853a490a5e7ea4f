import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bergosc import geometry, quadrature, symbols
from bergosc.errors import BadParameters, ConfigError, ToleranceNotReached
from bergosc.geometry import Point
from bergosc.quadrature import QuadratureConfig


# In[1]:
def test_config_validation():
    with pytest.raises(ConfigError):
        QuadratureConfig(nodes=1)
    with pytest.raises(ConfigError):
        QuadratureConfig(tol=0.0)
    cfg = QuadratureConfig().with_tol(1e-6)
    assert cfg.tol == 1e-6 and cfg.panels == 4
    assert cfg.replace(panels=8).to_dict()['panels'] == 8


def test_gauss_rule_on_unit_interval():
    x, w = quadrature.gauss_rule(8)
    assert_allclose(w.sum(), 1.0)
    assert_allclose(np.sum(w * x ** 15), 1.0 / 16)


def test_phase_zeros_match_symbol_zeros():
    z = quadrature.phase_zeros(1.5, 0.5, 0.99)
    f = symbols.example45(1.5, 1.0)
    assert z.size > 10
    assert_allclose(f(z).real, 0.0, atol=1e-9)
    m = np.arange(1, 50)
    ref = symbols.example45_zeros(1.5, m)
    ref = ref[(ref > 0.5) & (ref < 0.99)]
    assert_allclose(z[:ref.size], ref)


def test_phase_zero_budget_warns():
    with pytest.warns(Warning):
        z = quadrature.phase_zeros(2.0, 0.5, 0.9999, limit=100)
    assert z.size <= 101


# In[2]:
def test_box_integral_of_one_is_the_area():
    one = symbols.one()
    for r in (0.0, 0.3, 0.9, 0.99):
        z = Point(r, 2.0)
        assert_allclose(quadrature.integrate_box(one, geometry.box(z)).real, geometry.box_area(z), rtol=1e-10)


def test_polar_rectangle_closed_forms():
    assert_allclose(quadrature.integrate_polar_rect(symbols.abs_sq(), (0, 1), (0, 2 * np.pi)), 0.5, atol=1e-10)
    assert_allclose(quadrature.integrate_polar_rect(symbols.zk(1), (0, 0.9), (0, 2 * np.pi)), 0.0, atol=1e-10)
    val = quadrature.integrate_polar_rect(symbols.re_z(), (0, 0.5), (0, np.pi / 2))
    assert_allclose(val, 0.5 ** 3 / 3 / np.pi, atol=1e-10)
    with pytest.raises(BadParameters):
        quadrature.integrate_polar_rect(symbols.one(), (0.5, 0.2), (0, 1))


def test_disc_integrals_obey_the_mean_value_property():
    for z, r_h in ((Point(0.6, 1.0), 0.5), (Point(0.2, 0.3), 1.0)):
        d = geometry.hyperbolic_disc(z, r_h, n_angles=96)
        assert_allclose(quadrature.integrate_disc(symbols.one(), d).real, d.area, rtol=1e-8)
        # harmonic symbols average to their value at the Euclidean centre
        val = quadrature.integrate_disc(symbols.re_z(), d)
        assert_allclose(val.real, d.euclid_center.real * d.area, atol=1e-7)


def test_oscillatory_tail_is_independent_of_where_it_starts():
    f = symbols.example45(1.0, 1.0)
    a = quadrature.integrate_radial(f, 0.5, 1.0, QuadratureConfig(tail_phase_panels=2000))
    b = quadrature.integrate_radial(f, 0.5, 1.0, QuadratureConfig(tail_phase_panels=20000))
    assert_allclose(a, b, atol=1e-7)
    assert np.isfinite(a) and np.isfinite(b)
    g = symbols.example45(1.5, 1.0)
    a = quadrature.integrate_radial(g, 0.5, 1.0, QuadratureConfig(tail_phase_panels=2000))
    b = quadrature.integrate_radial(g, 0.5, 1.0, QuadratureConfig(tail_phase_panels=20000))
    assert np.isfinite(a) and np.isfinite(b)
    assert_allclose(a, b, atol=1e-6)


def test_truncated_symbols_stop_at_their_support():
    f = symbols.truncate(symbols.one(), 0.5)
    assert_allclose(quadrature.integrate_radial(f, 0.0, 1.0, weight=lambda r: 2 * r), 0.25, atol=1e-12)


def test_adaptive_panels_report_convergence():
    vals, err, ok = quadrature.adaptive_panels(np.cos, np.linspace(0, 1, 5))
    assert ok and err < 1e-9
    assert_allclose(vals.sum(), np.sin(1.0))


# In[3]:
def test_full_disc_and_taylor():
    assert_allclose(quadrature.integrate_full_disc(lambda w: np.abs(w) ** 2), 0.5, atol=1e-10)
    c = quadrature.taylor_coefficients(lambda w: 1.0 / (1.0 - 0.5 * w), 10)
    assert_allclose(c, 0.5 ** np.arange(10), atol=1e-13)


def test_prefix_tables():
    z = Point(0.8, 5.5)
    one = symbols.one()
    t = quadrature.prefix_table(one, z, grid=(8, 8))
    assert t.separable
    assert_allclose(t.total.real, geometry.box_area(z), rtol=1e-10)
    assert_allclose(quadrature.area_table(t).total.real, geometry.box_area(z), rtol=1e-12)
    f = symbols.re_z()
    t = quadrature.prefix_table(f, z, grid=(8, 8))
    assert not t.separable
    assert_allclose(t.total, quadrature.integrate_box(f, geometry.box(z)), atol=1e-10)
    i1, i2, j1, j2 = 2, 6, 1, 5
    direct = quadrature.integrate_polar_rect(f, (t.rho[i1], t.rho[i2]), (t.phi[j1], t.phi[j2]))
    assert_allclose(t.rect(i1, i2, j1, j2), direct, atol=1e-10)
    with pytest.raises(BadParameters):
        quadrature.prefix_table(one, z, grid=(4, 8))


def test_prefix_table_of_oscillatory_symbol_carries_the_phase_zeros():
    f = symbols.example45(1.0, 1.0)
    z = Point(0.99)
    t = quadrature.prefix_table(f, z)
    zeros = quadrature.phase_zeros(1.0, 0.99, geometry.box(z).rho_hi)
    assert np.all(np.isin(zeros, t.rho))
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        direct = quadrature.integrate_box(f, geometry.box(z))
    assert_allclose(t.total, direct, atol=1e-10)


def test_graded_rules_reaching_the_boundary_stay_finite():
    f = symbols.example45(1.0, 1.0)
    edges = quadrature.graded_edges(0.0, 52)
    x, _ = quadrature.gauss_rule(16)
    nodes = edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]
    assert np.any(nodes >= 1.0)
    assert np.all(np.isfinite(f(nodes)))
    assert np.isfinite(f(1.0)) and np.isfinite(f.oscillatory_part(1.0))
    assert np.isfinite(quadrature.integrate_radial(f, 0.0, 1.0))
    with pytest.raises(ConfigError):
        QuadratureConfig(radial_levels=53)


def test_radial_moments():
    one = symbols.one()
    m = quadrature.radial_moments(lambda r: np.ones((r.size, 1)), one, [0, 1, 5])
    assert_allclose(m[:, 0], [1.0, 0.5, 1.0 / 6.0], atol=1e-12)
    with pytest.warns(ToleranceNotReached):
        quadrature.radial_moments(lambda r: np.ones((r.size, 1)), one, [0, 1], QuadratureConfig(max_depth=0))


def test_prefix_table_warns_when_the_cell_rule_is_too_coarse():
    f = symbols.rand_smooth(3)
    with pytest.warns(ToleranceNotReached):
        quadrature.prefix_table(f, Point(0.5, 1.0), grid=(8, 8), cfg=QuadratureConfig(nodes=2, tol=1e-15))
