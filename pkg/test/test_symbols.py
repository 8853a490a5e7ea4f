import numpy as np
import pytest
from numpy.testing import assert_allclose

from bergosc import symbols
from bergosc.errors import BadParameters, ExpressionError
from bergosc.symbols import MatrixSymbol, parse_symbol

# In[1]:
rng = np.random.default_rng(1)
rho = rng.uniform(0, 0.999, 200)
phi = rng.uniform(0, 2 * np.pi, 200)


def test_example45_values_and_flags():
    f = symbols.example45(1.0, 1.0)
    assert_allclose(f(0.5), 2 * np.sin(2.0))
    assert_allclose(f(0.3), 1.0)
    assert f.radial and f.bounded and f.real and f.bound == 2.0
    dense = np.linspace(0.5, 1 - 1e-9, 100000)
    assert np.abs(f(dense)).max() <= 2.0
    assert symbols.example45(1.5, 1.0).integrability == 'L1'
    assert symbols.example45(2.0, 1.0).integrability == 'L1_loc'
    assert not symbols.example45(1.5, 1.0).bounded
    with pytest.raises(BadParameters):
        symbols.example45(1.0, 1.5)


def test_example45_zeros_and_growth():
    b = 1.5
    f = symbols.example45(b, 1.0)
    r = symbols.example45_zeros(b, np.arange(1, 101))
    assert_allclose(f(r).real, 0.0, atol=1e-8)
    # sine peaks sit halfway between zeros in phase
    peaks = 1 - ((np.arange(10, 1000, 10) + 0.5) * np.pi) ** (-1 / b)
    assert_allclose(np.abs(f(peaks)) * (1 - peaks) ** 0.5 * peaks, 1.0, rtol=1e-6)


def test_truncate():
    f = symbols.truncate(symbols.example45(1.5, 1.0), 0.99)
    assert f.support == 0.99 and 0.99 in f.breaks
    assert f(0.995) == 0
    assert_allclose(f(0.7), symbols.example45(1.5, 1.0)(0.7))
    with pytest.raises(BadParameters):
        symbols.truncate(f, 1.0)
    g = symbols.truncate(symbols.example45(1.5, 1.0), 0.9)
    assert g.envelope(0.95) == 0.0
    assert_allclose(g.envelope(0.8), symbols.example45(1.5, 1.0).envelope(0.8))


def test_square_integrability_from_flags():
    assert symbols.square_integrable(symbols.example45(1.0, 1.0))
    assert symbols.square_integrable(symbols.example45(1.2, 1.0))
    assert not symbols.square_integrable(symbols.example45(1.5, 1.0))
    assert not symbols.square_integrable(symbols.example45(2.0, 1.0))
    f = symbols.Symbol(lambda r, p: 1.0 / (1.0 - r), name='pole', radial=True)
    assert symbols.square_integrable(f) is None


# In[2]:
def test_arithmetic_keeps_flags():
    f = symbols.example45(1.0, 1.0)
    g = f + 1
    assert g.radial and g.phase_b == 1.0 and g.envelope is not None
    assert_allclose(g(0.7), f(0.7) + 1)
    h = 2.0 * symbols.zk(1) - symbols.conj_zk(1)
    assert h.fourier_width == 1 and not h.radial
    assert_allclose(h(rho, phi), 2 * rho * np.exp(1j * phi) - rho * np.exp(-1j * phi))
    p = symbols.zk(1) * symbols.zk(2)
    assert p.fourier_width == 3
    assert_allclose(p(rho, phi), symbols.zk(3)(rho, phi))
    dev = abs(f - 0.3)
    assert dev.real and dev.radial
    assert_allclose(dev(0.7), abs(f(0.7) - 0.3))


def test_small_symbols():
    assert_allclose(symbols.re_z()(rho, phi), rho * np.cos(phi))
    assert_allclose(symbols.z_plus_conj()(rho, phi), 2 * rho * np.cos(phi))
    assert_allclose(symbols.abs_sq()(rho), rho ** 2)
    assert_allclose(symbols.compose_mobius(symbols.zk(1), 0.0)(rho, phi), -rho * np.exp(1j * phi))
    e1 = symbols.analytic_symbol([0, 1])
    assert_allclose(e1(rho, phi), np.sqrt(2) * rho * np.exp(1j * phi))


def test_rand_smooth_is_reproducible():
    a, b = symbols.rand_smooth(3), symbols.rand_smooth(3)
    assert_allclose(a(rho, phi), b(rho, phi))
    real = symbols.rand_smooth(3, real=True)
    assert_allclose(real(rho, phi).imag, 0.0, atol=1e-12)
    assert np.abs(a(rho, phi)).max() <= a.bound
    with pytest.raises(BadParameters):
        symbols.rand_smooth(0, K=9)


def test_checkerboard_alternates_between_boxes():
    f = symbols.checkerboard()
    assert f(0.25, 0.1) == -f(0.25, np.pi + 0.1)
    assert f(0.25, 0.1) == -f(0.6, 0.1)
    assert not f.continuous


def test_matrix_symbols():
    F = MatrixSymbol.diag(symbols.zk(1), symbols.one())
    assert F.shape == (2, 2)
    vals = F(rho[:5], phi[:5])
    assert vals.shape == (5, 2, 2)
    assert_allclose(vals[:, 0, 0], rho[:5] * np.exp(1j * phi[:5]))
    assert_allclose(vals[:, 0, 1], 0.0)
    with pytest.raises(BadParameters):
        MatrixSymbol([[1, 2], [3]])


# In[3]:
def test_parse_symbol():
    f = parse_symbol('example45(b=1.5,beta=1)')
    assert f.params == {'b': 1.5, 'beta': 1.0}
    assert f.name == 'example45(b=1.5,beta=1)'
    assert_allclose(parse_symbol('zk(2)')(rho, phi), rho ** 2 * np.exp(2j * phi))
    g = parse_symbol('2*zk(1) + 1')
    assert_allclose(g(rho, phi), 2 * rho * np.exp(1j * phi) + 1)
    assert parse_symbol('example45(1,1) + 1').phase_b == 1.0
    assert_allclose(parse_symbol('rand(7)')(rho, phi), symbols.rand_smooth(7)(rho, phi))
    assert_allclose(parse_symbol('-const(2)')(0.5), -2.0)


@pytest.mark.parametrize('text', ['', 'nosuch(1)', 'zk(1', 'zk(1) zk(2)', 'example45(b=x)', 'zk(1) $ 2'])
def test_parse_errors(text):
    with pytest.raises(ExpressionError):
        parse_symbol(text)


def test_standard_library():
    lib = symbols.standard_library()
    for name in ('one', 'zk(1)', 're_z', 'example45(1,1)', 'checkerboard'):
        assert name in lib
    assert all(isinstance(f, symbols.Symbol) for f in lib.values())
