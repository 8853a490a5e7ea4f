import numpy as np
import pytest
from numpy.testing import assert_allclose

from bergosc import operators, symbols
from bergosc.errors import BadParameters, ToleranceNotReached, TruncationWarning
from bergosc.geometry import Point
from bergosc.quadrature import QuadratureConfig
from bergosc.operators import CoefficientVector, ComplexMatrix, KernelPoint

# In[1]:
N = 16
n = np.arange(N)


def test_toeplitz_closed_forms():
    assert_allclose(np.asarray(operators.toeplitz_matrix(symbols.one(), N)), np.eye(N), atol=1e-12)
    d = operators.toeplitz_radial_diag(symbols.abs_sq(), N)
    assert_allclose(d.real, (n + 1.0) / (n + 2.0), rtol=1e-10)
    Tz = np.asarray(operators.toeplitz_matrix(symbols.zk(1), N))
    assert_allclose(np.diag(Tz, -1), np.sqrt((n[:-1] + 1.0) / (n[:-1] + 2.0)), rtol=1e-10)
    assert_allclose(Tz - np.diag(np.diag(Tz, -1), -1), 0.0, atol=1e-12)
    Tc = np.asarray(operators.toeplitz_matrix(symbols.conj_zk(1), N))
    assert_allclose(Tc, Tz.conj().T, atol=1e-12)
    Tr = np.asarray(operators.toeplitz_matrix(symbols.re_z(), N))
    assert_allclose(Tr, 0.5 * (Tz + Tz.conj().T), atol=1e-12)


def test_toeplitz_of_real_symbol_is_hermitian():
    f = symbols.rand_smooth(4, real=True)
    T = np.asarray(operators.toeplitz_matrix(f, N))
    assert_allclose(T, T.conj().T, atol=1e-10)
    assert_allclose(np.asarray(operators.toeplitz_matrix(f, N, n_jobs=2)), T)


def test_compactness_diagonal_of_example():
    d = np.abs(operators.toeplitz_radial_diag(symbols.example45(1.0, 1.0), 256))
    assert np.all(np.isfinite(d))
    assert d[128:].max() <= 0.1 * d.max()


def test_toeplitz_of_symbol_oscillating_at_the_boundary():
    f = symbols.example45(1.0, 1.0)
    g = f + symbols.zk(1)
    T = np.asarray(operators.toeplitz_matrix(g, N))
    assert np.all(np.isfinite(T))
    expected = np.diag(operators.toeplitz_radial_diag(f, N)) + np.asarray(operators.toeplitz_matrix(symbols.zk(1), N))
    assert_allclose(T, expected, atol=1e-8)
    assert_allclose(operators.project(g, 4), operators.project(f, 4) + operators.project(symbols.zk(1), 4),
                    atol=1e-8)
    osc, rest = operators.split_oscillation(g)
    assert osc.radial and not rest.oscillatory
    r = np.linspace(0.01, 0.999, 500)
    assert_allclose(osc(r) + rest(r, 0.7), g(r, 0.7), atol=1e-12)
    with pytest.raises(BadParameters):
        operators.split_oscillation(symbols.zk(1))


def test_moment_refinement_warns_when_capped():
    with pytest.warns(ToleranceNotReached):
        operators.toeplitz_matrix(symbols.rand_smooth(2), 8, QuadratureConfig(max_depth=0))


def test_complex_matrix():
    with pytest.raises(BadParameters):
        ComplexMatrix(np.ones((2, 3)))
    with pytest.raises(BadParameters):
        ComplexMatrix([[np.nan]])
    M = ComplexMatrix(np.arange(4).reshape(2, 2) * (1 + 1j), name='m')
    assert M.n == 2
    assert_allclose(ComplexMatrix.from_json(M.to_json()).data, M.data)
    assert_allclose(M @ np.ones(2), M.data.sum(axis=1))


def test_kernel_and_projection():
    k = KernelPoint(Point(0.5, 0.3))
    assert_allclose(k.normalization(), 1.0, atol=1e-8)
    c = k.coefficients(400)
    assert_allclose(np.sum(np.abs(c) ** 2), k.norm_sq, rtol=1e-10)
    assert_allclose(operators.project(symbols.zk(1), 4), [0, 1 / np.sqrt(2), 0, 0], atol=1e-12)
    assert_allclose(operators.project(symbols.abs_sq(), 3), [0.5, 0, 0], atol=1e-12)


# In[2]:
def test_berezin_fixed_points_and_closed_form():
    z = Point(0.6, 2.2)
    assert_allclose(operators.berezin_symbol(symbols.const(2.0), z), 2.0, atol=1e-9)
    for k in (1, 2, 3):
        assert_allclose(operators.berezin_symbol(symbols.zk(k), z), z.value ** k, atol=1e-8)
    t = 0.25
    exact = 1 - (1 - t) * ((1 - t) * np.log1p(-t) + t) / t ** 2
    assert_allclose(operators.berezin_symbol(symbols.abs_sq(), Point(0.5)), exact, atol=1e-8)
    assert_allclose(operators.berezin_symbol(symbols.re_z(), z, method='mobius'), z.value.real, atol=1e-7)
    with pytest.raises(BadParameters):
        operators.berezin_symbol(symbols.re_z(), z, method='ring')


def test_berezin_of_operator_matches_symbol():
    f = symbols.rand_smooth(2)
    z = Point(0.5, 1.0)
    T = operators.toeplitz_matrix(f, 64)
    assert_allclose(operators.berezin_operator(T, z), operators.berezin_symbol(f, z), atol=1e-8)
    with pytest.warns(TruncationWarning):
        operators.berezin_operator(T, Point(0.95))


def test_berezin_methods_agree_and_stay_finite_near_the_boundary():
    z = Point(0.5, 0.3)
    ring = operators.berezin_symbol(symbols.abs_sq(), z)
    assert_allclose(operators.berezin_symbol(symbols.abs_sq(), z, method='modes'), ring, atol=1e-9)
    with pytest.raises(BadParameters):
        operators.berezin_symbol(symbols.abs_sq(), z, method='nosuch')
    f = symbols.example45(1.0, 1.0)
    assert np.isfinite(operators.berezin_symbol(f, Point(0.9)))
    assert np.isfinite(operators.berezin_symbol(f, Point(0.5), method='mobius'))


def test_berezin_is_positive_and_bounded_by_the_sup():
    f = symbols.abs_sq() * symbols.re_z() + 1.0
    assert f.fourier_width == 1
    for r in (0.0, 0.5, 0.9, 0.99):
        for theta in (0.0, 2.0, np.pi):
            val = operators.berezin_symbol(f, Point(r, theta))
            assert abs(val.imag) < 1e-9
            assert -1e-9 <= val.real <= 2.0 + 1e-9
    g = symbols.example45(1.0, 1.0)
    for r in (0.5, 0.9, 0.99):
        assert abs(operators.berezin_symbol(g, Point(r))) <= g.bound


def test_kernel_normalization_up_to_095():
    for r in (0.0, 0.5, 0.9, 0.95):
        assert_allclose(KernelPoint(Point(r, 1.0)).normalization(), 1.0, atol=1e-6)


# In[3]:
def test_truncation_residuals_decrease():
    f = symbols.example45(1.5, 1.0)
    res = operators.truncation_convergence(f, CoefficientVector.basis(0, 8), [0.9, 0.99, 0.999], 8, precheck=False)
    assert len(res) == 2
    assert res[1] < res[0]
    with pytest.raises(BadParameters):
        operators.truncation_convergence(f, CoefficientVector.basis(0, 8), [0.9], 8, precheck=False)


def test_hankel_norms():
    e0 = CoefficientVector.basis(0, 4)
    assert operators.hankel_norm_applied(symbols.zk(1), e0, 8) < 1e-12
    assert_allclose(operators.hankel_norm_applied(symbols.conj_zk(1), e0, 8), 0.5, atol=1e-8)
    with pytest.raises(BadParameters):
        operators.hankel_norm_applied(symbols.example45(1.5, 1.0), e0, 8)
    assert operators.hankel_norm_applied(symbols.example45(1.0, 1.0), e0, 8) >= 0.0


def test_semi_commutator_identity():
    f, g = symbols.rand_smooth(1, K=2), symbols.rand_smooth(2, K=2)
    lhs, rhs = operators.semi_commutator_check(f, g, 16)
    assert lhs > 1e-3
    assert_allclose(lhs, rhs, atol=1e-7)


# In[4]:
def test_reflection_matrix_at_origin_and_involution():
    U0 = operators.reflection_matrix(Point(0.0), 8, rows=8)
    assert_allclose(U0, np.diag((-1.0) ** np.arange(8)), atol=1e-12)
    U = operators.reflection_matrix(Point(0.3, 0.7), 48)
    cols = U[:, :8]
    assert_allclose(cols.conj().T @ cols, np.eye(8), atol=1e-10)
    assert_allclose((U[:48, :48] @ U[:48, :8])[:8], np.eye(8), atol=1e-10)


def test_reflection_check():
    value, info = operators.reflection_check(symbols.re_z(), 0.5, 64, full_output=True)
    assert info['block'] >= 1 and info['tail'] <= 1e-12
    assert value < 1e-6
    with pytest.warns(TruncationWarning):
        operators.reflection_check(symbols.re_z(), 0.8, 32, block=2)
