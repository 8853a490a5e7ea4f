"""
Finite sections of Toeplitz and Hankel operators on A^2 in the orthonormal
basis e_n(w) = sqrt(n+1) w^n, Berezin transforms, reproducing kernels and the
reflection U_z.

Entry (m, n) of T_f is sqrt((m+1)(n+1)) * 2 int_0^1 F_{m-n}(rho) rho^(m+n+1) drho,
where F_k(rho) is the k-th angular Fourier coefficient of f on the circle of
radius rho.
"""
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from . import geometry
from .config import SCHEMA, Thresholds
from .errors import (BadParameters, PreconditionWarning, RefinementUnstable, TailBoundExceeded, ToleranceNotReached,
                     TruncationWarning)
from .oscillation import averaging_local
from .quadrature import adaptive_panels, integrate_full_disc, integrate_radial, radial_edges, radial_moments, resolve
from .symbols import Symbol, analytic_symbol, compose_mobius, square_integrable, truncate
from .utils import ordered_map

logger = logging.getLogger(__name__)


# In[1]:
@dataclass(eq=False)
class ComplexMatrix:
    """Dense N x N complex matrix, row-major."""
    data: np.ndarray = field(repr=False)
    name: str = ''

    def __post_init__(self):
        self.data = np.array(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1] or self.data.shape[0] < 1:
            raise BadParameters('a ComplexMatrix is square with N >= 1, got shape %r' % (self.data.shape,))
        if not np.all(np.isfinite(self.data)):
            raise BadParameters('non-finite matrix entries in %s' % self.name)

    @property
    def n(self):
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __matmul__(self, other):
        return self.data @ np.asarray(other)

    def to_dict(self):
        flat = self.data.ravel()
        return {'schema': SCHEMA, 'name': self.name, 'n': self.n,
                'entries': np.stack([flat.real, flat.imag], axis=1).tolist()}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        n = int(d['n'])
        e = np.asarray(d['entries'], dtype=float)
        if e.shape != (n * n, 2):
            raise BadParameters('expected %d [re, im] entries' % (n * n))
        return cls((e[:, 0] + 1j * e[:, 1]).reshape(n, n), name=d.get('name', ''))


@dataclass(eq=False)
class CoefficientVector:
    """Coefficients of an A^2 function in the basis e_n."""
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=complex).ravel()
        if not np.all(np.isfinite(self.coeffs)):
            raise BadParameters('non-finite coefficients')

    @classmethod
    def basis(cls, k, n):
        if not 0 <= k < n:
            raise BadParameters('basis index %d outside [0, %d)' % (k, n))
        c = np.zeros(n, dtype=complex)
        c[k] = 1.0
        return cls(c)

    @property
    def n(self):
        return self.coeffs.size

    @property
    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def padded(self, n):
        out = np.zeros(n, dtype=complex)
        m = min(n, self.n)
        out[:m] = self.coeffs[:m]
        return out

    def __array__(self, dtype=None, copy=None):
        return self.coeffs if dtype is None else self.coeffs.astype(dtype)


@dataclass(frozen=True)
class KernelPoint:
    """Reproducing kernel K_z(w) = 1/(1 - w conj(z))^2 and its normalization k_z."""
    z: geometry.Point

    @property
    def norm_sq(self):
        return 1.0 / (1.0 - self.z.r ** 2) ** 2

    def K(self, w):
        return 1.0 / (1.0 - np.asarray(w) * np.conj(self.z.value)) ** 2

    def k(self, w):
        return self.K(w) / np.sqrt(self.norm_sq)

    def coefficients(self, n):
        """c_n = sqrt(n+1) conj(z)^n, so that K_z = sum c_n e_n."""
        m = np.arange(n)
        return np.sqrt(m + 1.0) * np.conj(self.z.value) ** m

    def normalization(self, cfg=None):
        """int |k_z|^2 dA, equal to 1."""
        return float(integrate_full_disc(lambda w: np.abs(self.k(w)) ** 2, cfg).real)


# In[2]:
def _angular_nodes(f, n, cfg):
    if f.fourier_width is not None:
        return max(16, 2 * f.fourier_width + 2)
    return max(cfg.angular_nodes, 1 << int(np.ceil(np.log2(2 * n + 2))))


def angular_modes(f, rho, m):
    """F[i, k] = (1/2pi) int f(rho_i, phi) e^{-ik phi} dphi by the m-point trapezoid rule, k mod m."""
    phi = 2 * np.pi * np.arange(m) / m
    return scipy.fft.fft(f(np.asarray(rho)[:, None], phi[None, :]), axis=1) / m


def toeplitz_radial_diag(f, N, cfg=None):
    """d_n = 2(n+1) int_0^1 f(rho) rho^(2n+1) drho, n < N."""
    cfg = resolve(cfg)
    if not f.radial:
        raise BadParameters('toeplitz_radial_diag needs a radial symbol')
    n = np.arange(N)
    return np.asarray(integrate_radial(f, 0.0, 1.0, cfg,
                                       weight=lambda r: 2.0 * (n + 1.0) * np.power.outer(r, 2 * n + 1.0)),
                      dtype=complex).reshape(N)


def split_oscillation(f):
    """
    f = osc + rest, where osc is the radial part A(rho) sin((1-rho)^-b) beyond the
    first phase zero past the last break and rest carries no boundary oscillation.
    """
    if not (f.oscillatory and f.envelope is not None):
        raise BadParameters('%s has no oscillatory envelope to split off' % f.name)
    b = f.phase_b
    start = max([0.5] + [x for x in f.breaks if x < 1.0])
    m0 = max(int(np.ceil((1.0 - start) ** -b / np.pi)), 1)
    cut = 1.0 - (m0 * np.pi) ** (-1.0 / b)
    env = f.envelope
    osc = Symbol(lambda r, p: np.where(r > cut, f.oscillatory_part(r), 0.0), name='osc(%s)' % f.name, radial=True,
                 phase_b=b, envelope=lambda r: np.where(np.asarray(r) > cut, env(r), 0.0),
                 integrability=f.integrability, continuous=False, breaks=(cut,), real=f.real)
    rest = Symbol(lambda r, p: f(r, p) - osc(r, p), name='rest(%s)' % f.name, radial=f.radial,
                  continuous=False, fourier_width=f.fourier_width, breaks=f.breaks + (cut,), support=f.support,
                  real=f.real)
    return osc, rest


def _modes_and_moments(f, powers, N, cfg, tol):
    m = _angular_nodes(f, N, cfg)
    if f.oscillatory:
        warnings.warn('%s oscillates up to |w| = 1 without an envelope; moments integrated directly' % f.name,
                      ToleranceNotReached)
    return radial_moments(lambda r: angular_modes(f, r, m), f, powers, cfg, tol), m


def toeplitz_matrix(f, N, cfg=None, n_jobs=1):
    """
    Finite section (T_f)_{m,n < N}. Radial symbols give diagonal matrices; for a
    finite Fourier width K only the diagonals |m - n| <= K are assembled. A radial
    boundary oscillation carried by the envelope goes through the radial diagonal.
    """
    cfg = resolve(cfg)
    N = int(N)
    if N < 1:
        raise BadParameters('N must be >= 1')
    if f.radial:
        return ComplexMatrix(np.diag(toeplitz_radial_diag(f, N, cfg)), name='T[%s]' % f.name)
    g, extra = f, None
    if f.oscillatory and f.envelope is not None and f.support >= 1.0:
        osc, g = split_oscillation(f)
        extra = toeplitz_radial_diag(osc, N, cfg)
    # entries are sqrt((m+1)(n+1)) * 2 * moment <= 2N * moment
    M, m = _modes_and_moments(g, np.arange(2 * N + 1.0), N, cfg, cfg.tol / (2.0 * N))
    width = N - 1 if g.fourier_width is None else min(g.fourier_width, N - 1)

    def diagonal(k):
        rows = np.arange(max(k, 0), min(N, N + k))
        cols = rows - k
        return rows, cols, np.sqrt((rows + 1.0) * (cols + 1.0)) * 2.0 * M[rows + cols + 1, k % m]

    out = np.zeros((N, N), dtype=complex)
    for rows, cols, vals in ordered_map(diagonal, range(-width, width + 1), n_jobs):
        out[rows, cols] = vals
    if extra is not None:
        out[np.diag_indices(N)] += extra
    logger.debug('assembled T[%s] at N=%d with %d diagonals, %d angles', f.name, N, 2 * width + 1, m)
    return ComplexMatrix(out, name='T[%s]' % f.name)


def project(f, N, cfg=None):
    """Coefficients <f, e_m>, m < N, of the Bergman projection of f."""
    cfg = resolve(cfg)
    out = np.zeros(N, dtype=complex)
    g = f
    if not f.radial and f.oscillatory and f.envelope is not None and f.support >= 1.0:
        osc, g = split_oscillation(f)
        out[0] += integrate_radial(osc, 0.0, 1.0, cfg, weight=lambda r: 2.0 * r)
    if g.radial:
        out[0] += integrate_radial(g, 0.0, 1.0, cfg, weight=lambda r: 2.0 * r)
        return out
    K = N if g.fourier_width is None else min(N, g.fourier_width + 1)
    M, m = _modes_and_moments(g, np.arange(1.0, K + 1.0), N, cfg, cfg.tol / 2.0)
    k = np.arange(min(K, m // 2))
    out[k] += np.sqrt(k + 1.0) * 2.0 * M[k, k]
    return out


# In[3]:
def _ring_kernel(t):
    def weight(r):
        y = r ** 2 * t
        return 2.0 * r * (1.0 + y) / (1.0 - y) ** 3
    return weight


def berezin_symbol(f, z, cfg=None, method=None):
    """
    f~(z) = int f o phi_z dA. Radial symbols use the angular-averaged kernel,
    symbols of finite Fourier width a mode-by-mode kernel, others the Moebius
    change of variables on a trapezoid-Gauss rule.
    :param method: 'ring', 'modes' or 'mobius'; chosen from the symbol's flags by default
    """
    cfg = resolve(cfg)
    z = geometry.as_point(z)
    t = z.r ** 2
    if method is None:
        method = 'ring' if f.radial else 'modes' if f.fourier_width is not None else 'mobius'
    if method == 'ring':
        if not f.radial:
            raise BadParameters('the ring formula needs a radial symbol')
        return complex((1.0 - t) ** 2 * integrate_radial(f, 0.0, 1.0, cfg, weight=_ring_kernel(t)))
    if method == 'modes':
        K = f.fourier_width
        if K is None:
            raise BadParameters('the mode formula needs a finite Fourier width')
        ks = np.arange(-K, K + 1)
        m = max(16, 2 * K + 2)

        def integrand(r):
            F = angular_modes(f, r, m)[:, ks % m]
            y = (r ** 2 * t)[:, None]
            G = 2.0 / (1.0 - y) ** 3 + (np.abs(ks) - 1.0) / (1.0 - y) ** 2
            out = F * 2.0 * r[:, None] * (r[:, None] * z.r) ** np.abs(ks) * G
            return out[:, 0] if ks.size == 1 else out

        vals, err, conv = adaptive_panels(integrand, radial_edges(f, 0.0, f.support, cfg), cfg, ncomp=ks.size)
        if not conv:
            warnings.warn('mode integrals of %s: tolerance not reached (%.3g)' % (f.name, err), ToleranceNotReached)
        modes = np.atleast_1d(vals.sum(axis=0))
        return complex((1.0 - t) ** 2 * np.sum(modes * np.exp(1j * ks * z.theta)))
    if method == 'mobius':
        zc = z.value
        return complex(integrate_full_disc(lambda w: f.at(geometry.mobius(zc, w)), cfg))
    raise BadParameters('unknown Berezin method %r' % method)


def berezin_operator(T, z, warn=True):
    """<T K_z, K_z> / <K_z, K_z> with K_z truncated to the size of T."""
    T = np.asarray(T)
    N = T.shape[0]
    z = geometry.as_point(z)
    c = KernelPoint(z).coefficients(N)
    t = z.r ** 2
    tail = (N + 1) * t ** N - N * t ** (N + 1)
    if warn and tail > Thresholds.berezin_tail:
        warnings.warn('kernel tail mass %.3g beyond N=%d at |z|=%.4g' % (tail, N, z.r), TruncationWarning)
    return complex(np.vdot(c, T @ c) / np.vdot(c, c))


# In[4]:
def truncation_convergence(f, g, rho_cuts, N, cfg=None, precheck=True):
    """
    Cauchy residuals ||(T_{chi_rho f} - T_{chi_rho' f}) g|| over successive cuts rho < rho'.
    :param g: CoefficientVector
    :return: list of len(rho_cuts) - 1 residuals
    """
    cfg = resolve(cfg)
    cuts = sorted(float(r) for r in rho_cuts)
    if len(cuts) < 2:
        raise BadParameters('at least two truncation radii are needed')
    if precheck:
        _check_averaging(f, cfg)
    gv = CoefficientVector(g).padded(N) if not isinstance(g, CoefficientVector) else g.padded(N)
    applied = [np.asarray(toeplitz_matrix(truncate(f, r), N, cfg)) @ gv for r in cuts]
    residuals = [float(np.linalg.norm(b - a)) for a, b in zip(applied[:-1], applied[1:])]
    logger.info('truncation residuals of %s: %s', f.name, ', '.join('%.3g' % r for r in residuals))
    return residuals


def _check_averaging(f, cfg, radii=(0.9, 0.99)):
    try:
        vals = [averaging_local(f, geometry.Point(r), cfg=cfg) for r in radii]
    except RefinementUnstable as exc:
        warnings.warn('averaging pre-check inconclusive: %s' % exc, PreconditionWarning)
        return
    if vals[-1] > Thresholds.bounded_ratio * max(vals[0], Thresholds.eps):
        warnings.warn('averages of %s grow toward the boundary (%.3g -> %.3g)' % (f.name, vals[0], vals[-1]),
                      PreconditionWarning)


def _l2_norm_sq(h, cfg):
    if h.radial:
        return float(integrate_radial(abs(h) ** 2, 0.0, 1.0, cfg, weight=lambda r: 2.0 * r).real)
    return float(integrate_full_disc(lambda w: np.abs(h.at(w)) ** 2, cfg, h.support, h.breaks).real)


def hankel_norm_applied(f, g, N, cfg=None):
    """
    ||H_f g||^2 = ||fg||^2 - ||P(fg)||^2, with P(fg) taken to N coefficients.
    :raises BadParameters: when fg is not square integrable
    :raises TailBoundExceeded: when the coefficients in [N/2, N) carry more than the tail tolerance
    """
    cfg = resolve(cfg)
    gv = g if isinstance(g, CoefficientVector) else CoefficientVector(g)
    l2 = square_integrable(f)
    if l2 is False:
        raise BadParameters('%s is not square integrable, so f g lies outside L^2' % f.name)
    if l2 is None:
        warnings.warn('square integrability of %s cannot be read from its flags' % f.name, PreconditionWarning)
    h = f * analytic_symbol(gv)
    a = project(h, N, cfg)
    value = max(_l2_norm_sq(h, cfg) - float(np.sum(np.abs(a) ** 2)), 0.0)
    tail = float(np.sum(np.abs(a[N // 2:]) ** 2))
    if tail > Thresholds.hankel_tail * max(value, Thresholds.eps):
        raise TailBoundExceeded('projection tail %.3g against ||H_f g||^2 = %.3g at N=%d' % (tail, value, N))
    return value


def semi_commutator_check(f, g, N, cfg=None):
    """
    (||(T_f T_g - T_fg) e_0||, ||P M_f H_g e_0||); the two agree since
    T_f T_g - T_fg = -P M_f H_g.
    """
    cfg = resolve(cfg)
    Tf = np.asarray(toeplitz_matrix(f, N, cfg))
    Tg = np.asarray(toeplitz_matrix(g, N, cfg))
    Tfg = np.asarray(toeplitz_matrix(f * g, N, cfg))
    lhs = float(np.linalg.norm(Tf @ Tg[:, 0] - Tfg[:, 0]))
    hg = g - analytic_symbol(project(g, N, cfg))
    rhs = float(np.linalg.norm(project(f * hg, N, cfg)))
    return lhs, rhs


# In[5]:
def reflection_matrix(z, N, rows=None, m=None):
    """
    (U_z)_{jn} = <U_z e_n, e_j> for j < rows, n < N, where
    (U_z h)(w) = h(phi_z(w)) (1 - |z|^2) / (1 - conj(z) w)^2.
    """
    z = geometry.as_point(z)
    rows = 2 * N if rows is None else rows
    if m is None:
        m = max(1024, 1 << int(np.ceil(np.log2(8 * rows))))
    w = np.exp(2j * np.pi * np.arange(m) / m)
    zc = z.value
    u = geometry.mobius(zc, w)
    wt = (1.0 - z.r ** 2) / (1.0 - np.conj(zc) * w) ** 2
    n = np.arange(N)
    vals = np.sqrt(n + 1.0)[None, :] * u[:, None] ** n[None, :] * wt[:, None]
    a = scipy.fft.fft(vals, axis=0)[:rows] / m
    return a / np.sqrt(np.arange(1.0, rows + 1.0))[:, None]


def reflection_check(f, z, N, cfg=None, block=None, n_jobs=1, full_output=False):
    """
    ||U_z T_f U_z - T_{f o phi_z}||_F on the leading block of size L.
    By default L is the largest n <= N/2 such that columns 0..n-1 of U_z lose
    at most 1e-12 of their mass beyond row N.
    """
    cfg = resolve(cfg)
    z = geometry.as_point(z)
    if z.r > Thresholds.reflection_warn_radius:
        warnings.warn('reflection at |z| = %.3g: kernel coefficients decay slowly' % z.r, TruncationWarning)
    U = reflection_matrix(z, N)
    tails = np.sum(np.abs(U[N:]) ** 2, axis=0)
    if block is None:
        bad = np.nonzero(tails[:N // 2] > 1e-12)[0]
        block = N // 2 if bad.size == 0 else int(bad[0])
    if block < 1:
        raise BadParameters('no reliable block at N=%d, |z|=%.3g; increase N' % (N, z.r))
    Un = U[:N]
    Tf = np.asarray(toeplitz_matrix(f, N, cfg, n_jobs))
    Tc = np.asarray(toeplitz_matrix(compose_mobius(f, z), N, cfg, n_jobs))
    diff = (Un @ Tf @ Un)[:block, :block] - Tc[:block, :block]
    value = float(np.linalg.norm(diff))
    if full_output:
        return value, {'block': block, 'tail': float(tails[:block].max())}
    return value
