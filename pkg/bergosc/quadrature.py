"""
Integration with respect to the normalized area measure dA = rho drho dphi / pi.

Radial panels are placed on the symbol's breakpoints and, for oscillatory
symbols, on the zeros rho_m = 1 - (m pi)^(-1/b) of sin((1-rho)^-b). Each panel
carries a Gauss-Legendre rule and is bisected until the two-level estimates
agree. Integrals of oscillatory symbols up to |w| = 1 stop at a phase zero and
add the leading integration-by-parts boundary term for the remainder.
"""
import logging
import warnings
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.fft
from numpy.polynomial.legendre import leggauss

from . import geometry
from .errors import BadParameters, ConfigError, ToleranceNotReached

logger = logging.getLogger(__name__)

# values evaluated per batch
_CHUNK = 2000000
_EPS = np.finfo(float).eps


# In[1]:
@dataclass(frozen=True)
class QuadratureConfig:
    panels: int = 4
    nodes: int = 8
    tol: float = 1e-9
    oscillatory: bool = True
    max_depth: int = 16
    max_phase_panels: int = 1000000
    tail_phase_panels: int = 20000
    radial_levels: int = 52
    angular_nodes: int = 256
    max_angular_nodes: int = 8192

    def __post_init__(self):
        if self.panels < 1:
            raise ConfigError('panels must be >= 1')
        if not 2 <= self.nodes <= 64:
            raise ConfigError('nodes must lie in [2, 64]')
        if not self.tol > 0:
            raise ConfigError('tolerance must be positive')
        if not 0 <= self.max_depth <= 20:
            raise ConfigError('max_depth must lie in [0, 20]')
        if self.max_phase_panels < 1 or self.tail_phase_panels < 1:
            raise ConfigError('phase panel budgets must be positive')
        if not 1 <= self.radial_levels <= 52:
            raise ConfigError('radial_levels must lie in [1, 52]; 1 - 2^-j rounds to 1 beyond')
        if self.angular_nodes < 8 or self.max_angular_nodes < self.angular_nodes:
            raise ConfigError('bad angular resolution')

    def with_tol(self, tol):
        return replace(self, tol=float(tol))

    def replace(self, **kwargs):
        return replace(self, **kwargs)

    def to_dict(self):
        return asdict(self)


DEFAULT_CONFIG = QuadratureConfig()


def resolve(cfg):
    return DEFAULT_CONFIG if cfg is None else cfg


@lru_cache(maxsize=None)
def gauss_rule(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = leggauss(n)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


# In[2]:
def phase_zeros(b, a, c, limit=None):
    """Zeros of sin((1-rho)^-b) strictly inside (a, c), c < 1, thinned to at most ``limit``."""
    if c <= a or c >= 1.0:
        return np.empty(0)
    m0 = max(int(np.ceil((1.0 - a) ** -b / np.pi)), 1)
    m1 = int(np.floor((1.0 - c) ** -b / np.pi))
    if m1 < m0:
        return np.empty(0)
    stride = 1
    count = m1 - m0 + 1
    if limit is not None and count > limit:
        stride = int(np.ceil(count / limit))
        warnings.warn('%d phase zeros in (%.6g, %.6g) exceed the budget; keeping every %d-th'
                      % (count, a, c, stride), ToleranceNotReached)
    rho = 1.0 - (np.arange(m0, m1 + 1, stride) * np.pi) ** (-1.0 / b)
    return rho[(rho > a) & (rho < c)]


def tail_start(b, a, cfg):
    """Phase zero where integrals reaching |w| = 1 switch to the boundary term."""
    m = int(np.ceil((1.0 - max(a, 0.5)) ** -b / np.pi)) + cfg.tail_phase_panels
    return 1.0 - (m * np.pi) ** (-1.0 / b)


def graded_edges(a, levels):
    """Dyadic edges 1 - 2^-j accumulating at 1, each dyadic interval split in four, above ``a``."""
    j = np.arange(1, levels + 1)
    base = 1.0 - 2.0 ** -j
    step = 2.0 ** -(j + 1) / 4.0
    pts = (base[:, None] + step[:, None] * np.arange(4)[None, :]).ravel()
    pts = np.concatenate([pts, [1.0]])
    return pts[pts > a]


def radial_edges(f, a, c, cfg, phase_upper=None):
    """Panel edges on [a, c]: uniform panels, breakpoints, phase zeros, dyadic grading if c == 1."""
    pts = [np.linspace(a, c, cfg.panels + 1)]
    br = np.asarray(f.breaks, dtype=float)
    pts.append(br[(br > a) & (br < c)])
    if c >= 1.0:
        pts.append(graded_edges(a, cfg.radial_levels))
    if cfg.oscillatory and f.phase_b is not None:
        upper = min(c, phase_upper) if phase_upper is not None else c
        if upper >= 1.0:
            upper = tail_start(f.phase_b, a, cfg)
        pts.append(phase_zeros(f.phase_b, a, upper, cfg.max_phase_panels))
    kinks = getattr(f, 'kinks', None)
    if kinks is not None:
        pts.append(np.asarray(kinks(a, c, cfg), dtype=float))
    return np.unique(np.concatenate(pts))


# In[3]:
def _panel_sums(func, a, b, x, w, ncomp):
    n = x.size
    step = max(1, _CHUNK // (n * ncomp))
    out = []
    for s in range(0, a.size, step):
        aa, bb = a[s:s + step], b[s:s + step]
        h = bb - aa
        pts = aa[:, None] + h[:, None] * x[None, :]
        vals = np.asarray(func(pts.ravel()), dtype=complex)
        vals = vals.reshape(pts.shape + vals.shape[1:])
        out.append(np.einsum('pn,pn...->p...', h[:, None] * w[None, :], vals))
    if not out:
        return np.zeros((0,) if ncomp == 1 else (0, ncomp), dtype=complex)
    return np.concatenate(out, axis=0)


def adaptive_panels(func, edges, cfg=None, tol=None, ncomp=1):
    """
    Per-panel integrals of func over consecutive edges, bisecting panels whose
    one-level and two-level Gauss estimates disagree.
    :param func: vectorized rho -> values, shape (m,) or (m, ncomp)
    :param edges: increasing panel edges
    :param cfg: QuadratureConfig
    :param tol: absolute tolerance for the whole interval, shared in proportion to panel length
    :param ncomp: number of components returned by func
    :return: (per-panel values, error estimate, converged flag)
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    npan = a.size
    x, w = gauss_rule(cfg.nodes)
    total_len = max(float(edges[-1] - edges[0]), 1e-300)
    out = np.zeros((npan,) if ncomp == 1 else (npan, ncomp), dtype=complex)
    owner = np.arange(npan)
    coarse = _panel_sums(func, a, b, x, w, ncomp)
    err = 0.0
    converged = True
    for depth in range(cfg.max_depth + 1):
        if a.size == 0:
            break
        mid = 0.5 * (a + b)
        left = _panel_sums(func, a, mid, x, w, ncomp)
        right = _panel_sums(func, mid, b, x, w, ncomp)
        fine = left + right
        diff = np.abs(fine - coarse)
        mag = np.abs(fine)
        if diff.ndim > 1:
            diff, mag = diff.max(axis=1), mag.max(axis=1)
        ok = diff <= np.maximum(tol * (b - a) / total_len, 64 * _EPS * mag)
        last = depth == cfg.max_depth or 2 * np.count_nonzero(~ok) * cfg.nodes * ncomp > 8 * _CHUNK
        if last and not ok.all():
            converged = False
            ok[:] = True
        np.add.at(out, owner[ok], fine[ok])
        err += float(diff[ok].sum())
        if ok.all():
            break
        bad = ~ok
        a, b = np.concatenate([a[bad], mid[bad]]), np.concatenate([mid[bad], b[bad]])
        owner = np.concatenate([owner[bad], owner[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
    return out, err, converged


def _report(value, err, converged, what, full_output):
    if not converged:
        warnings.warn('%s: tolerance not reached (error estimate %.3g)' % (what, err), ToleranceNotReached)
    if full_output:
        return value, {'error': err, 'converged': converged}
    return value


# In[4]:
def integrate_radial(f, a, c, cfg=None, weight=None, tol=None, full_output=False):
    """
    int_a^c f(rho) weight(rho) drho for a radial symbol f.
    :param f: radial Symbol
    :param a: lower limit
    :param c: upper limit, 1 allowed
    :param weight: vectorized rho -> (m,) or (m, k) weights; defaults to 1
    :param tol: absolute tolerance
    :return: complex scalar, or length-k vector for vector weights
    """
    cfg = resolve(cfg)
    if not f.radial:
        raise BadParameters('integrate_radial needs a radial symbol, got %s' % f.name)
    if weight is None:
        weight = np.ones_like
    sample = np.asarray(weight(np.array([0.5, 0.75])))
    ncomp = sample.shape[1] if sample.ndim > 1 else 1
    zero = np.zeros(ncomp, dtype=complex) if ncomp > 1 else 0j
    c = min(float(c), f.support)
    if c <= a:
        return _report(zero, 0.0, True, f.name, full_output)

    def integrand(r):
        wv = np.asarray(weight(r))
        fv = f(r)
        return fv[:, None] * wv if wv.ndim > 1 else fv * wv

    if c >= 1.0 and cfg.oscillatory and f.phase_b is not None:
        rho_star = max(tail_start(f.phase_b, a, cfg), a)
        vals, err, conv = adaptive_panels(integrand, radial_edges(f, a, rho_star, cfg), cfg, tol, ncomp)
        total = vals.sum(axis=0)
        tail_edges = np.concatenate([[rho_star], graded_edges(rho_star, cfg.radial_levels)])
        if f.envelope is not None:
            def remainder(r):
                wv = np.asarray(weight(r))
                rv = f(r) - f.oscillatory_part(r)
                return rv[:, None] * wv if wv.ndim > 1 else rv * wv

            tv, terr, tconv = adaptive_panels(remainder, tail_edges, cfg, tol, ncomp)
            rs = np.array([rho_star])
            amp = f.envelope(rs)[0] * np.asarray(weight(rs))[0]
            # leading boundary term of int A w sin(psi) over [rho_star, 1)
            total = total + tv.sum(axis=0) + amp * np.cos(f.phase(rho_star)) / f.phase_derivative(rho_star)
        else:
            warnings.warn('%s oscillates up to |w| = 1 without an envelope; tail integrated directly'
                          % f.name, ToleranceNotReached)
            tv, terr, tconv = adaptive_panels(integrand, tail_edges, cfg, tol, ncomp)
            total = total + tv.sum(axis=0)
        return _report(total, err + terr, conv and tconv, f.name, full_output)
    vals, err, conv = adaptive_panels(integrand, radial_edges(f, a, c, cfg), cfg, tol, ncomp)
    return _report(vals.sum(axis=0), err, conv, f.name, full_output)


# In[5]:
def _bisect(edges):
    mids = 0.5 * (edges[:-1] + edges[1:])
    return np.sort(np.concatenate([edges, mids]))


def _nodes(edges, x, w):
    h = np.diff(edges)
    pts = edges[:-1, None] + h[:, None] * x[None, :]
    return pts, h[:, None] * w[None, :]


def _tensor(f, redges, pedges, cfg):
    x, w = gauss_rule(cfg.nodes)
    R, WR = _nodes(redges, x, w)
    P, WP = _nodes(pedges, x, w)
    R, WR, P, WP = R.ravel(), WR.ravel(), P.ravel(), WP.ravel()
    vals = f(R[:, None], P[None, :])
    return complex((WR * R) @ vals @ WP) / np.pi


def integrate_polar_rect(f, rho_interval, phi_interval, cfg=None, tol=None, full_output=False):
    """
    int over [rho_a, rho_b] x [phi_a, phi_b] of f dA (angles may be unreduced).
    Radial symbols reduce to one radial integral; others use tensor Gauss
    panels doubled until two successive estimates agree to ``tol``.
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    ra, rb = map(float, rho_interval)
    pa, pb = map(float, phi_interval)
    if not 0.0 <= ra <= rb <= 1.0 or pb < pa:
        raise BadParameters('bad polar rectangle %r x %r' % ((ra, rb), (pa, pb)))
    width = pb - pa
    if width == 0.0 or rb == ra:
        return _report(0j, 0.0, True, f.name, full_output)
    if f.radial:
        val, info = integrate_radial(f, ra, rb, cfg, weight=lambda r: r, tol=tol * np.pi / width,
                                     full_output=True)
        return _report(complex(val) * width / np.pi, info['error'] * width / np.pi, info['converged'],
                       f.name, full_output)
    rb_eff = min(rb, f.support)
    redges = radial_edges(f, ra, rb_eff, cfg)
    pedges = np.linspace(pa, pb, cfg.panels + 1)
    prev = _tensor(f, redges, pedges, cfg)
    diff = np.inf
    for depth in range(cfg.max_depth):
        redges, pedges = _bisect(redges), _bisect(pedges)
        cur = _tensor(f, redges, pedges, cfg)
        diff = abs(cur - prev)
        prev = cur
        if diff <= tol:
            return _report(cur, diff, True, f.name, full_output)
        if redges.size * pedges.size * cfg.nodes ** 2 > _CHUNK:
            break
    return _report(prev, diff, False, f.name, full_output)


def integrate_box(f, b, cfg=None, tol=None, full_output=False):
    return integrate_polar_rect(f, (b.rho_lo, b.rho_hi), (b.phi_lo, b.phi_hi), cfg, tol, full_output)


# In[6]:
def _disc_radial(f, d, cfg, tol):
    ca = abs(d.euclid_center)
    radius = d.euclid_radius
    total, err, conv = 0j, 0.0, True
    if ca < radius:
        inner = radius - ca
        val, info = integrate_radial(f, 0.0, inner, cfg, weight=lambda r: r, tol=tol / 2, full_output=True)
        total += 2 * np.pi * val
        err, conv = err + info['error'], conv and info['converged']
        lo, hi = inner, radius + ca
    else:
        lo, hi = ca - radius, ca + radius
    if ca == 0.0 or hi <= lo:
        return total / np.pi, err, conv
    m, h = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def arc(u):
        rho = m + h * np.sin(u)
        safe = np.maximum(rho, 1e-300)
        cosang = np.clip((rho ** 2 + ca ** 2 - radius ** 2) / (2 * safe * ca), -1.0, 1.0)
        return f(rho) * rho * 2.0 * np.arccos(cosang) * h * np.cos(u)

    rho_breaks = radial_edges(f, lo, hi, cfg)[1:-1]
    u_edges = np.unique(np.concatenate([np.linspace(-0.5 * np.pi, 0.5 * np.pi, cfg.panels + 1),
                                        np.arcsin(np.clip((rho_breaks - m) / h, -1.0, 1.0))]))
    vals, e, c = adaptive_panels(arc, u_edges, cfg, tol * np.pi)
    return (total + vals.sum()) / np.pi, err + e / np.pi, conv and c


def integrate_disc(f, d, cfg=None, tol=None, full_output=False):
    """
    int over the hyperbolic disc d of f dA. Radial symbols integrate exact arcs
    of the Euclidean disc; others integrate each sampled ray between r1 and r2.
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    if f.radial:
        val, err, conv = _disc_radial(f, d, cfg, tol)
        return _report(val, err, conv, f.name, full_output)
    total, err, conv = 0j, 0.0, True
    share = tol * np.pi / max(float(np.sum(d.weights)), 1e-300)
    for phi, wgt, r1, r2 in zip(d.phis, d.weights, d.r1, d.r2):
        if r2 <= r1:
            continue
        vals, e, c = adaptive_panels(lambda r: f(r, phi) * r, radial_edges(f, r1, r2, cfg), cfg, share)
        total += wgt * vals.sum()
        err += wgt * e
        conv = conv and c
    return _report(total / np.pi, err / np.pi, conv, f.name, full_output)


def disc_rule(d, n_radial=8):
    """Fixed tensor rule on d: (points, weights) with weights summing to about d.area."""
    x, w = gauss_rule(n_radial)
    rho = d.r1[:, None] + (d.r2 - d.r1)[:, None] * x[None, :]
    wts = d.weights[:, None] * (d.r2 - d.r1)[:, None] * w[None, :] * rho / np.pi
    return (rho * np.exp(1j * d.phis)[:, None]).ravel(), wts.ravel()


# In[7]:
@lru_cache(maxsize=64)
def radial_rule(cfg, support=1.0, breaks=()):
    """Fixed Gauss rule on [0, support], graded toward 1 when support == 1."""
    pts = [np.linspace(0.0, support, cfg.panels + 1), np.asarray(breaks, dtype=float)]
    if support >= 1.0:
        pts.append(graded_edges(0.0, cfg.radial_levels))
    edges = np.unique(np.concatenate(pts))
    edges = edges[(edges >= 0.0) & (edges <= support)]
    x, w = gauss_rule(2 * cfg.nodes)
    nodes, wts = _nodes(edges, x, w)
    nodes, wts = nodes.ravel(), wts.ravel()
    nodes.setflags(write=False)
    wts.setflags(write=False)
    return nodes, wts


def radial_moments(func, f, powers, cfg=None, tol=None, full_output=False):
    """
    M[j, :] = int_0^support rho^powers[j] func(rho) drho on the radial panels of f.
    All panels are bisected together until no moment moves by more than ``tol``.
    :param func: vectorized rho -> (m, ncomp) values, e.g. the angular modes of f
    :param f: Symbol whose breaks, support and phase supply the panels
    :param powers: exponents, shape (J,)
    :return: array (J, ncomp)
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    powers = np.asarray(powers, dtype=float)
    x, w = gauss_rule(2 * cfg.nodes)

    def moments(edges):
        R, W = _nodes(edges, x, w)
        R, W = R.ravel(), W.ravel()
        vals = np.asarray(func(R), dtype=complex)
        return (R[None, :] ** powers[:, None]) @ (W[:, None] * vals)

    edges = radial_edges(f, 0.0, f.support, cfg)
    prev = moments(edges)
    ncomp = prev.shape[1]
    diff = np.inf
    for depth in range(cfg.max_depth):
        if 2 * edges.size * x.size * max(ncomp, powers.size) > 4 * _CHUNK:
            break
        edges = _bisect(edges)
        cur = moments(edges)
        diff = float(np.abs(cur - prev).max())
        prev = cur
        if diff <= tol:
            return _report(cur, diff, True, 'moments of %s' % f.name, full_output)
    return _report(prev, diff, False, 'moments of %s' % f.name, full_output)


def _angular_means(func, R, M):
    phi = 2 * np.pi * np.arange(M) / M
    e = np.exp(1j * phi)
    step = max(1, _CHUNK // M)
    out = np.empty(R.size, dtype=complex)
    for s in range(0, R.size, step):
        out[s:s + step] = np.asarray(func(R[s:s + step, None] * e[None, :]), dtype=complex).mean(axis=1)
    return out


def integrate_full_disc(func, cfg=None, support=1.0, breaks=(), tol=None, full_output=False):
    """
    int over the disc of func(w) dA for func vectorized over complex w, smooth in the angle:
    graded Gauss in rho, periodic trapezoid in phi doubled until converged.
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    R, W = radial_rule(cfg, float(support), tuple(sorted(breaks)))
    M = cfg.angular_nodes
    prev = 2.0 * np.sum(W * R * _angular_means(func, R, M))
    while True:
        M *= 2
        if M > cfg.max_angular_nodes:
            return _report(complex(prev), np.inf, False, 'full-disc integral', full_output)
        cur = 2.0 * np.sum(W * R * _angular_means(func, R, M))
        if abs(cur - prev) <= tol:
            return _report(complex(cur), abs(cur - prev), True, 'full-disc integral', full_output)
        prev = cur


def taylor_coefficients(func, n, radius=1.0, m=None):
    """First n Taylor coefficients of func, analytic on a neighbourhood of |w| <= radius."""
    if m is None:
        m = max(256, 1 << int(np.ceil(np.log2(4 * n))))
    phi = 2 * np.pi * np.arange(m) / m
    vals = np.asarray(func(radius * np.exp(1j * phi)), dtype=complex)
    c = scipy.fft.fft(vals) / m
    return c[:n] / radius ** np.arange(n)


# In[8]:
@dataclass(eq=False)
class PrefixTable:
    """
    Cumulative integrals S[i, j] of f over [rho_0, rho_i] x [phi_0, phi_j] inside a box.
    Radial symbols are stored in separable form S = radial[i] * (phi_j - phi_0) / pi.
    """
    box: geometry.Box
    rho: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    tag: str = ''
    radial: np.ndarray = field(default=None, repr=False)
    table: np.ndarray = field(default=None, repr=False)

    @property
    def separable(self):
        return self.radial is not None

    @property
    def angular(self):
        return self.phi - self.phi[0]

    @property
    def shape(self):
        return self.rho.size, self.phi.size

    @property
    def S(self):
        if self.table is not None:
            return self.table
        return np.outer(self.radial, self.angular) / np.pi

    def at(self, i, j):
        if self.table is not None:
            return self.table[i, j]
        return self.radial[i] * self.angular[j] / np.pi

    @property
    def total(self):
        return self.at(-1, -1)

    def rect(self, i1, i2, j1, j2):
        """Integral over [rho_i1, rho_i2] x [phi_j1, phi_j2] by inclusion-exclusion."""
        return self.at(i2, j2) - self.at(i1, j2) - self.at(i2, j1) + self.at(i1, j1)

    def corner(self, i, j):
        return geometry.Point(self.rho[i], self.phi[j])


def _cell_integrals(f, redges, pedges, n):
    x, w = gauss_rule(n)
    R, WR = _nodes(redges, x, w)
    P, WP = _nodes(pedges, x, w)
    nr, q = R.shape
    npp = P.shape[0]
    vals = f(R.ravel()[:, None], P.ravel()[None, :]).reshape(nr, q, npp, q)
    return np.einsum('iq,iqjp,jp->ij', WR * R, vals, WP) / np.pi


def prefix_table(f, z, grid=(16, 16), cfg=None, tol=None):
    """
    Prefix table of f over B(z) on a uniform grid refined by the radial panel edges.
    :param f: Symbol
    :param z: box anchor
    :param grid: (radial, angular) counts, each >= 8
    :param tol: absolute tolerance, defaults to cfg.tol * |B(z)|
    """
    cfg = resolve(cfg)
    nr, nphi = map(int, grid)
    if nr < 8 or nphi < 8:
        raise BadParameters('prefix grids need at least 8 x 8 cells')
    b = geometry.box(z)
    tol = cfg.tol * b.area if tol is None else tol
    rho = np.union1d(np.linspace(b.rho_lo, b.rho_hi, nr + 1), radial_edges(f, b.rho_lo, b.rho_hi, cfg))
    phi = np.linspace(b.phi_lo, b.phi_hi, nphi + 1)
    if f.radial:
        vals, err, conv = adaptive_panels(lambda r: f(r) * r, rho, cfg, tol * np.pi / b.width)
        _report(None, err, conv, f.name, False)
        return PrefixTable(b, rho, phi, tag=f.name, radial=np.concatenate([[0j], np.cumsum(vals)]))
    coarse = _cell_integrals(f, rho, phi, cfg.nodes)
    cells = _cell_integrals(f, rho, phi, 2 * cfg.nodes)
    err = float(np.abs(cells - coarse).sum())
    _report(None, err, err <= tol, 'prefix table of %s' % f.name, False)
    S = np.zeros((rho.size, phi.size), dtype=complex)
    S[1:, 1:] = np.cumsum(np.cumsum(cells, axis=0), axis=1)
    return PrefixTable(b, rho, phi, tag=f.name, table=S)


def area_table(t):
    """Prefix table of the constant 1 on the grid of t, in closed form."""
    r1 = 0.5 * (t.rho ** 2 - t.rho[0] ** 2)
    return PrefixTable(t.box, t.rho, t.phi, tag='one', radial=r1.astype(complex))
