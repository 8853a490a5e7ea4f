"""
Eigenvalues of finite sections, radial cluster sets, essential norms and
winding-number indices.

The eigensolver balances the matrix, reduces it to Hessenberg form with
Householder reflections and runs a complex single-shift QR iteration with
Wilkinson shifts. Eigenvectors, when asked for, come from inverse iteration.
"""
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.linalg import lu_factor, lu_solve

from . import geometry
from .config import SCHEMA, Thresholds, __version__
from .errors import (BadParameters, CurveThroughZero, NoConvergence, NotFredholm, PreconditionWarning,
                     RefinementUnstable, UnderResolved, Unstable)
from .operators import berezin_symbol
from .oscillation import box_average, bwmo_local
from .quadrature import resolve
from .utils import angle_grid, csv_text, dumps, ordered_map

logger = logging.getLogger(__name__)

MAX_N = 512


# In[1]:
@njit(cache=True)
def _balance(a):
    """Radix-2 row/column scaling of a in place; returns the diagonal similarity."""
    n = a.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    scale = np.ones(n)
    done = False
    while not done:
        done = True
        for i in range(n):
            r = 0.0
            c = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i].real) + abs(a[j, i].imag)
                    r += abs(a[i, j].real) + abs(a[i, j].imag)
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                scale[i] *= f
                for j in range(n):
                    a[i, j] /= f
                for j in range(n):
                    a[j, i] *= f
    return scale


@njit(cache=True)
def _hessenberg(a):
    """Householder reduction of a to upper Hessenberg form, in place."""
    n = a.shape[0]
    for k in range(n - 2):
        m = n - k - 1
        v = a[k + 1:, k].copy()
        alpha = 0.0
        for i in range(m):
            alpha += v[i].real ** 2 + v[i].imag ** 2
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = v[0]
        phase = x0 / abs(x0) if abs(x0) != 0.0 else 1.0 + 0.0j
        v[0] = x0 + phase * alpha
        vn = 0.0
        for i in range(m):
            vn += v[i].real ** 2 + v[i].imag ** 2
        vn = np.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        for j in range(k, n):
            s = 0.0j
            for i in range(m):
                s += np.conj(v[i]) * a[k + 1 + i, j]
            s *= 2.0
            for i in range(m):
                a[k + 1 + i, j] -= v[i] * s
        for i in range(n):
            s = 0.0j
            for j in range(m):
                s += a[i, k + 1 + j] * v[j]
            s *= 2.0
            for j in range(m):
                a[i, k + 1 + j] -= s * np.conj(v[j])
        for i in range(k + 2, n):
            a[i, k] = 0.0j


@njit(cache=True)
def _shifted_qr(h, maxit):
    """
    Eigenvalues of the Hessenberg matrix h (destroyed) by single-shift QR with deflation.
    Returns (eigenvalues, converged mask, success flag).
    """
    n = h.shape[0]
    eig = np.zeros(n, dtype=np.complex128)
    done = np.zeros(n, dtype=np.bool_)
    eps = 2.220446049250313e-16
    anorm = 0.0
    for i in range(n):
        for j in range(n):
            anorm = max(anorm, abs(h[i, j]))
    cs = np.empty(n, dtype=np.complex128)
    sn = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        l = hi
        while l > 0:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = anorm
            if abs(h[l, l - 1]) <= eps * s:
                h[l, l - 1] = 0.0j
                break
            l -= 1
        if l == hi:
            eig[hi] = h[hi, hi]
            done[hi] = True
            hi -= 1
            its = 0
            continue
        if total >= maxit:
            return eig, done, False
        its += 1
        total += 1
        if its % 10 == 0:
            # exceptional shift
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            c = h[hi, hi - 1]
            d = h[hi, hi]
            disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
            m1 = 0.5 * (a + d) + disc
            m2 = 0.5 * (a + d) - disc
            mu = m1 if abs(m1 - d) < abs(m2 - d) else m2
        for k in range(l, hi + 1):
            h[k, k] -= mu
        for k in range(l, hi):
            x = h[k, k]
            y = h[k + 1, k]
            r = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
            if r == 0.0:
                c_ = 1.0 + 0.0j
                s_ = 0.0j
            else:
                c_ = x / r
                s_ = y / r
            cs[k] = c_
            sn[k] = s_
            for j in range(k, hi + 1):
                a1 = h[k, j]
                a2 = h[k + 1, j]
                h[k, j] = np.conj(c_) * a1 + np.conj(s_) * a2
                h[k + 1, j] = -s_ * a1 + c_ * a2
        for k in range(l, hi):
            c_ = cs[k]
            s_ = sn[k]
            for i in range(l, min(k + 2, hi) + 1):
                b1 = h[i, k]
                b2 = h[i, k + 1]
                h[i, k] = b1 * c_ + b2 * s_
                h[i, k + 1] = -b1 * np.conj(s_) + b2 * np.conj(c_)
        for k in range(l, hi + 1):
            h[k, k] += mu
    return eig, done, True


def _inverse_iteration(a, lam, iters=2, seed=0):
    n = a.shape[0]
    scale = max(np.abs(a).max(), 1.0)
    rng = np.random.default_rng(seed)
    V = np.empty((n, lam.size), dtype=complex)
    eye = np.eye(n)
    for i, l in enumerate(lam):
        lu = lu_factor(a - (l + 1e-10 * scale) * eye, check_finite=False)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for _ in range(iters):
            x = lu_solve(lu, x / np.linalg.norm(x), check_finite=False)
        V[:, i] = x / np.linalg.norm(x)
    return V


def eigenvalues(T, vectors=False, maxit=None):
    """
    All eigenvalues of a dense complex matrix.
    :param T: ComplexMatrix or square array, N <= 512
    :param vectors: also return unit eigenvectors (columns) by inverse iteration
    :param maxit: QR iteration cap, 30 N by default
    :raises NoConvergence: with the converged eigenvalues in ``partial``
    """
    a = np.array(np.asarray(T), dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise BadParameters('eigenvalues needs a square matrix')
    n = a.shape[0]
    if n > MAX_N:
        raise BadParameters('N = %d exceeds the dense solver limit %d' % (n, MAX_N))
    h = a.copy()
    _balance(h)
    _hessenberg(h)
    lam, done, ok = _shifted_qr(h, 30 * n if maxit is None else int(maxit))
    if not ok:
        raise NoConvergence('QR iteration did not converge for N = %d' % n, partial=lam[done])
    if vectors:
        return lam, _inverse_iteration(a, lam)
    return lam


# In[2]:
def _circle_values(f, r, thetas, cfg, which):
    def value(theta):
        z = geometry.Point(r, theta)
        if which == 'hat':
            return box_average(f, z, cfg)
        if which == 'tilde':
            return berezin_symbol(f, z, cfg)
        raise BadParameters("which must be 'hat' or 'tilde', got %r" % which)

    if f.radial:
        return np.full(len(thetas), value(0.0), dtype=complex)
    return np.array([value(t) for t in thetas], dtype=complex)


@dataclass
class ClusterSet:
    """Values of f^ or f~ on circles |z| = r, one row per radius."""
    radii: np.ndarray
    angles: np.ndarray
    values: np.ndarray = field(repr=False)
    which: str = 'hat'
    name: str = ''

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        if np.any(np.diff(self.radii) <= 0) or np.any(self.radii <= 0) or np.any(self.radii >= 1):
            raise BadParameters('cluster radii must increase strictly inside (0, 1)')

    @property
    def max_modulus(self):
        return np.abs(self.values).max(axis=1)

    def contracts(self, ratio=None):
        ratio = Thresholds.decay_ratio if ratio is None else ratio
        m = self.max_modulus
        return bool(m[-1] < ratio * max(m[0], Thresholds.eps))

    def to_dict(self):
        return {'radii': self.radii, 'angles': self.angles, 'values': self.values, 'which': self.which,
                'name': self.name}


def cluster_set(f, radii=None, angles=None, cfg=None, which='hat', n_jobs=1, progress=False):
    """
    :param radii: circles, default the boundary ladder
    :param angles: count or array; radial symbols default to a single angle
    :param which: 'hat' for box averages, 'tilde' for Berezin transforms
    """
    cfg = resolve(cfg)
    radii = np.asarray(Thresholds.boundary_ladder if radii is None else radii, dtype=float)
    if angles is None:
        angles = 1 if f.radial else Thresholds.profile_angles
    thetas = angle_grid(angles) if np.isscalar(angles) else np.asarray(angles, dtype=float)
    rows = ordered_map(lambda r: _circle_values(f, r, thetas, cfg, which), radii, n_jobs, progress,
                       desc='cluster set')
    return ClusterSet(radii, thetas, np.array(rows), which, f.name)


def essential_norm_estimate(f, radii=None, angles=None, cfg=None, n_jobs=1, full_output=False):
    """Max of |f^| on the outermost circle; the per-radius maxima give the trend."""
    cs = cluster_set(f, radii, angles, cfg, 'hat', n_jobs)
    trend = cs.max_modulus
    if not np.all(np.isfinite(trend)):
        warnings.warn('average function of %s is not finite on the lattice' % f.name, PreconditionWarning)
    value = float(trend[-1])
    if full_output:
        return value, {'radii': cs.radii, 'max_modulus': trend}
    return value


# In[3]:
@dataclass
class CurveSamples:
    """Closed curve sampled at increasing angles; ``resample`` re-evaluates it on new angles."""
    values: np.ndarray
    radius: float = np.nan
    angles: np.ndarray = None
    resample: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.angles is None:
            self.angles = angle_grid(self.values.size)

    @classmethod
    def from_function(cls, func, n, radius=np.nan):
        """Sample func(angles) at n uniform angles."""
        angles = angle_grid(n)
        return cls(np.asarray(func(angles), dtype=complex), radius, angles, func)

    def refined(self):
        if self.resample is None:
            raise UnderResolved('curve cannot be resampled')
        return CurveSamples.from_function(self.resample, 2 * self.values.size, self.radius)

    def to_csv(self):
        return csv_text(['theta', 're', 'im'], zip(self.angles, self.values.real, self.values.imag))


def winding_number(c, max_refine=6):
    """
    Winding number about 0 of a closed sampled curve.
    :raises CurveThroughZero: if a sample lies within Thresholds.winding_eps of 0
    :raises UnderResolved: if increments stay >= pi/2 after ``max_refine`` doublings
    """
    for attempt in range(max_refine + 1):
        v = c.values
        if np.min(np.abs(v)) <= Thresholds.winding_eps:
            raise CurveThroughZero('curve passes within %.1g of 0' % Thresholds.winding_eps)
        inc = np.angle(np.roll(v, -1) / v)
        if np.max(np.abs(inc)) < 0.5 * np.pi:
            w = inc.sum() / (2 * np.pi)
            k = int(np.round(w))
            if abs(w - k) >= Thresholds.winding_residual:
                raise UnderResolved('winding %.4f is not near an integer' % w)
            return k
        if attempt == max_refine or c.resample is None:
            break
        logger.debug('refining curve from %d samples', v.size)
        c = c.refined()
    raise UnderResolved('argument increments stay above pi/2 with %d samples' % c.values.size)


def circle_curve(f, r, angles=64, cfg=None, which='hat'):
    cfg = resolve(cfg)
    return CurveSamples.from_function(lambda th: _circle_values(f, r, th, cfg, which), angles, r)


def fredholm_index(f, radii=None, angles=64, cfg=None, which='hat', full_output=False):
    """
    Index of T_f as minus the winding number of f^ (or f~) on circles near the boundary.
    :raises NotFredholm: if the outermost curve comes within Thresholds.fredholm_margin of 0
    :raises Unstable: if the two outermost circles disagree
    """
    radii = np.asarray(Thresholds.boundary_ladder if radii is None else radii, dtype=float)
    if radii.size < 2:
        raise BadParameters('fredholm_index needs at least two radii')
    curves = [circle_curve(f, r, angles, cfg, which) for r in radii]
    low = float(np.min(np.abs(curves[-1].values)))
    if low < Thresholds.fredholm_margin:
        raise NotFredholm('min |%s| on |z| = %g is %.3g' % (f.name, radii[-1], low))
    winds = []
    for c in curves:
        try:
            winds.append(winding_number(c))
        except (CurveThroughZero, UnderResolved):
            winds.append(None)
    if winds[-1] is None or winds[-1] != winds[-2]:
        raise Unstable('windings %r over radii %r' % (winds, list(radii)), indices=winds)
    index = -winds[-1]
    if full_output:
        return index, {'radii': radii, 'windings': winds, 'min_modulus': low}
    return index


def block_fredholm_check(F, radii=None, angles=32, cfg=None, margin=None, preconditions=True, full_output=False):
    """
    min |det (f~_jk(z))| over the two outermost circles against ``margin``.
    :param F: MatrixSymbol
    :return: (passes, min |det|)
    :raises UnderResolved: when a determinant comes out non-finite
    """
    cfg = resolve(cfg)
    margin = Thresholds.det_margin if margin is None else margin
    radii = np.asarray(Thresholds.boundary_ladder if radii is None else radii, dtype=float)
    thetas = angle_grid(angles)
    rows, cols = F.shape
    if rows != cols:
        raise BadParameters('block symbol must be square')
    if preconditions:
        for entry in (F[j, k] for j in range(rows) for k in range(cols)):
            _check_entry(entry, cfg)
    dets = []
    for r in radii[-2:]:
        vals = np.empty((thetas.size, rows, cols), dtype=complex)
        for j in range(rows):
            for k in range(cols):
                vals[:, j, k] = _circle_values(F[j, k], r, thetas, cfg, 'tilde')
        dets.append(np.abs(np.linalg.det(vals)))
    if not np.all(np.isfinite(dets)):
        raise UnderResolved('non-finite Berezin determinant on the outer circles; refine the quadrature')
    low = float(np.min(dets))
    if full_output:
        return low > margin, low, {'radii': radii[-2:], 'min_det': [float(d.min()) for d in dets]}
    return low > margin, low


def _check_entry(f, cfg, radii=(0.9, 0.99)):
    try:
        vals = [bwmo_local(f, geometry.Point(r), cfg=cfg) for r in radii]
        hats = [abs(box_average(f, geometry.Point(r), cfg)) for r in radii]
    except RefinementUnstable as exc:
        warnings.warn('precondition check on %s inconclusive: %s' % (f.name, exc), PreconditionWarning)
        return
    if vals[-1] > vals[0] + Thresholds.eps:
        warnings.warn('bwmo of %s does not decrease toward the boundary' % f.name, PreconditionWarning)
    if not np.all(np.isfinite(hats)):
        warnings.warn('average function of %s is unbounded on the lattice' % f.name, PreconditionWarning)


# In[4]:
@dataclass
class SpectrumReport:
    n: int
    eigenvalues: np.ndarray = field(repr=False)
    cluster: ClusterSet = field(repr=False)
    essential_norm: float
    name: str = ''
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=complex)
        if self.eigenvalues.size != self.n:
            raise BadParameters('expected %d eigenvalues, got %d' % (self.n, self.eigenvalues.size))

    def to_dict(self, config=None):
        return {'schema': SCHEMA, 'version': __version__, 'name': self.name, 'n': self.n,
                'eigenvalues': self.eigenvalues, 'cluster': self.cluster.to_dict(),
                'essential_norm': self.essential_norm, 'metadata': self.metadata, 'config': config or {}}

    def to_json(self, config=None):
        return dumps(self.to_dict(config))

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get('schema') != SCHEMA:
            raise BadParameters('unknown spectrum schema %r' % d.get('schema'))
        pairs = np.asarray(d['eigenvalues'], dtype=float).reshape(-1, 2)
        c = d['cluster']
        cv = np.asarray(c['values'], dtype=float)
        cluster = ClusterSet(c['radii'], c['angles'], cv[..., 0] + 1j * cv[..., 1], c['which'], c['name'])
        return cls(d['n'], pairs[:, 0] + 1j * pairs[:, 1], cluster, d['essential_norm'], d.get('name', ''),
                   d.get('metadata', {}))
