"""
Mean-oscillation functionals: box and disc averages, BMO^p, the oscillation
omega, and the weak oscillation functionals built on the sup over sub-boxes
B(z, zeta) of B(z).

Sups over zeta are taken at the corners of a prefix table and confirmed by one
doubling of the grid; sups over z run over a lattice of radii and angles.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .config import SCHEMA, Thresholds, __version__
from .errors import AreaRatioViolation, BadParameters, OrderViolation, RefinementUnstable
from .quadrature import area_table, disc_rule, integrate_box, integrate_disc, prefix_table, resolve, tail_start
from .symbols import Symbol
from .utils import csv_text, dumps, fit_loglog_slope, ordered_map

logger = logging.getLogger(__name__)


# In[1]:
@dataclass
class OscillationReport:
    z: geometry.Point
    functional: str
    value: float
    delta: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {'z': [self.z.r, self.z.theta], 'functional': self.functional, 'value': self.value,
                'refinement_delta': self.delta, 'metadata': self.metadata}


@dataclass
class RadialProfile:
    """Per-radius values of a functional with the log-log slope against 1 - r."""
    radii: np.ndarray
    values: np.ndarray
    name: str = ''
    functional: str = ''
    metadata: dict = field(default_factory=dict)
    slope: float = field(init=False)
    residual: float = field(init=False)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.radii.shape != self.values.shape or self.radii.ndim != 1:
            raise BadParameters('one value per radius expected')
        if np.any(np.diff(self.radii) <= 0) or np.any(self.radii <= 0) or np.any(self.radii >= 1):
            raise BadParameters('profile radii must increase strictly inside (0, 1)')
        if self.radii.size >= Thresholds.min_profile_points:
            self.slope, self.residual = fit_loglog_slope(self.radii, self.values)
        else:
            self.slope, self.residual = np.nan, np.nan

    def slopes_to_date(self):
        out = [np.nan]
        for k in range(2, self.radii.size + 1):
            out.append(fit_loglog_slope(self.radii[:k], self.values[:k])[0])
        return np.asarray(out)

    @property
    def head(self):
        return float(self.values[0])

    @property
    def tail(self):
        return float(self.values[-1])

    def vanishes(self, ratio=None):
        """Positive slope and last value below ``ratio`` times the first."""
        ratio = Thresholds.decay_ratio if ratio is None else ratio
        if np.all(self.values <= Thresholds.eps):
            return True
        return bool(self.slope > 0 and self.tail < ratio * self.head)

    def bounded(self, ratio=None):
        ratio = Thresholds.bounded_ratio if ratio is None else ratio
        return bool(self.values.max() < ratio * max(self.values.min(), Thresholds.eps))

    def slope_within(self, target, window=None):
        window = Thresholds.slope_window if window is None else window
        return bool(abs(self.slope - target) <= window)

    def to_csv(self):
        rows = zip(self.radii, self.values, self.slopes_to_date())
        return csv_text(['r', 'value', 'slope_to_date'], rows)

    def to_dict(self, config=None):
        return {'schema': SCHEMA, 'version': __version__, 'name': self.name, 'functional': self.functional,
                'radii': self.radii, 'values': self.values, 'slope': self.slope, 'residual': self.residual,
                'metadata': self.metadata, 'config': config or {}}

    def to_json(self, config=None):
        return dumps(self.to_dict(config))

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get('schema') != SCHEMA:
            raise BadParameters('unknown profile schema %r' % d.get('schema'))
        return cls(d['radii'], d['values'], name=d.get('name', ''), functional=d.get('functional', ''),
                   metadata=d.get('metadata', {}))


# In[2]:
def box_average(f, z, cfg=None):
    """f^(z): integral of f over B(z) divided by |B(z)|."""
    cfg = resolve(cfg)
    b = geometry.box(z)
    if b.degenerate:
        raise BadParameters('degenerate box at %r' % (z,))
    area = geometry.box_area(z)
    return integrate_box(f, b, cfg, tol=cfg.tol * area) / area


def partial_average(f, z, zeta, cfg=None):
    """Integral over B(z, zeta) divided by |B(z)|, not by |B(z, zeta)|."""
    cfg = resolve(cfg)
    sb = geometry.sub_box(z, zeta)
    area = geometry.box_area(z)
    if sb.degenerate:
        return 0j
    return integrate_box(f, sb, cfg, tol=cfg.tol * area) / area


def disc_average(f, z, r_h=1.0, cfg=None, n_angles=128):
    cfg = resolve(cfg)
    d = geometry.hyperbolic_disc(z, r_h, n_angles)
    return integrate_disc(f, d, cfg, tol=cfg.tol * d.area) / d.area


def _level_crossings(f, level, a, c, cfg):
    """Radii in (a, c) where the real oscillatory symbol f crosses ``level``."""
    b = f.phase_b
    lo = max([a] + [x for x in f.breaks if x < c])
    upper = c if c < 1.0 else tail_start(b, lo, cfg)
    if upper <= lo:
        return np.empty(0)
    m0 = int(np.floor((1.0 - lo) ** -b / np.pi))
    m1 = int(np.ceil((1.0 - upper) ** -b / np.pi))
    if m1 - m0 > cfg.max_phase_panels:
        return np.empty(0)
    m = np.arange(max(m0, 1), m1 + 1)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    out = []
    for branch in (0, 1):
        rho = 1.0 - (m * np.pi) ** (-1.0 / b)
        ok = np.ones(m.size, dtype=bool)
        for _ in range(3):
            rem = (f(rho) - f.oscillatory_part(rho)).real
            s = sign * (level - rem) / f.envelope(rho).real
            ok = (s >= 0) & (s <= 1)
            delta = np.arcsin(np.clip(s, 0.0, 1.0))
            psi = m * np.pi + delta if branch == 0 else (m + 1) * np.pi - delta
            rho = 1.0 - psi ** (-1.0 / b)
        out.append(rho[ok])
    rho = np.concatenate(out)
    return rho[(rho > a) & (rho < c)]


def deviation(f, c, p=1.0):
    """|f - c|^p, with panel edges at the level crossings of real oscillatory radial f."""
    g = abs(f - c)
    if p != 1.0:
        g = g ** p
    level = complex(c)
    if f.radial and f.real and f.envelope is not None and abs(level.imag) <= 1e-12 * max(abs(level), 1.0):
        g.kinks = lambda a, b, cfg: _level_crossings(f, level.real, a, b, cfg)
    return g


def bmo_local(f, z, p=1.0, r_h=1.0, cfg=None, n_angles=128):
    """(1/|D|) int_D |f - f^_r(z)|^p dA over D = D(z, r_h)."""
    if p < 1:
        raise BadParameters('BMO^p needs p >= 1')
    cfg = resolve(cfg)
    d = geometry.hyperbolic_disc(z, r_h, n_angles)
    c = integrate_disc(f, d, cfg, tol=cfg.tol * d.area) / d.area
    val = integrate_disc(deviation(f, c, p), d, cfg, tol=cfg.tol * d.area) / d.area
    return float(val.real)


# In[3]:
def average_symbol(f, cfg=None):
    """The average function f^ as a Symbol; radial when f is."""
    cfg = resolve(cfg)

    def rule(r, p):
        out = np.empty(r.shape, dtype=complex)
        if f.radial:
            uniq, inv = np.unique(r, return_inverse=True)
            vals = np.array([box_average(f, geometry.Point(x), cfg) for x in uniq])
            return vals[inv].reshape(r.shape)
        for idx in np.ndindex(r.shape):
            out[idx] = box_average(f, geometry.Point(r[idx], p[idx]), cfg)
        return out

    return Symbol(rule, name='hat(%s)' % f.name, radial=f.radial, bounded=f.bounded, bound=f.bound,
                  integrability='L1', continuous=True, real=f.real)


def disc_average_symbol(f, r_h=1.0, cfg=None, n_angles=64):
    """f^_r as a Symbol."""
    cfg = resolve(cfg)

    def rule(r, p):
        out = np.empty(r.shape, dtype=complex)
        if f.radial:
            uniq, inv = np.unique(r, return_inverse=True)
            vals = np.array([disc_average(f, geometry.Point(x), r_h, cfg, n_angles) for x in uniq])
            return vals[inv].reshape(r.shape)
        for idx in np.ndindex(r.shape):
            out[idx] = disc_average(f, geometry.Point(r[idx], p[idx]), r_h, cfg, n_angles)
        return out

    return Symbol(rule, name='hat%g(%s)' % (r_h, f.name), radial=f.radial, bounded=f.bounded, bound=f.bound,
                  integrability='L1', continuous=True, real=f.real)


def _omega_samples(f, z, d, n_angles, n_radial):
    if f.radial:
        ca, radius = abs(d.euclid_center), d.euclid_radius
        rho = np.linspace(max(ca - radius, 0.0), ca + radius, n_angles * n_radial)
        return np.abs(f(z.r) - f(rho))
    idx = np.linspace(0, d.phis.size - 1, n_angles).round().astype(int)
    t = np.linspace(0.0, 1.0, n_radial)
    rho = d.r1[idx, None] + (d.r2 - d.r1)[idx, None] * t[None, :]
    phi = np.broadcast_to(d.phis[idx, None], rho.shape)
    return np.abs(f(z.r, z.theta) - f(rho, phi))


def oscillation_omega(f, z, cfg=None, n_angles=16, n_radial=4, full_output=False):
    """
    omega(f)(z) = sup over D(z, 1) of |f(z) - f(w)| on a sample grid, confirmed by one doubling.
    :param f: continuous Symbol
    :return: the refined sup, or an OscillationReport with full_output
    """
    if not f.continuous:
        raise BadParameters('oscillation is defined for continuous symbols; %s is not' % f.name)
    z = geometry.as_point(z)
    d = geometry.hyperbolic_disc(z, 1.0, max(4 * n_angles, 64))
    coarse = float(np.max(_omega_samples(f, z, d, n_angles, n_radial)))
    fine = float(np.max(_omega_samples(f, z, d, 2 * n_angles, 2 * n_radial)))
    value = max(coarse, fine)
    if full_output:
        return OscillationReport(z, 'omega', value, abs(fine - coarse),
                                 {'angles': 2 * n_angles, 'radial': 2 * n_radial})
    return value


# In[4]:
def _sup_abs(t):
    if t.separable:
        return float(np.max(np.abs(t.radial)) * t.angular[-1] / np.pi)
    return float(np.max(np.abs(t.S)))


def _deviation_table(f, z, grid, cfg):
    """Prefix table of f - f^(z) and the average f^(z) itself."""
    t = prefix_table(f, z, grid, cfg)
    one = area_table(t)
    c = t.total / geometry.box_area(z)
    if t.separable:
        t.radial = t.radial - c * one.radial
    else:
        t.table = t.table - c * one.S
    return t, c


def _gated(func, f, z, grid, cfg, name, full_output):
    cfg = resolve(cfg)
    grid = tuple(Thresholds.prefix_grid if grid is None else grid)
    if min(grid) < 16:
        raise BadParameters('%s needs a grid of at least 16 x 16' % name)
    v1 = func(f, z, grid, cfg)
    v2 = func(f, z, (2 * grid[0], 2 * grid[1]), cfg)
    delta = abs(v2 - v1) / max(v2, Thresholds.eps)
    if delta > Thresholds.refinement_gate:
        raise RefinementUnstable('%s of %s at %r moved by %.3g under grid doubling' % (name, f.name, z, delta),
                                 coarse=v1, fine=v2)
    logger.debug('%s(%s, %r) = %.6g (delta %.2g)', name, f.name, z, v2, delta)
    if full_output:
        return OscillationReport(geometry.as_point(z), name, v2, delta, {'grid': [2 * grid[0], 2 * grid[1]]})
    return v2


def _averaging(f, z, grid, cfg):
    return _sup_abs(prefix_table(f, z, grid, cfg)) / geometry.box_area(z)


def _bwmo(f, z, grid, cfg):
    return _sup_abs(_deviation_table(f, z, grid, cfg)[0]) / geometry.box_area(z)


def averaging_local(f, z, grid=None, cfg=None, full_output=False):
    """sup over zeta in B(z) of |f^(z, zeta)|."""
    return _gated(_averaging, f, z, grid, cfg, 'averaging', full_output)


def bwmo_local(f, z, grid=None, cfg=None, full_output=False):
    """sup over zeta in B(z) of |int_{B(z, zeta)} (f - f^(z)) dA| / |B(z)|."""
    return _gated(_bwmo, f, z, grid, cfg, 'bwmo', full_output)


def _diameter(v):
    v = np.asarray(v)
    if np.all(np.abs(v.imag) <= 1e-15 * max(np.abs(v).max(), 1e-300)):
        return float(np.ptp(v.real))
    a = np.exp(-1j * np.pi * np.arange(64) / 64)
    return float(np.max(np.ptp((v[:, None] * a[None, :]).real, axis=0)))


def _rectangle(f, z, grid, cfg):
    t, _ = _deviation_table(f, z, grid, cfg)
    if t.separable:
        return _diameter(t.radial) * t.angular[-1] / np.pi / geometry.box_area(z)
    S = t.S
    best = 0.0
    for j1 in range(S.shape[1] - 1):
        cols = S[:, j1 + 1:] - S[:, j1:j1 + 1]
        for col in cols.T:
            best = max(best, _diameter(col))
    return best / geometry.box_area(z)


def rectangle_oscillation(f, z, grid=None, cfg=None, full_output=False):
    """sup over zeta1 <= zeta2 in B(z) of |int_{B(zeta1, zeta2)} (f - f^(z)) dA| / |B(z)|."""
    return _gated(_rectangle, f, z, grid, cfg, 'rectangle', full_output)


def inclusion_exclusion_corners(z, zeta1, zeta2):
    """
    Corners w_j with signs g_j such that sum_j g_j int_{B(z, w_j)} = int_{B(zeta1, zeta2)}.
    :return: [(zeta2, +1), (rho1 e^{i phi2}, -1), (rho2 e^{i phi1}, -1), (zeta1, +1)]
    """
    b, rho1, phi1 = geometry.box_coordinates(z, zeta1)
    _, rho2, phi2 = geometry.box_coordinates(z, zeta2)
    if rho1 < b.rho_lo or phi1 < b.phi_lo or rho1 > rho2 or phi1 > phi2:
        raise OrderViolation('corners need z <= zeta1 <= zeta2 in B(%r)' % (z,))
    P = geometry.Point
    return [(P(rho2, phi2), 1), (P(rho1, phi2), -1), (P(rho2, phi1), -1), (P(rho1, phi1), 1)]


def subrectangle_gap(f, z, z_tilde, zeta, cfg=None):
    """|f^(z) - f^_K| for the rectangle K = B(z_tilde, zeta) with |B(z)| <= 2|K|."""
    cfg = resolve(cfg)
    k = geometry.rectangle(z, z_tilde, zeta)
    ratio = geometry.box_area(z) / max(k.area, 1e-300)
    if ratio > 2.0 * (1 + 1e-12):
        raise AreaRatioViolation('|B(z)|/|K| = %.6g exceeds 2' % ratio)
    inner = integrate_box(f, k, cfg, tol=resolve(cfg).tol * k.area) / k.area
    return float(abs(box_average(f, z, cfg) - inner))


# In[5]:
def lattice(radii=None, angles=None, radial=False):
    radii = Thresholds.profile_radii() if radii is None else np.asarray(radii, dtype=float)
    if angles is None:
        angles = 1 if radial else Thresholds.profile_angles
    angles = 2 * np.pi * np.arange(angles) / angles if np.isscalar(angles) else np.asarray(angles, dtype=float)
    return radii, angles


def radial_profile(func, radii, angles, sub_radii=1, name='', functional='', n_jobs=1, progress=False,
                   metadata=None):
    """
    For each radius r, the max of func(z) over the sampled angles and over ``sub_radii``
    radii of the annulus r <= |z| <= 1 - (1 - r)/2.
    """
    radii = np.asarray(radii, dtype=float)
    angles = np.asarray(angles, dtype=float)
    points = []
    for r in radii:
        sub = np.linspace(r, 1.0 - 0.5 * (1.0 - r), sub_radii) if sub_radii > 1 else [r]
        points.extend(geometry.Point(s, a) for s in sub for a in angles)
    vals = np.abs(np.asarray(ordered_map(func, points, n_jobs, progress, desc=functional or name)))
    vals = vals.reshape(radii.size, -1).max(axis=1)
    meta = {'angles': int(angles.size), 'sub_radii': int(sub_radii)}
    meta.update(metadata or {})
    return RadialProfile(radii, vals, name=name, functional=functional, metadata=meta)


def bwmo_seminorm(f, radii=None, angles=None, grid=None, cfg=None, n_jobs=1, progress=False, full_output=False):
    """Max of bwmo_local over the lattice; an under-approximation of the seminorm."""
    radii, angles = lattice(radii, angles, f.radial)
    points = [geometry.Point(r, a) for r in radii for a in angles]
    if not points:
        raise BadParameters('empty sample lattice')
    vals = ordered_map(lambda z: bwmo_local(f, z, grid, cfg), points, n_jobs, progress, desc='bwmo')
    value = float(np.max(vals))
    if full_output:
        return value, {'radii': radii, 'angles': angles, 'values': np.asarray(vals).reshape(radii.size, -1)}
    return value


def vwmo_profile(f, radii=None, angles=None, grid=None, cfg=None, n_jobs=1, progress=False):
    radii, angles = lattice(radii, angles, f.radial)
    return radial_profile(lambda z: bwmo_local(f, z, grid, cfg), radii, angles, name=f.name, functional='vwmo',
                          n_jobs=n_jobs, progress=progress, metadata={'grid': list(grid or Thresholds.prefix_grid)})


def average_oscillation(f, radii=None, angles=None, r_h=1.0, cfg=None, n_angles=16, n_radial=4, inner_angles=32,
                        n_jobs=1):
    """
    Max over the lattice of the D(z, r_h)-average of |f - f^_r|, where f^_r is
    evaluated at the nodes of a fixed disc rule.
    """
    radii, angles = lattice(radii, angles, f.radial)
    hat = disc_average_symbol(f, r_h, cfg, inner_angles)

    def one(z):
        d = geometry.hyperbolic_disc(z, r_h, n_angles)
        w, wts = disc_rule(d, n_radial)
        vals = np.abs(f.at(w) - hat.at(w))
        return float(np.sum(wts * vals) / np.sum(wts))

    points = [geometry.Point(r, a) for r in radii for a in angles]
    return float(np.max(ordered_map(one, points, n_jobs)))


def omega_ratio(f, radii=None, angles=None, grid=None, cfg=None, n_jobs=1):
    """
    (max of omega(f^) over the lattice, bwmo seminorm, their ratio with the seminorm floored at eps).
    """
    radii, angles = lattice(radii, angles, f.radial)
    hat = average_symbol(f, cfg)
    points = [geometry.Point(r, a) for r in radii for a in angles]
    om = float(np.max(ordered_map(lambda z: oscillation_omega(hat, z), points, n_jobs)))
    semi = bwmo_seminorm(f, radii, angles, grid, cfg, n_jobs)
    return om, semi, om / max(semi, Thresholds.eps)
