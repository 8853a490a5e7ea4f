"""
Geometry of the unit disc: Moebius maps, the Bergman metric, hyperbolic discs,
Carleson-type boxes with their partial order, and the dyadic box decomposition.

Angles of boxes are stored unreduced, so a box may reach past 2*pi; membership
and sub-box logic reduce mod 2*pi only when comparing.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BadParameters, OrderViolation, PointOutsideBox, RootFindFailure

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
_ANGLE_TOL = 1e-12


# In[1]:
@dataclass(frozen=True)
class Point:
    r: float
    theta: float = 0.0

    def __post_init__(self):
        r = float(self.r)
        if not 0.0 <= r < 1.0:
            raise BadParameters('point radius must lie in [0, 1), got %r' % r)
        theta = float(self.theta) % TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
        object.__setattr__(self, 'r', r)
        object.__setattr__(self, 'theta', theta)

    @classmethod
    def from_complex(cls, w):
        w = complex(w)
        return cls(abs(w), np.angle(w))

    @property
    def value(self):
        return self.r * np.exp(1j * self.theta)

    def __complex__(self):
        return complex(self.value)


def as_point(z):
    if isinstance(z, Point):
        return z
    return Point.from_complex(z)


def _cplx(z):
    if isinstance(z, Point):
        return z.value
    return z


# In[2]:
@dataclass(frozen=True)
class Box:
    """Polar rectangle [rho_lo, rho_hi] x [phi_lo, phi_hi]; phi_hi may exceed 2*pi."""
    rho_lo: float
    rho_hi: float
    phi_lo: float
    phi_hi: float

    def __post_init__(self):
        if not 0.0 <= self.rho_lo <= self.rho_hi < 1.0:
            raise BadParameters('bad radial interval [%r, %r]' % (self.rho_lo, self.rho_hi))
        if self.phi_hi < self.phi_lo or self.phi_hi - self.phi_lo > TWO_PI + _ANGLE_TOL:
            raise BadParameters('bad angular interval [%r, %r]' % (self.phi_lo, self.phi_hi))

    @property
    def width(self):
        return self.phi_hi - self.phi_lo

    @property
    def area(self):
        # normalized measure dA = rho drho dphi / pi
        return (self.rho_hi ** 2 - self.rho_lo ** 2) * self.width / TWO_PI

    @property
    def degenerate(self):
        return self.rho_hi == self.rho_lo or self.width == 0.0

    def unreduced_angle(self, phi):
        """Representative of phi in [phi_lo, phi_lo + 2*pi)."""
        d = np.mod(np.asarray(phi, dtype=float) - self.phi_lo, TWO_PI)
        # points sitting a rounding error below phi_lo belong to the lower edge
        d = np.where(d > TWO_PI - _ANGLE_TOL, 0.0, d)
        return self.phi_lo + d

    def contains(self, w, tol=_ANGLE_TOL):
        """Membership of complex w (array-friendly); a negative tol tests the interior."""
        w = np.asarray(_cplx(w))
        rho = np.abs(w)
        phi = self.unreduced_angle(np.angle(w))
        inside = (rho >= self.rho_lo - tol) & (rho <= self.rho_hi + tol)
        inside &= (phi >= self.phi_lo - tol) & (phi <= self.phi_hi + tol)
        if tol < 0 or self.rho_lo > 0:
            return inside
        # the origin has no angle
        return inside | (rho <= tol)

    def corner(self):
        return Point(self.rho_hi, self.phi_hi)


# In[3]:
def mobius(z, w):
    """phi_z(w) = (z - w) / (1 - w conj(z)); w may be an array."""
    z = complex(_cplx(z))
    w = _cplx(w)
    return (z - w) / (1 - w * np.conj(z))


def bergman_distance(z, w):
    return np.arctanh(np.minimum(np.abs(mobius(z, w)), 1.0))


# In[4]:
def box(z):
    """Carleson-type box B(z) = [r, 1 - (1-r)/2] x [theta, theta + pi (1-r)]."""
    z = as_point(z)
    h = 1.0 - z.r
    return Box(z.r, 1.0 - 0.5 * h, z.theta, z.theta + np.pi * h)


def box_area(z):
    h = 1.0 - as_point(z).r
    return 0.5 * h ** 2 - 0.375 * h ** 3


def box_coordinates(z, zeta):
    b = box(z)
    zeta = as_point(zeta)
    if not bool(b.contains(zeta.value)):
        raise PointOutsideBox('%r is not in B(%r)' % (zeta, as_point(z)))
    rho = min(max(zeta.r, b.rho_lo), b.rho_hi)
    phi = float(min(max(b.unreduced_angle(zeta.theta), b.phi_lo), b.phi_hi))
    if zeta.r == 0.0:
        phi = b.phi_lo
    return b, rho, phi


def rectangle(z, zeta1, zeta2):
    """The polar rectangle B(zeta1, zeta2) inside B(z), in the unreduced coordinates of B(z)."""
    _, rho1, phi1 = box_coordinates(z, zeta1)
    _, rho2, phi2 = box_coordinates(z, zeta2)
    if rho1 > rho2 or phi1 > phi2:
        raise OrderViolation('%r does not precede %r in B(%r)' % (zeta1, zeta2, z))
    return Box(rho1, rho2, phi1, phi2)


def sub_box(z, zeta):
    """B(z, zeta) = [r, rho] x [theta, phi] with phi read unreduced in B(z)."""
    return rectangle(z, z, zeta)


def precsim(zeta1, zeta2, z):
    _, rho1, phi1 = box_coordinates(z, zeta1)
    _, rho2, phi2 = box_coordinates(z, zeta2)
    return rho1 <= rho2 and phi1 <= phi2


# In[5]:
def locate_box(w):
    """(level, index) of the decomposition box containing w."""
    w = complex(_cplx(w))
    rho = abs(w)
    if rho >= 1.0:
        raise BadParameters('point outside the disc')
    k = 0 if rho < 0.5 else int(np.floor(-np.log2(1.0 - rho)))
    while k > 0 and rho < 1.0 - 2.0 ** -k:
        k -= 1
    while rho >= 1.0 - 2.0 ** -(k + 1):
        k += 1
    arc = np.pi * 2.0 ** -k
    j = int(np.floor((np.angle(w) % TWO_PI) / arc)) % 2 ** (k + 1)
    return k, j


def decomposition_center(k, j):
    return Point(1.0 - 2.0 ** -k, j * np.pi * 2.0 ** -k)


def disc_decomposition(max_level):
    """
    Dyadic boxes B(z_kj), r_k = 1 - 2^-k, 2^(k+1) equal arcs per level.
    :param max_level: deepest level (inclusive)
    :return: list of (center, box); the union covers |z| <= 1 - 2^-(max_level+1)
    """
    if max_level < 0:
        raise BadParameters('max_level must be nonnegative')
    out = []
    for k in range(max_level + 1):
        for j in range(2 ** (k + 1)):
            c = decomposition_center(k, j)
            out.append((c, box(c)))
    return out


# In[6]:
@dataclass(frozen=True, eq=False)
class DiscRegion:
    """
    Hyperbolic disc D(z, r_h) in polar form: phi in phis, r1(phi) <= rho <= r2(phi).
    ``weights`` integrate functions of phi over the angular range.
    """
    center: Point
    r_h: float
    theta0: float
    phis: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    r1: np.ndarray = field(repr=False)
    r2: np.ndarray = field(repr=False)
    euclid_center: complex = 0j
    euclid_radius: float = 0.0

    @property
    def contains_origin(self):
        return abs(self.euclid_center) < self.euclid_radius

    @property
    def area(self):
        return self.euclid_radius ** 2

    def boundary(self):
        """Boundary samples as complex numbers (both radial ends, interior angles only)."""
        e = np.exp(1j * self.phis)
        pts = [self.r2 * e]
        if not self.contains_origin:
            pts.append(self.r1 * e)
        return np.concatenate(pts)

    def contains(self, w):
        w = np.asarray(w)
        return np.abs(w - self.euclid_center) < self.euclid_radius


def euclidean_disc(z, r_h):
    """Euclidean center and radius of D(z, r_h)."""
    a = as_point(z).r
    zc = complex(_cplx(as_point(z)))
    s = np.tanh(r_h)
    den = 1.0 - s ** 2 * a ** 2
    return (1.0 - s ** 2) * zc / den, s * (1.0 - a ** 2) / den


def hyperbolic_disc(z, r_h, n_angles=128, xtol=1e-14):
    """
    Polar presentation of D(z, r_h) = {w : beta(z, w) < r_h}.
    Boundary radii are root-found per angle on rho -> beta(z, rho e^{i phi}) - r_h.
    :param z: center
    :param r_h: hyperbolic radius
    :param n_angles: angular samples
    :param xtol: bracketing tolerance handed to brentq
    :return: DiscRegion
    """
    if r_h <= 0:
        raise BadParameters('hyperbolic radius must be positive')
    z = as_point(z)
    c, radius = euclidean_disc(z, r_h)
    ca = abs(c)
    hi = 1.0 - 1e-15

    def g(rho, phi):
        return bergman_distance(z, rho * np.exp(1j * phi)) - r_h

    if ca < radius:
        phis = z.theta + np.arange(n_angles) * TWO_PI / n_angles
        weights = np.full(n_angles, TWO_PI / n_angles)
        r1 = np.zeros(n_angles)
        r2 = np.empty(n_angles)
        for i, phi in enumerate(phis):
            try:
                r2[i] = brentq(g, 0.0, hi, args=(phi,), xtol=xtol)
            except ValueError as exc:
                raise RootFindFailure('no bracket on ray %.6g from %r' % (phi, z)) from exc
        theta0 = np.pi
    else:
        theta0 = float(np.arcsin(min(radius / ca, 1.0)))
        x, w = np.polynomial.legendre.leggauss(n_angles)
        t = 0.5 * np.pi * x
        psi = theta0 * np.sin(t)
        phis = z.theta + psi
        weights = w * theta0 * np.cos(t) * 0.5 * np.pi
        r1 = np.empty(n_angles)
        r2 = np.empty(n_angles)
        for i, (phi, p) in enumerate(zip(phis, psi)):
            mid = ca * np.cos(p)
            gm = g(mid, phi)
            if gm >= 0:
                r1[i] = r2[i] = mid
                continue
            try:
                r1[i] = brentq(g, 0.0, mid, args=(phi,), xtol=xtol)
                r2[i] = brentq(g, mid, hi, args=(phi,), xtol=xtol)
            except ValueError as exc:
                raise RootFindFailure('no bracket on ray %.6g from %r' % (phi, z)) from exc
    assert np.all(r2 < 1.0)
    return DiscRegion(center=z, r_h=float(r_h), theta0=theta0, phis=phis, weights=weights, r1=r1, r2=r2,
                      euclid_center=complex(c), euclid_radius=float(radius))


def comparability_constant(d):
    """Smallest C with (1-r)/C <= 1-|w| <= C(1-r) over the boundary samples of d."""
    h = 1.0 - d.center.r
    q = (1.0 - np.abs(d.boundary())) / h
    return float(max(q.max(), 1.0 / q.min()))


def covering_count(d, n_radial=16):
    """Number of decomposition boxes met by a sample of D(z, r_h)."""
    t = np.linspace(0.0, 1.0, n_radial)
    rho = d.r1[:, None] + (d.r2 - d.r1)[:, None] * t[None, :]
    pts = (rho * np.exp(1j * d.phis)[:, None]).ravel()
    pts = np.concatenate([pts, [d.center.value]])
    return len({locate_box(w) for w in pts})
