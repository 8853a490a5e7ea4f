"""
Invariant suite run by ``bergosc check`` and required green before anchors are regenerated.

Each check returns (passed, value, detail). Checks reach geometry through the
module attribute so a patched formula is seen by every check.
"""
import logging
import time
from dataclasses import dataclass

import numpy as np

from . import geometry, operators, oscillation, quadrature, spectra, symbols

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float = np.nan
    detail: str = ''
    seconds: float = 0.0


# In[1]:
def check_box_area():
    worst = 0.0
    one = symbols.one()
    for r in (0.0, 0.5, 0.9, 0.99):
        z = geometry.Point(r)
        exact = geometry.box_area(z)
        num = quadrature.integrate_box(one, geometry.box(z)).real
        worst = max(worst, abs(num - exact) / exact)
    return worst <= 1e-10, worst, 'relative error of the closed-form box area'


def check_decomposition():
    level = 8
    total = sum(2 ** (k + 1) * geometry.box_area(geometry.decomposition_center(k, 0)) for k in range(level + 1))
    err = abs(total - (1.0 - 2.0 ** -(level + 1)) ** 2)
    return err <= 1e-10, err, 'box areas telescope to the covered disc through level %d' % level


def check_inclusion_exclusion():
    rng = np.random.default_rng(3)
    one = symbols.one()
    worst = 0.0
    for _ in range(20):
        z = geometry.Point(rng.uniform(0.0, 0.95), rng.uniform(0, 2 * np.pi))
        b = geometry.box(z)
        rho = np.sort(rng.uniform(b.rho_lo, b.rho_hi, 2))
        phi = np.sort(rng.uniform(b.phi_lo, b.phi_hi, 2))
        z1, z2 = geometry.Point(rho[0], phi[0]), geometry.Point(rho[1], phi[1])
        total = sum(g * geometry.sub_box(z, w).area for w, g in oscillation.inclusion_exclusion_corners(z, z1, z2))
        direct = geometry.rectangle(z, z1, z2).area
        worst = max(worst, abs(total - direct))
        worst = max(worst, abs(oscillation.box_average(one, z) - 1.0))
    return worst <= 1e-12, worst, 'area inclusion-exclusion and unit averages'


def check_toeplitz_closed_forms():
    n = np.arange(64)
    T1 = np.asarray(operators.toeplitz_matrix(symbols.one(), 64))
    d = operators.toeplitz_radial_diag(symbols.abs_sq(), 64).real
    e1 = np.abs(T1 - np.eye(64)).max()
    e2 = np.abs(d / ((n + 1.0) / (n + 2.0)) - 1.0).max()
    return e1 <= 1e-12 and e2 <= 1e-10, max(e1, e2), 'T_1 = I and T_|z|^2 = diag((n+1)/(n+2))'


def check_berezin_fixed_points():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(5):
        z = geometry.Point(rng.uniform(0, 0.9), rng.uniform(0, 2 * np.pi))
        worst = max(worst, abs(operators.berezin_symbol(symbols.const(2.0), z) - 2.0))
        for k in (1, 2, 3):
            worst = max(worst, abs(operators.berezin_symbol(symbols.zk(k), z) - z.value ** k))
    return worst <= 1e-8, worst, 'constants and z^k are fixed by the Berezin transform'


def check_berezin_closed_form():
    worst = 0.0
    for r in (0.1, 0.5, 0.9):
        t = r * r
        exact = 1.0 - (1.0 - t) * ((1.0 - t) * np.log1p(-t) + t) / t ** 2
        worst = max(worst, abs(operators.berezin_symbol(symbols.abs_sq(), geometry.Point(r)) - exact))
    return worst <= 1e-7, worst, 'Berezin transform of |w|^2'


def check_eigensolver():
    C = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
    lam = np.sort_complex(spectra.eigenvalues(C))
    roots = np.sort_complex(np.exp(2j * np.pi * np.arange(3) / 3))
    err = float(np.abs(lam - roots).max())
    D = np.diag(np.arange(1.0, 9.0))
    err = max(err, float(np.abs(np.sort(spectra.eigenvalues(D).real) - np.arange(1.0, 9.0)).max()))
    return err <= 1e-10, err, 'companion of l^3 - 1 and a diagonal matrix'


def check_winding():
    errs = []
    for k in (1, 2, 3):
        c = spectra.CurveSamples.from_function(lambda th, k=k: 0.95 ** k * np.exp(1j * k * th), 64, 0.95)
        errs.append(spectra.winding_number(c) - k)
    c = spectra.CurveSamples.from_function(lambda th: np.exp(-1j * th), 64)
    errs.append(spectra.winding_number(c) + 1)
    bad = int(np.count_nonzero(errs))
    return bad == 0, float(bad), 'windings of z^k and of e^{-i theta}'


def check_example45_vwmo():
    p = oscillation.vwmo_profile(symbols.example45(1.0, 1.0), radii=[0.9, 0.95, 0.99, 0.995, 0.999])
    return p.vanishes(), p.slope, 'vwmo profile of example45(1,1) vanishes'


def check_compactness_diagonal():
    d = np.abs(operators.toeplitz_radial_diag(symbols.example45(1.0, 1.0), 256))
    ratio = d[128:].max() / d.max()
    return ratio <= 0.1, ratio, 'diagonal of T_f for example45(1,1) decays'


def check_index():
    idx = [spectra.fredholm_index(symbols.zk(k), radii=[0.995, 0.999], angles=32) for k in (1, 2)]
    return idx == [-1, -2], float(idx[-1]), 'index of T_{z^k} is -k'


def check_semi_commutator():
    f, g = symbols.rand_smooth(1, K=2), symbols.rand_smooth(2, K=2)
    lhs, rhs = operators.semi_commutator_check(f, g, 16)
    err = abs(lhs - rhs)
    return err <= 1e-6, err, '||(T_f T_g - T_fg) e_0|| = ||P M_f H_g e_0||'


FAST = [check_box_area, check_decomposition, check_inclusion_exclusion, check_toeplitz_closed_forms,
        check_berezin_fixed_points, check_berezin_closed_form, check_eigensolver, check_winding]
FULL = FAST + [check_example45_vwmo, check_compactness_diagonal, check_index, check_semi_commutator]


def run_checks(fast=True, names=None):
    """Run the suite; exceptions count as failures."""
    suite = FAST if fast else FULL
    if names is not None:
        suite = [c for c in FULL if c.__name__.replace('check_', '') in names]
    out = []
    for check in suite:
        name = check.__name__.replace('check_', '')
        t0 = time.perf_counter()
        try:
            passed, value, detail = check()
        except Exception as exc:  # a crashing check is a failing check
            passed, value, detail = False, np.nan, '%s: %s' % (type(exc).__name__, exc)
        out.append(CheckResult(name, bool(passed), float(value), detail, time.perf_counter() - t0))
        logger.info('%s %s (%.3g) in %.1fs', 'PASS' if passed else 'FAIL', name, value, out[-1].seconds)
    return out
