"""
Command line front end.

    bergosc profile  --symbol EXPR --functional {vwmo,bwmo,averaging,bmo,bmo1,hat,hat1,omega}
    bergosc spectrum --symbol EXPR --n N
    bergosc index    --symbol EXPR
    bergosc example45
    bergosc check [--fast]
    bergosc anchors [--path docs/anchors.json]

Symbol expressions combine library names with numbers, +, - and *:
``example45(b=1.5,beta=1)``, ``zk(2)``, ``const(1)``, ``rand(7)``, ``example45(1,1) + 1``.

Exit codes: 0 success, 1 failing checks, 2 configuration or expression error,
3 numerical failure.
"""
import argparse
import logging
import sys

import numpy as np

from . import anchors, checks, operators, oscillation, spectra
from .config import SCHEMA, Thresholds, __version__
from .errors import BadParameters, BergoscError, ConfigError, ExpressionError, NotFredholm, Unstable
from .quadrature import QuadratureConfig
from .symbols import example45, parse_symbol
from .utils import atomic_write, config_hash, csv_text, dat_text, dumps

logger = logging.getLogger(__name__)

FUNCTIONALS = ('vwmo', 'bwmo', 'averaging', 'bmo', 'bmo1', 'hat', 'hat1', 'omega')
STUDY_CASES = ((1.0, 1.0), (1.5, 1.0), (2.0, 1.0))
# phase panels allowed per integral in the example45 study
STUDY_BUDGET = 100000


# In[1]:
def _radii(text, n, inner, outer):
    if text is None:
        return Thresholds.profile_radii(n, inner, outer)
    try:
        radii = np.array([float(x) for x in text.split(',') if x.strip()])
    except ValueError as exc:
        raise ConfigError('bad radii list %r' % text) from exc
    if radii.size == 0 or np.any(radii <= 0) or np.any(radii >= 1) or np.any(np.diff(radii) <= 0):
        raise ConfigError('radii must increase strictly inside (0, 1)')
    return radii


def _grid(text):
    try:
        a, b = (int(x) for x in text.lower().split('x'))
    except ValueError as exc:
        raise ConfigError('grid must look like 16x16, got %r' % text) from exc
    return a, b


def _quadrature(args):
    return QuadratureConfig(panels=args.panels, nodes=args.nodes, tol=args.tol)


def _run_config(args, cfg, **extra):
    d = {k: v for k, v in vars(args).items() if k not in ('func', 'verbose') and not callable(v)}
    d.update(extra)
    d['quadrature'] = cfg.to_dict()
    d['version'] = __version__
    d['schema'] = SCHEMA
    d['hash'] = config_hash(d)
    return d


def _write(path, text):
    atomic_write(path, text)
    logger.info('wrote %s', path)


def _formats(args):
    fmts = set(f.strip() for f in args.format.split(','))
    unknown = fmts - {'csv', 'json', 'dat'}
    if unknown:
        raise ConfigError('unknown output formats %s' % ', '.join(sorted(unknown)))
    return fmts


# In[2]:
def compute_profile(f, functional, radii, angles=None, grid=None, cfg=None, p=1.0, n_jobs=1, progress=False):
    """RadialProfile of one of FUNCTIONALS."""
    if functional not in FUNCTIONALS:
        raise ConfigError('unknown functional %r' % functional)
    if angles is None:
        angles = 1 if f.radial else Thresholds.profile_angles
    thetas = 2 * np.pi * np.arange(angles) / angles
    sub = 1
    if functional in ('vwmo', 'bwmo'):
        func = lambda z: oscillation.bwmo_local(f, z, grid, cfg)
    elif functional == 'averaging':
        func = lambda z: oscillation.averaging_local(f, z, grid, cfg)
    elif functional in ('bmo', 'bmo1'):
        p = 1.0 if functional == 'bmo1' else p
        func = lambda z: oscillation.bmo_local(f, z, p, 1.0, cfg)
    elif functional == 'hat':
        sub = Thresholds.sub_radii
        func = lambda z: abs(oscillation.box_average(f, z, cfg))
    elif functional == 'hat1':
        sub = Thresholds.sub_radii
        func = lambda z: abs(oscillation.disc_average(f, z, 1.0, cfg))
    else:
        sub = Thresholds.sub_radii
        hat = oscillation.average_symbol(f, cfg)
        func = lambda z: oscillation.oscillation_omega(hat, z)
    return oscillation.radial_profile(func, radii, thetas, sub, name=f.name, functional=functional, n_jobs=n_jobs,
                                      progress=progress, metadata={'p': p} if functional == 'bmo' else None)


def profile_verdict(profile):
    fn = profile.functional
    slope = 'slope %.2f' % profile.slope
    if fn in ('vwmo', 'bwmo'):
        return 'VWMO proxy: %s, %s' % ('PASS' if profile.vanishes() else 'FAIL', slope)
    if fn in ('bmo', 'bmo1'):
        label = 'BMO%g' % profile.metadata.get('p', 1.0) if fn == 'bmo' else 'BMO1'
        if profile.bounded():
            return '%s: PASS (bounded), %s' % (label, slope)
        return '%s: FAIL (unbounded), %s' % (label, slope)
    if fn == 'averaging':
        return 'averaging-compactness proxy: %s, %s' % ('PASS' if profile.vanishes() else 'FAIL', slope)
    return '%s vanishing at the boundary: %s, %s' % (fn, 'PASS' if profile.vanishes() else 'FAIL', slope)


def cmd_profile(args, cfg):
    fmts = _formats(args)
    f = parse_symbol(args.symbol)
    radii = _radii(args.radii, args.n_radii, args.inner, args.outer)
    profile = compute_profile(f, args.functional, radii, args.angles, _grid(args.grid), cfg, args.p, args.n_jobs,
                              args.progress)
    run = _run_config(args, cfg, radii=radii)
    if 'csv' in fmts:
        _write(args.out + '.csv', profile.to_csv())
    if 'json' in fmts:
        _write(args.out + '.json', profile.to_json(run))
    if 'dat' in fmts:
        _write(args.out + '.dat', dat_text(['r', 'value'], zip(profile.radii, profile.values)))
    if args.plot:
        from . import plotting
        plotting.use_agg()
        plotting.save(plotting.profile_figure(profile), args.out + '.png')
    print(profile_verdict(profile))
    return 0


def cmd_spectrum(args, cfg):
    fmts = _formats(args)
    f = parse_symbol(args.symbol)
    T = operators.toeplitz_matrix(f, args.n, cfg, args.n_jobs)
    lam = spectra.eigenvalues(T)
    radii = _radii(args.radii, None, None, None) if args.radii else np.asarray(Thresholds.boundary_ladder)
    cluster = spectra.cluster_set(f, radii, args.angles, cfg, args.which, args.n_jobs, args.progress)
    ess = float(cluster.max_modulus[-1])
    report = spectra.SpectrumReport(args.n, lam, cluster, ess, f.name, {'which': args.which})
    run = _run_config(args, cfg, radii=radii)
    if 'json' in fmts:
        _write(args.out + '.json', report.to_json(run))
    if 'csv' in fmts:
        _write(args.out + '_eigs.csv', csv_text(['re', 'im'], zip(lam.real, lam.imag)))
    if 'dat' in fmts or 'csv' in fmts:
        rows = [(r, t, v.real, v.imag) for r, vals in zip(cluster.radii, cluster.values)
                for t, v in zip(cluster.angles, vals)]
        _write(args.out + '_cluster.dat', dat_text(['r', 'theta', 're', 'im'], rows))
    if args.plot:
        from . import plotting
        plotting.use_agg()
        plotting.save(plotting.spectrum_figure(lam, cluster), args.out + '.png')
    print('N=%d max|eig|=%.6g cluster max modulus %.6g -> %.6g, essential norm estimate %.6g'
          % (args.n, np.abs(lam).max(), cluster.max_modulus[0], cluster.max_modulus[-1], ess))
    return 0


def cmd_index(args, cfg):
    f = parse_symbol(args.symbol)
    radii = _radii(args.radii, None, None, None) if args.radii else np.asarray(Thresholds.boundary_ladder)
    result = {'symbol': f.name, 'radii': radii}
    try:
        index, info = spectra.fredholm_index(f, radii, args.angles, cfg, args.which, full_output=True)
        result.update(status='ok', index=index, windings=info['windings'], min_modulus=info['min_modulus'])
        print('index: %d (stable over r = %g, %g)' % (index, radii[-2], radii[-1]))
    except NotFredholm as exc:
        result.update(status='NotFredholm', detail=str(exc))
        print('index: NotFredholm (%s)' % exc)
    except Unstable as exc:
        result.update(status='Unstable', detail=str(exc), windings=exc.indices)
        print('index: Unstable (%s)' % exc)
    if args.out:
        result['config'] = _run_config(args, cfg, radii=radii)
        _write(args.out + '.json', dumps(result))
    return 0


# In[3]:
def study_radii(b, n, disc=False, budget=STUDY_BUDGET):
    """Profile radii in [0.9, 0.999] capped so integrals need at most ``budget`` phase panels."""
    depth = (np.pi * budget) ** (-1.0 / b)
    # boxes reach 1 - |w| = (1-r)/2, discs of radius 1 about (1-r)(1-tanh 1)/(1+tanh 1)
    reach = (1 - np.tanh(1.0)) / (1 + np.tanh(1.0)) if disc else 0.5
    outer = min(Thresholds.profile_outer, 1.0 - depth / reach)
    return Thresholds.profile_radii(n, Thresholds.profile_inner, outer)


def example45_row(b, beta, cfg, n_radii=8, N=256, n_jobs=1, progress=False):
    f = example45(b, beta)
    study = cfg.replace(max_phase_panels=STUDY_BUDGET)
    vw = compute_profile(f, 'vwmo', study_radii(b, n_radii), cfg=study, n_jobs=n_jobs, progress=progress)
    bmo = compute_profile(f, 'bmo1', study_radii(b, n_radii, disc=True), cfg=study, n_jobs=n_jobs,
                          progress=progress)
    hat = compute_profile(f, 'hat', study_radii(b, n_radii), cfg=study, n_jobs=n_jobs, progress=progress)
    d = np.abs(operators.toeplitz_radial_diag(f, N, cfg))
    decay = float(d[N // 2:].max() / max(d.max(), Thresholds.eps))
    compact = decay < Thresholds.decay_ratio
    l1 = f.integrability == 'L1'
    vanishing, bounded = vw.vanishes(), bmo.bounded()
    parts = ['VWMO %s' % ('yes' if vanishing else 'no'), 'BMO1 %s' % ('bounded' if bounded else 'no')]
    parts.append('f in L1' if l1 else 'f in L1_loc only')
    parts.append('diagonal decays' if compact else 'diagonal does not decay')
    if vanishing and bounded:
        parts.append('in VWMO and BMO1')
    elif vanishing and not bounded and l1:
        parts.append('in VWMO but not BMO1')
    return {'b': b, 'beta': beta, 'L1': l1, 'vwmo_slope': vw.slope, 'vwmo_vanishes': vanishing,
            'bmo1_slope': bmo.slope, 'bmo1_bounded': bounded, 'bmo1_growth': bmo.tail / max(bmo.head, 1e-300),
            'hat_slope': hat.slope, 'diagonal_decay': decay, 'verdict': ', '.join(parts),
            'profiles': {'vwmo': vw.to_dict(), 'bmo1': bmo.to_dict(), 'hat': hat.to_dict()}}


def cmd_example45(args, cfg):
    fmts = _formats(args)
    rows = [example45_row(b, beta, cfg, args.n_radii, args.n, args.n_jobs, args.progress) for b, beta in STUDY_CASES]
    header = ['b', 'beta', 'L1', 'vwmo_slope', 'bmo1_slope', 'hat_slope', 'diagonal_decay', 'verdict']
    table = [[r[k] if not isinstance(r[k], bool) else str(r[k]) for k in header] for r in rows]
    if 'csv' in fmts:
        _write(args.out + '.csv', csv_text(header, table))
    if 'json' in fmts:
        _write(args.out + '.json', dumps({'schema': SCHEMA, 'version': __version__, 'rows': rows,
                                          'config': _run_config(args, cfg)}))
    for r in rows:
        print('(b=%g, beta=%g): vwmo slope %.2f, bmo1 slope %.2f, hat slope %.2f, diagonal decay %.3g -> %s'
              % (r['b'], r['beta'], r['vwmo_slope'], r['bmo1_slope'], r['hat_slope'], r['diagonal_decay'],
                 r['verdict']))
    return 0


def cmd_check(args, cfg):
    results = checks.run_checks(fast=args.fast)
    for r in results:
        if r.passed:
            print('PASS %-24s %.3g  (%.1fs)' % (r.name, r.value, r.seconds))
        else:
            print('FAIL %-24s %s' % (r.name, r.detail))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print('failing invariants: %s' % ', '.join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_anchors(args, cfg):
    diff = anchors.regenerate_anchor_table(args.path, fast=args.fast, cfg=cfg)
    if not diff:
        print('anchors unchanged')
    for name, old, new in diff:
        print('%s: %s -> %.17g' % (name, 'new' if old is None else '%.17g' % old, new))
    return 0


# In[4]:
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    common.add_argument('--tol', type=float, default=1e-9, help='absolute quadrature tolerance')
    common.add_argument('--panels', type=int, default=4)
    common.add_argument('--nodes', type=int, default=8, help='Gauss nodes per panel')
    common.add_argument('--n-jobs', type=int, default=1, help='joblib workers, -1 for half the cores')
    common.add_argument('--progress', action='store_true', help='tqdm progress bars')

    sym = argparse.ArgumentParser(add_help=False)
    sym.add_argument('--symbol', required=True, help='symbol expression, e.g. "example45(b=1.5,beta=1)"')

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument('--out', default='bergosc_out', help='output path prefix')
    out.add_argument('--format', default='csv,json', help='comma list of csv, json, dat')
    out.add_argument('--plot', action='store_true', help='also write a PNG figure')

    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument('--radii', default=None, help='comma separated radii in (0, 1)')
    lattice.add_argument('--angles', type=int, default=None)

    parser = argparse.ArgumentParser(prog='bergosc', description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('profile', parents=[common, sym, out, lattice], help='radial profile of a functional')
    p.add_argument('--functional', choices=FUNCTIONALS, default='vwmo')
    p.add_argument('--p', type=float, default=1.0, help='exponent of the bmo functional')
    p.add_argument('--n-radii', type=int, default=Thresholds.profile_points)
    p.add_argument('--inner', type=float, default=Thresholds.profile_inner)
    p.add_argument('--outer', type=float, default=Thresholds.profile_outer)
    p.add_argument('--grid', default='%dx%d' % Thresholds.prefix_grid)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser('spectrum', parents=[common, sym, out, lattice], help='finite-section eigenvalues')
    p.add_argument('--n', type=int, default=64)
    p.add_argument('--which', choices=('hat', 'tilde'), default='hat')
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser('index', parents=[common, sym, lattice], help='winding-number Fredholm index')
    p.add_argument('--which', choices=('hat', 'tilde'), default='hat')
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_index, angles=64)

    p = sub.add_parser('example45', parents=[common, out], help='reproduction study of the example family')
    p.add_argument('--n', type=int, default=256)
    p.add_argument('--n-radii', type=int, default=8)
    p.set_defaults(func=cmd_example45)

    p = sub.add_parser('check', parents=[common], help='run the invariant suite')
    p.add_argument('--fast', action='store_true')
    p.set_defaults(func=cmd_check)

    p = sub.add_parser('anchors', parents=[common], help='regenerate the anchor table')
    p.add_argument('--path', default=anchors.DEFAULT_PATH)
    p.add_argument('--fast', action='store_true')
    p.set_defaults(func=cmd_anchors)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    try:
        cfg = _quadrature(args)
        return args.func(args, cfg)
    except (ConfigError, ExpressionError, BadParameters) as exc:
        print('bergosc: error: %s' % exc, file=sys.stderr)
        return 2
    except BergoscError as exc:
        print('bergosc: %s: %s' % (type(exc).__name__, exc), file=sys.stderr)
        return 3


if __name__ == '__main__':
    sys.exit(main())
