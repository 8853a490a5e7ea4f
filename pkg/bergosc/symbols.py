"""
Symbols: measurable functions on the disc in polar coordinates, carrying the
flags the quadrature and the functionals rely on.

A symbol is evaluated as ``f(rho, phi)`` with broadcasting and always returns a
complex array. Pointwise arithmetic combines flags conservatively.
"""
import logging
import re

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import BadParameters, ExpressionError
from .geometry import mobius

logger = logging.getLogger(__name__)

# largest double below 1; samples on |w| = 1 are moved here
_INSIDE = np.nextafter(1.0, 0.0)


class Symbol(object):
    """
    :param rule: callable (rho, phi) -> values, broadcasting over arrays
    :param name: human readable name, also used as an identity tag
    :param radial: rule does not depend on phi
    :param bounded: |f| <= bound everywhere
    :param phase_b: exponent b when f oscillates like sin((1-rho)^-b) near the boundary
    :param envelope: callable rho -> A(rho) with f = A(rho) sin((1-rho)^-b) + smooth near rho = 1
    :param integrability: 'L1' or 'L1_loc'
    :param fourier_width: K when only the modes e^{ik phi}, |k| <= K, are present
    :param breaks: radii where f (or a derivative) jumps
    :param support: f vanishes for rho > support
    """

    def __init__(self, rule, name='f', radial=False, bounded=False, bound=None, phase_b=None, envelope=None,
                 integrability='L1', continuous=True, fourier_width=None, breaks=(), support=1.0, real=False):
        if integrability not in ('L1', 'L1_loc'):
            raise BadParameters('unknown integrability class %r' % integrability)
        self.rule = rule
        self.name = name
        self.radial = bool(radial)
        self.bounded = bool(bounded)
        self.bound = None if bound is None else float(bound)
        if self.bounded and self.bound is None:
            raise BadParameters('a bounded symbol needs its bound')
        self.phase_b = None if phase_b is None else float(phase_b)
        self.envelope = envelope
        self.integrability = integrability
        self.continuous = bool(continuous)
        self.fourier_width = 0 if self.radial else fourier_width
        self.breaks = tuple(sorted(set(float(b) for b in breaks)))
        self.support = float(support)
        self.real = bool(real)

    def __repr__(self):
        return 'Symbol(%s)' % self.name

    def __call__(self, rho, phi=0.0):
        rho, phi = np.broadcast_arrays(np.minimum(np.asarray(rho, dtype=float), _INSIDE),
                                       np.asarray(phi, dtype=float))
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            out = np.asarray(self.rule(rho, phi), dtype=complex)
        return np.array(np.broadcast_to(out, rho.shape))

    def at(self, w):
        w = np.asarray(w)
        return self(np.abs(w), np.angle(w))

    @property
    def oscillatory(self):
        return self.phase_b is not None

    def phase(self, rho):
        return (1.0 - np.asarray(rho, dtype=float)) ** -self.phase_b

    def phase_derivative(self, rho):
        return self.phase_b * (1.0 - np.asarray(rho, dtype=float)) ** (-self.phase_b - 1.0)

    def oscillatory_part(self, rho):
        rho = np.minimum(np.asarray(rho, dtype=float), _INSIDE)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            return np.asarray(self.envelope(rho), dtype=complex) * np.sin(self.phase(rho))

    # pointwise arithmetic
    def __add__(self, other):
        other = _lift(other)
        return _combine(self, other, lambda a, b: a + b, '(%s + %s)' % (self.name, other.name), additive=True)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * _lift(other)

    def __rsub__(self, other):
        return _lift(other) + (-1.0) * self

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if np.isscalar(other):
            return _scale(self, complex(other))
        return _combine(self, other, lambda a, b: a * b, '%s*%s' % (self.name, other.name), additive=False)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not np.isscalar(c):
            raise BadParameters('symbols divide by scalars only')
        return _scale(self, 1.0 / complex(c))

    def conj(self):
        env = self.envelope
        return Symbol(lambda r, p: np.conj(self(r, p)), name='conj(%s)' % self.name, radial=self.radial,
                      bounded=self.bounded, bound=self.bound, phase_b=self.phase_b,
                      envelope=None if env is None else (lambda r: np.conj(env(r))),
                      integrability=self.integrability, continuous=self.continuous,
                      fourier_width=self.fourier_width, breaks=self.breaks, support=self.support, real=self.real)

    def __abs__(self):
        return Symbol(lambda r, p: np.abs(self(r, p)), name='|%s|' % self.name, radial=self.radial,
                      bounded=self.bounded, bound=self.bound, phase_b=self.phase_b,
                      integrability=self.integrability, continuous=self.continuous,
                      breaks=self.breaks, support=self.support, real=True)

    def __pow__(self, p):
        p = float(p)
        if p <= 0:
            raise BadParameters('only positive powers are supported')
        integ = 'L1' if (self.bounded or p == 1.0) and self.integrability == 'L1' else 'L1_loc'
        return Symbol(lambda r, q: self(r, q) ** p, name='%s^%g' % (self.name, p), radial=self.radial,
                      bounded=self.bounded, bound=None if self.bound is None else self.bound ** p,
                      phase_b=self.phase_b, integrability=integ, continuous=self.continuous,
                      breaks=self.breaks, support=self.support, real=self.real and p == int(p))


def _lift(x):
    if isinstance(x, Symbol):
        return x
    return const(x)


def _same_phase(f, g):
    phases = set(s.phase_b for s in (f, g) if s.phase_b is not None)
    return phases.pop() if len(phases) == 1 else None


def _width(f, g, additive):
    if f.fourier_width is None or g.fourier_width is None:
        return None
    return max(f.fourier_width, g.fourier_width) if additive else f.fourier_width + g.fourier_width


def _combine(f, g, op, name, additive):
    phase = _same_phase(f, g)
    env = None
    if additive:
        if f.envelope is not None and g.phase_b is None:
            env = f.envelope
        elif g.envelope is not None and f.phase_b is None:
            env = g.envelope
        elif f.envelope is not None and g.envelope is not None and phase is not None:
            env = lambda r: f.envelope(r) + g.envelope(r)
        bounded = f.bounded and g.bounded
        bound = f.bound + g.bound if bounded else None
        integ = 'L1' if f.integrability == 'L1' and g.integrability == 'L1' else 'L1_loc'
        support = max(f.support, g.support)
    else:
        if f.envelope is not None and g.phase_b is None and g.radial:
            env = lambda r: f.envelope(r) * g(r, 0.0)
        elif g.envelope is not None and f.phase_b is None and f.radial:
            env = lambda r: g.envelope(r) * f(r, 0.0)
        bounded = f.bounded and g.bounded
        bound = f.bound * g.bound if bounded else None
        integ = 'L1' if (f.bounded and g.integrability == 'L1') or (g.bounded and f.integrability == 'L1') \
            else 'L1_loc'
        support = min(f.support, g.support)
    return Symbol(lambda r, p: op(f(r, p), g(r, p)), name=name, radial=f.radial and g.radial, bounded=bounded,
                  bound=bound, phase_b=phase, envelope=env, integrability=integ,
                  continuous=f.continuous and g.continuous, fourier_width=_width(f, g, additive),
                  breaks=f.breaks + g.breaks, support=support, real=f.real and g.real)


def _scale(f, c):
    env = f.envelope
    name = '%s*%s' % (_fmt_number(c), f.name)
    return Symbol(lambda r, p: c * f(r, p), name=name, radial=f.radial, bounded=f.bounded,
                  bound=None if f.bound is None else abs(c) * f.bound, phase_b=f.phase_b,
                  envelope=None if env is None else (lambda r: c * env(r)), integrability=f.integrability,
                  continuous=f.continuous, fourier_width=f.fourier_width, breaks=f.breaks, support=f.support,
                  real=f.real and c.imag == 0)


def _fmt_number(c):
    c = complex(c)
    return '%g' % c.real if c.imag == 0 else '(%g%+gj)' % (c.real, c.imag)


# In[1]:
def const(c=1.0):
    c = complex(c)
    return Symbol(lambda r, p: np.full(np.shape(r), c), name='const(%s)' % _fmt_number(c), radial=True,
                  bounded=True, bound=abs(c), real=c.imag == 0)


def one():
    f = const(1.0)
    f.name = 'one'
    return f


def zk(k=1):
    k = int(k)
    if k < 0:
        raise BadParameters('zk needs k >= 0')
    return Symbol(lambda r, p: r ** k * np.exp(1j * k * p), name='zk(%d)' % k, radial=k == 0, bounded=True,
                  bound=1.0, fourier_width=k, real=k == 0)


def conj_zk(k=1):
    k = int(k)
    if k < 0:
        raise BadParameters('conj_zk needs k >= 0')
    return Symbol(lambda r, p: r ** k * np.exp(-1j * k * p), name='conj_zk(%d)' % k, radial=k == 0,
                  bounded=True, bound=1.0, fourier_width=k, real=k == 0)


def abs_sq():
    return Symbol(lambda r, p: r ** 2, name='abs_sq', radial=True, bounded=True, bound=1.0, real=True)


def re_z():
    return Symbol(lambda r, p: r * np.cos(p), name='re_z', bounded=True, bound=1.0, fourier_width=1, real=True)


def z_plus_conj():
    return Symbol(lambda r, p: 2.0 * r * np.cos(p), name='z_plus_conj', bounded=True, bound=2.0,
                  fourier_width=1, real=True)


def rand_smooth(seed=0, K=3, degree=2, real=False):
    """
    Random smooth symbol sum_{|k|<=K} rho^|k| q_k(rho^2) e^{ik phi} with polynomial q_k.
    :param seed: seed of numpy's default_rng
    :param K: Fourier width, at most 8
    :param degree: degree of each q_k
    :param real: enforce q_{-k} = conj(q_k)
    """
    K, degree = int(K), int(degree)
    if not 0 <= K <= 8:
        raise BadParameters('rand_smooth supports Fourier widths up to 8')
    rng = np.random.default_rng(int(seed))
    ks = np.arange(-K, K + 1)
    scale = 1.0 / (1.0 + np.abs(ks)[:, None] + np.arange(degree + 1)[None, :])
    coef = (rng.standard_normal((ks.size, degree + 1)) + 1j * rng.standard_normal((ks.size, degree + 1))) * scale
    if real:
        coef[:K] = np.conj(coef[:K:-1])
        coef[K] = coef[K].real
    bound = float(np.abs(coef).sum())

    def rule(r, p):
        out = np.zeros(np.shape(r), dtype=complex)
        for k, c in zip(ks, coef):
            out = out + r ** abs(k) * npoly.polyval(r ** 2, c) * np.exp(1j * k * p)
        return out.real if real else out

    f = Symbol(rule, name='rand_smooth(%d)' % seed, radial=K == 0, bounded=True, bound=bound,
               fourier_width=K, real=real)
    f.coefficients = coef
    return f


def checkerboard(levels=40):
    """+-1 alternating over the boxes of the dyadic decomposition."""
    def rule(r, p):
        k = np.maximum(np.floor(-np.log2(np.maximum(1.0 - r, 1e-300))), 0.0)
        j = np.floor(np.mod(p, 2 * np.pi) / (np.pi * 2.0 ** -k))
        return np.where(np.mod(k + j, 2) == 0, 1.0, -1.0)

    return Symbol(rule, name='checkerboard', bounded=True, bound=1.0, continuous=False, real=True,
                  breaks=[1.0 - 2.0 ** -k for k in range(1, levels)])


def example45(b=1.0, beta=1.0):
    """
    sin((1-rho)^-b) / (rho (1-rho)^(b-beta)) for rho >= 1/2 and 1 inside.
    Bounded (by 2) exactly when b == beta; integrable exactly when b - beta < 1.
    """
    b, beta = float(b), float(beta)
    if not b >= beta > 0:
        raise BadParameters('example45 needs b >= beta > 0, got b=%g beta=%g' % (b, beta))

    def rule(r, p):
        outer = r >= 0.5
        u = np.where(outer, 1.0 - r, 0.5)
        rr = np.where(outer, r, 0.5)
        vals = np.where(u > 0.0, np.sin(u ** -b) / (rr * u ** (b - beta)), 0.0)
        return np.where(outer, vals, 1.0)

    def envelope(r):
        return 1.0 / (r * (1.0 - r) ** (b - beta))

    f = Symbol(rule, name='example45(b=%g,beta=%g)' % (b, beta), radial=True, bounded=b == beta,
               bound=2.0 if b == beta else None, phase_b=b, envelope=envelope,
               integrability='L1' if b - beta < 1 else 'L1_loc', continuous=False, breaks=(0.5,), real=True)
    f.params = {'b': b, 'beta': beta}
    return f


def example45_zeros(b, m):
    """Radii of the zeros of sin((1-rho)^-b), m = 1, 2, ..."""
    return 1.0 - (np.asarray(m, dtype=float) * np.pi) ** (-1.0 / b)


# In[2]:
def truncate(f, rho_cut):
    """chi_{rho <= rho_cut} f."""
    rho_cut = float(rho_cut)
    if not 0.0 < rho_cut < 1.0:
        raise BadParameters('truncation radius must lie in (0, 1)')
    env = f.envelope
    return Symbol(lambda r, p: np.where(r <= rho_cut, f(r, p), 0.0), name='trunc(%s,%g)' % (f.name, rho_cut),
                  radial=f.radial, bounded=f.bounded, bound=f.bound, phase_b=f.phase_b,
                  envelope=None if env is None else (lambda r: np.where(np.asarray(r) <= rho_cut, env(r), 0.0)),
                  integrability='L1', continuous=False, fourier_width=f.fourier_width,
                  breaks=f.breaks + (rho_cut,), support=min(rho_cut, f.support), real=f.real)


def square_integrable(f):
    """
    Whether |f|^2 is integrable: True for bounded symbols, decided from the
    growth exponent of the envelope (A ~ (1-rho)^-a needs 2a < 1) otherwise,
    None when the flags say nothing.
    """
    if f.bounded:
        return True
    if f.envelope is None:
        return None
    u = np.array([1e-6, 1e-9])
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        a = np.abs(np.asarray(f.envelope(1.0 - u), dtype=complex))
    if not np.all(np.isfinite(a)) or a[0] == 0.0:
        return None
    alpha = np.log(a[1] / a[0]) / np.log(u[0] / u[1])
    return bool(2.0 * alpha < 1.0 - 1e-3)


def analytic_symbol(coeffs, name=None):
    """sum_n c_n e_n(w) with e_n(w) = sqrt(n+1) w^n."""
    c = np.asarray(getattr(coeffs, 'coeffs', coeffs), dtype=complex)
    scaled = c * np.sqrt(np.arange(1, c.size + 1))
    return Symbol(lambda r, p: npoly.polyval(r * np.exp(1j * p), scaled), name=name or 'analytic(%d)' % c.size,
                  radial=bool(np.all(c[1:] == 0)), bounded=True, bound=float(np.abs(scaled).sum()),
                  fourier_width=c.size - 1)


def compose_mobius(f, z):
    """f o phi_z."""
    z = complex(getattr(z, 'value', z))

    def rule(r, p):
        v = mobius(z, r * np.exp(1j * p))
        return f(np.abs(v), np.angle(v))

    return Symbol(rule, name='%s o phi(%s)' % (f.name, _fmt_number(z)), bounded=f.bounded, bound=f.bound,
                  integrability=f.integrability, continuous=f.continuous, real=f.real)


# In[3]:
class MatrixSymbol(object):
    """Block symbol (f_jk) with Symbol entries."""

    def __init__(self, entries):
        rows = [[_lift(e) for e in row] for row in entries]
        if not rows or any(len(row) != len(rows[0]) for row in rows) or len(rows[0]) == 0:
            raise BadParameters('matrix symbols must be rectangular and nonempty')
        self.entries = rows

    @classmethod
    def diag(cls, *symbols):
        n = len(symbols)
        return cls([[symbols[i] if i == j else const(0.0) for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def __getitem__(self, idx):
        j, k = idx
        return self.entries[j][k]

    def __call__(self, rho, phi=0.0):
        vals = [[e(rho, phi) for e in row] for row in self.entries]
        return np.moveaxis(np.array(vals), (0, 1), (-2, -1))


# In[4]:
def standard_library(seed=7):
    return {
        'one': one(),
        'const(2)': const(2.0),
        'zk(1)': zk(1), 'zk(2)': zk(2), 'zk(3)': zk(3),
        'conj_zk(1)': conj_zk(1),
        'abs_sq': abs_sq(),
        're_z': re_z(),
        'z_plus_conj': z_plus_conj(),
        'rand_smooth(%d)' % seed: rand_smooth(seed),
        'rand_smooth_real(%d)' % seed: rand_smooth(seed, real=True),
        'checkerboard': checkerboard(),
        'example45(1,1)': example45(1.0, 1.0),
        'example45(1.5,1)': example45(1.5, 1.0),
    }


REGISTRY = {
    'const': const, 'one': one, 'zk': zk, 'conj_zk': conj_zk, 'abs_sq': abs_sq, 're_z': re_z,
    'z_plus_conj': z_plus_conj, 'rand': rand_smooth, 'rand_smooth': rand_smooth, 'checkerboard': checkerboard,
    'example45': example45,
}

_TOKEN = re.compile(r'\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\S))')


def _tokenize(text):
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionError('cannot tokenize %r at %d' % (text, pos))
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    tokens.append(('end', None))
    return tokens


class _Parser(object):
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            raise ExpressionError('expected %r in %r, got %r' % (value, self.text, tok[1]))
        self.i += 1
        return tok

    def expr(self):
        out = self.term()
        while self.peek()[1] in ('+', '-'):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == '+' else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek()[1] == '*':
            self.take()
            out = out * self.factor() if isinstance(out, Symbol) else self.factor() * out
        return out

    def factor(self):
        kind, value = self.peek()
        if value == '-':
            self.take()
            return -1.0 * self.factor()
        if value == '(':
            self.take()
            out = self.expr()
            self.take(')')
            return out
        if kind == 'num':
            self.take()
            return float(value)
        if kind == 'name':
            return self.call()
        raise ExpressionError('unexpected %r in %r' % (value, self.text))

    def number(self):
        sign = 1.0
        if self.peek()[1] == '-':
            self.take()
            sign = -1.0
        kind, value = self.take()
        if kind != 'num':
            raise ExpressionError('expected a number in %r, got %r' % (self.text, value))
        return sign * float(value)

    def call(self):
        _, name = self.take()
        if name not in REGISTRY:
            raise ExpressionError('unknown symbol %r (known: %s)' % (name, ', '.join(sorted(REGISTRY))))
        args, kwargs = [], {}
        if self.peek()[1] == '(':
            self.take('(')
            while self.peek()[1] != ')':
                kind, value = self.peek()
                if kind == 'name' and self.tokens[self.i + 1][1] == '=':
                    self.take()
                    self.take('=')
                    kwargs[value] = self.number()
                else:
                    args.append(self.number())
                if self.peek()[1] == ',':
                    self.take()
            self.take(')')
        try:
            return REGISTRY[name](*args, **kwargs)
        except TypeError as exc:
            raise ExpressionError('bad arguments for %s: %s' % (name, exc)) from exc


def parse_symbol(text):
    """
    Parse expressions such as ``example45(b=1.5,beta=1)``, ``zk(2)``, ``const(1)``, ``rand(7)``
    combined with +, -, * and numbers.
    """
    if not text or not text.strip():
        raise ExpressionError('empty symbol expression')
    p = _Parser(text)
    out = p.expr()
    if p.peek()[0] != 'end':
        raise ExpressionError('trailing input in %r' % text)
    if not isinstance(out, Symbol):
        out = const(out)
    out.name = text.strip()
    return out
