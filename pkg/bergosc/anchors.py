"""
Frozen regression anchors: quantities whose values are recorded by a verified
run and compared on every regeneration.
"""
import datetime
import json
import logging
import os
from dataclasses import asdict, dataclass

import numpy as np

from .checks import run_checks
from .config import SCHEMA, __version__
from .errors import RefusesIfChecksRed
from .operators import CoefficientVector, reflection_check, truncation_convergence
from .oscillation import bwmo_local
from .quadrature import DEFAULT_CONFIG
from .symbols import example45, re_z
from .utils import atomic_write, config_hash, dumps

logger = logging.getLogger(__name__)

DEFAULT_PATH = os.path.join('docs', 'anchors.json')


@dataclass
class AnchorRecord:
    name: str
    config_hash: str
    value: float
    date: str
    provenance: str


# In[1]:
def _truncation_residual(cfg):
    res = truncation_convergence(example45(1.5, 1.0), CoefficientVector.basis(0, 8), [0.9, 0.99, 0.999], 8, cfg,
                                 precheck=False)
    return res[-1]


def _reflection(cfg):
    return reflection_check(re_z(), 0.5, 96, cfg)


def _bwmo(cfg):
    return bwmo_local(example45(1.0, 1.0), 0.99, cfg=cfg)


# name -> (computation, parameters entering the config hash)
ANCHORS = {
    'truncation_residual[example45(1.5,1),e0,0.999]': (
        _truncation_residual, {'symbol': 'example45(b=1.5,beta=1)', 'cuts': [0.9, 0.99, 0.999], 'N': 8}),
    'reflection[re_z,z=0.5,N=96]': (_reflection, {'symbol': 're_z', 'z': 0.5, 'N': 96}),
    'bwmo_local[example45(1,1),r=0.99]': (_bwmo, {'symbol': 'example45(b=1,beta=1)', 'z': 0.99, 'grid': [16, 16]}),
}


def load_anchor_table(path=DEFAULT_PATH):
    if not os.path.exists(path):
        return {}
    with open(path) as fh:
        d = json.load(fh)
    return {a['name']: AnchorRecord(**a) for a in d.get('anchors', [])}


def regenerate_anchor_table(path=DEFAULT_PATH, fast=True, cfg=None, names=None):
    """
    Recompute every anchor after the check suite passes and rewrite the table.
    :return: list of (name, old value or None, new value) for anchors whose value changed
    :raises RefusesIfChecksRed: if any check fails
    """
    cfg = DEFAULT_CONFIG if cfg is None else cfg
    results = run_checks(fast)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise RefusesIfChecksRed('checks failing: %s' % ', '.join(failed), failed)
    old = load_anchor_table(path)
    today = datetime.date.today().isoformat()
    provenance = 'bergosc %s, %d checks green (%s suite)' % (__version__, len(results), 'fast' if fast else 'full')
    records, diff = [], []
    for name, (compute, params) in ANCHORS.items():
        if names is not None and name not in names:
            if name in old:
                records.append(old[name])
            continue
        h = config_hash({'params': params, 'quadrature': cfg.to_dict()})
        value = float(compute(cfg))
        prev = old.get(name)
        if prev is not None and prev.value == value and prev.config_hash == h:
            records.append(prev)
            continue
        diff.append((name, None if prev is None else prev.value, value))
        records.append(AnchorRecord(name, h, value, today, provenance))
    atomic_write(path, dumps({'schema': SCHEMA, 'version': __version__, 'anchors': [asdict(r) for r in records]}))
    for name, a, b in diff:
        logger.info('anchor %s: %s -> %.17g', name, 'new' if a is None else '%.17g' % a, b)
    return diff


def max_relative_change(diff):
    """Largest |new - old| / max(|old|, eps) over a diff, ignoring new anchors."""
    changes = [abs(b - a) / max(abs(a), 1e-300) for _, a, b in diff if a is not None]
    return float(np.max(changes)) if changes else 0.0
