import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, is_dataclass
from os import cpu_count

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

n_cpu = max(int((cpu_count() or 2) / 2), 1)


# In[1]:
def fit_loglog_slope(radii, values, floor=1e-300):
    """
    Least-squares slope of log(value) against log(1 - r).
    :param radii: increasing radii in (0, 1)
    :param values: nonnegative samples, one per radius
    :param floor: values are clipped from below before taking logs
    :return: (slope, rms residual); (0, 0) for an identically vanishing profile
    """
    radii = np.asarray(radii, dtype=float)
    values = np.abs(np.asarray(values, dtype=complex))
    if radii.size < 2:
        return np.nan, np.nan
    if np.all(values <= 1e-12):
        return 0.0, 0.0
    x = np.log1p(-radii)
    y = np.log(np.maximum(values, floor))
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


# In[2]:
def angle_grid(n, offset=0.0):
    return offset + 2 * np.pi * np.arange(n) / n


# In[3]:
def ordered_map(func, items, n_jobs=1, progress=False, desc=None):
    """
    Evaluate func over items, possibly in parallel, returning results in submission order.
    :param func: callable of one argument
    :param items: iterable of arguments
    :param n_jobs: joblib worker count, -1 for half the cores
    :param progress: wrap the items in a tqdm bar
    :return: list of results
    """
    items = list(items)
    if n_jobs == -1:
        n_jobs = n_cpu
    iterator = tqdm(items, desc=desc) if progress else items
    if n_jobs == 1:
        return [func(item) for item in iterator]
    return Parallel(n_jobs=n_jobs)(delayed(func)(item) for item in iterator)


# In[4]:
def to_jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(np.real(obj)), float(np.imag(obj))]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if np.isfinite(obj) else str(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def config_hash(config):
    """Short stable hash of a JSON-serialisable configuration."""
    blob = json.dumps(to_jsonable(config), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(blob.encode('utf-8')).hexdigest()[:16]


# In[5]:
def atomic_write(path, text):
    """Write text to path through a temporary file in the same directory and a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, 'w', newline='') as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def _table_text(header, rows, delimiter, comments):
    cells = np.array([[_fmt(v) for v in row] for row in rows], dtype=object).reshape(-1, len(header))
    buf = io.StringIO()
    np.savetxt(buf, cells, fmt='%s', delimiter=delimiter, header=delimiter.join(header), comments=comments)
    return buf.getvalue()


def csv_text(header, rows):
    return _table_text(header, rows, ',', '')


def dat_text(header, rows):
    """gnuplot-ready whitespace separated columns with a commented header."""
    return _table_text(header, rows, ' ', '# ')


def _fmt(v):
    if isinstance(v, str):
        return v
    if v is None:
        return 'nan'
    return repr(float(v))
