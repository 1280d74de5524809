"""Hot numeric kernel: the raw multivariate coefficient convolution behind
tower-field multiplication.

Two implementations are provided: a numba ``@njit`` version and a pure-numpy
fallback.  Selection is controlled by the ``FTP_SDMM_BACKEND`` environment
variable (``auto`` by default, or ``numba`` / ``numpy`` to force one).
Both paths produce identical integer arrays; modular reduction happens in
``fields.TowerField``.
"""

import os

import numpy as np

_BACKEND_ENV = "FTP_SDMM_BACKEND"

_numba_conv = None
_numba_failed = False


def _requested_backend():
    val = os.environ.get(_BACKEND_ENV, "auto").strip().lower()
    if val not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_BACKEND_ENV} must be auto, numba or numpy (got {val!r})")
    return val


def _load_numba():
    global _numba_conv, _numba_failed
    if _numba_conv is not None or _numba_failed:
        return _numba_conv
    try:
        from numba import njit
    except ImportError:
        _numba_failed = True
        return None

    @njit(cache=True)
    def conv(xf, yf, addtable, ext):
        m, d = xf.shape
        for i in range(m):
            for a in range(d):
                va = xf[i, a]
                if va == 0:
                    continue
                for j in range(m):
                    t = addtable[i, j]
                    for b in range(d):
                        vb = yf[j, b]
                        if vb != 0:
                            ext[t, a + b] += va * vb

    _numba_conv = conv
    return conv


def active_backend():
    """Name of the backend that will actually run ('numba' or 'numpy')."""
    req = _requested_backend()
    if req == "numpy":
        return "numpy"
    if _load_numba() is not None:
        return "numba"
    if req == "numba":
        raise ImportError("FTP_SDMM_BACKEND=numba but numba is not importable")
    return "numpy"


def _conv_numpy(xf, yf, addtable, ext):
    m, d = xf.shape
    live = np.flatnonzero(xf.any(axis=1))
    if live.size == 0:
        return
    xs = xf[live]
    sub = addtable[live]
    for j in range(m):
        row = yf[j]
        if not row.any():
            continue
        tgt = sub[:, j]
        for b in range(d):
            v = row[b]
            if v:
                ext[tgt, b : b + d] += xs * v


def convolve(xf, yf, addtable, ext_len, backend=None):
    """Full convolution of two flattened coefficient tensors.

    xf, yf: int64 arrays of shape (M, d) — tower multi-index flattened
    C-order, base-field coefficients on the last axis.  addtable[i, j] is the
    flat index in the extended multi-index space of the (carry-free) sum of
    multi-indices i and j.  Returns an (ext_len, 2d-1) int64 array of
    un-reduced integer coefficient sums.
    """
    d = xf.shape[1]
    ext = np.zeros((ext_len, 2 * d - 1), dtype=np.int64)
    if backend is None:
        backend = active_backend()
    if backend == "numba":
        conv = _load_numba()
        if conv is None:
            raise ImportError("numba backend requested but numba is not importable")
        conv(xf, yf, addtable, ext)
    else:
        _conv_numpy(xf, yf, addtable, ext)
    return ext
