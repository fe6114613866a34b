"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
gives identical results (exact for integer outputs). Set
``QUASID_KERNELS=py`` or ``QUASID_KERNELS=ext`` to force a backend;
the default ``auto`` tries the extension first.
"""

import os

import numpy as np

from ..errors import ConfigError
from . import py as _py

_requested = os.environ.get("QUASID_KERNELS", "auto")
if _requested not in ("auto", "ext", "py"):
    raise ConfigError(f"QUASID_KERNELS must be auto, ext or py, got {_requested!r}")

if _requested == "py":
    _impl = _py
else:
    try:
        from . import _ext as _impl
    except ImportError:
        if _requested == "ext":
            raise
        _impl = _py

BACKEND = _impl.BACKEND


def assign_nearest(codebook, residuals):
    codebook = np.ascontiguousarray(codebook, dtype=np.float64)
    residuals = np.ascontiguousarray(residuals, dtype=np.float64)
    return _impl.assign_nearest(codebook, residuals)


def hamming_matrix(sids):
    sids = np.ascontiguousarray(sids, dtype=np.int64)
    return _impl.hamming_matrix(sids)
