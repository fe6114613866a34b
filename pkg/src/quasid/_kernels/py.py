"""Pure-numpy kernel implementations.

Fallback used when the compiled extension is unavailable. Same contracts
as ``quasid._kernels._ext``: inputs are validated/coerced by the callers
in :mod:`quasid._kernels`.
"""

import numpy as np

BACKEND = "py"

# cap on the B*K*d broadcast temporary when scanning codewords
_CHUNK_ROWS = 256


def assign_nearest(codebook, residuals):
    """Index of the squared-L2-nearest codeword for every residual row.

    Ties resolve to the smallest index (np.argmin keeps the first hit).
    """
    n = residuals.shape[0]
    out = np.empty(n, dtype=np.int64)
    for start in range(0, n, _CHUNK_ROWS):
        block = residuals[start : start + _CHUNK_ROWS]
        d2 = ((block[:, None, :] - codebook[None, :, :]) ** 2).sum(axis=2)
        out[start : start + _CHUNK_ROWS] = np.argmin(d2, axis=1)
    return out


def hamming_matrix(sids):
    """Pairwise count of disagreeing token positions, shape (n, n) int64."""
    neq = sids[:, None, :] != sids[None, :, :]
    return neq.sum(axis=2, dtype=np.int64)
