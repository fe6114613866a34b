# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot per-batch loops.

Mirrors quasid._kernels.py; kept tiny on purpose so the numpy fallback
stays an exact drop-in.
"""

import numpy as np

cimport numpy as cnp

from libc.math cimport INFINITY

BACKEND = "ext"


def assign_nearest(double[:, ::1] codebook, double[:, ::1] residuals):
    cdef Py_ssize_t K = codebook.shape[0]
    cdef Py_ssize_t d = codebook.shape[1]
    cdef Py_ssize_t n = residuals.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] out_v = out
    cdef Py_ssize_t i, k, j, best_k
    cdef double best, acc, diff
    for i in range(n):
        best = INFINITY
        best_k = 0
        for k in range(K):
            acc = 0.0
            for j in range(d):
                diff = residuals[i, j] - codebook[k, j]
                acc += diff * diff
            # strict < keeps the smallest index on ties
            if acc < best:
                best = acc
                best_k = k
        out_v[i] = best_k
    return out


def hamming_matrix(long long[:, ::1] sids):
    cdef Py_ssize_t n = sids.shape[0]
    cdef Py_ssize_t L = sids.shape[1]
    out = np.zeros((n, n), dtype=np.int64)
    cdef long long[:, ::1] out_v = out
    cdef Py_ssize_t i, j, l
    cdef long long c
    for i in range(n):
        for j in range(i + 1, n):
            c = 0
            for l in range(L):
                if sids[i, l] != sids[j, l]:
                    c += 1
            out_v[i, j] = c
            out_v[j, i] = c
    return out
