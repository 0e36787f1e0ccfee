# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled IBM Model 1 E-step kernels.

Layout shared with ``_pykernels``: each dependent token is one row; row r
owns cells ``row_off[r]:row_off[r+1]`` and cell c points at parameter
``cell_param[c]``. Cell 0 of every row is the NULL word.
"""

import numpy as np
from libc.math cimport log
from libc.stdint cimport int64_t


def em_accumulate(const int64_t[::1] cell_param, const int64_t[::1] row_off,
                  const double[::1] params, double[::1] counts,
                  Py_ssize_t row_start, Py_ssize_t row_stop):
    """Add expected counts for rows [row_start, row_stop) into ``counts``.

    Returns the log-likelihood contribution of those rows under ``params``.
    """
    cdef Py_ssize_t r, c, lo, hi
    cdef double denom, ll = 0.0
    with nogil:
        for r in range(row_start, row_stop):
            lo = row_off[r]
            hi = row_off[r + 1]
            denom = 0.0
            for c in range(lo, hi):
                denom = denom + params[cell_param[c]]
            ll = ll + log(denom) - log(<double>(hi - lo))
            for c in range(lo, hi):
                counts[cell_param[c]] += params[cell_param[c]] / denom
    return ll


def loglikelihood(const int64_t[::1] cell_param, const int64_t[::1] row_off,
                  const double[::1] params, Py_ssize_t row_start, Py_ssize_t row_stop):
    cdef Py_ssize_t r, c, lo, hi
    cdef double denom, ll = 0.0
    with nogil:
        for r in range(row_start, row_stop):
            lo = row_off[r]
            hi = row_off[r + 1]
            denom = 0.0
            for c in range(lo, hi):
                denom = denom + params[cell_param[c]]
            ll = ll + log(denom) - log(<double>(hi - lo))
    return ll


def row_argmax(const double[::1] values, const int64_t[::1] row_off):
    """Index of the first maximum within each row, relative to the row start."""
    cdef Py_ssize_t n = row_off.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] best = out
    cdef Py_ssize_t r, c, b
    cdef double v
    with nogil:
        for r in range(n):
            b = row_off[r]
            v = values[b]
            for c in range(row_off[r] + 1, row_off[r + 1]):
                if values[c] > v:
                    v = values[c]
                    b = c
            best[r] = b - row_off[r]
    return out
