# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled phase kernels (thin wrappers over _phase_core.h)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from "_phase_core.h" nogil:
    void ts_chunk_sums(uint64_t yhi, uint64_t ylo, uint64_t thi, uint64_t tlo,
                       int64_t a, int64_t b, double s, double shift,
                       int64_t chunk, double *out)
    void ts_units(uint64_t yhi, uint64_t ylo, uint64_t thi, uint64_t tlo,
                  int64_t a, int64_t b, double *cs, double *sn)

_MASK = (1 << 64) - 1


def chunk_sums(Y, T, long long a, long long b, double s, double shift, long long chunk):
    """Per-chunk compensated sums, shape (nchunks, 3): re, im, sum |term|."""
    if b < a:
        return np.zeros((0, 3))
    cdef int64_t n = (b - a) // chunk + 1
    cdef cnp.ndarray[double, ndim=2, mode="c"] out = np.empty((n, 3))
    cdef uint64_t yhi = (Y >> 64) & _MASK, ylo = Y & _MASK
    cdef uint64_t thi = (T >> 64) & _MASK, tlo = T & _MASK
    cdef double *p = &out[0, 0]
    with nogil:
        ts_chunk_sums(yhi, ylo, thi, tlo, a, b, s, shift, chunk, p)
    return out


def units(Y, T, long long a, long long b):
    """cos and sin of 2*pi*theta_k for k = a..b."""
    cdef int64_t n = b - a + 1
    if n <= 0:
        return np.zeros(0), np.zeros(0)
    cdef cnp.ndarray[double, ndim=1, mode="c"] cs = np.empty(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] sn = np.empty(n)
    cdef uint64_t yhi = (Y >> 64) & _MASK, ylo = Y & _MASK
    cdef uint64_t thi = (T >> 64) & _MASK, tlo = T & _MASK
    cdef double *pc = &cs[0]
    cdef double *ps = &sn[0]
    with nogil:
        ts_units(yhi, ylo, thi, tlo, a, b, pc, ps)
    return cs, sn
