# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the r-variation dynamic program.

Each grid point is an independent work item, so the OpenMP loop over points
gives results that do not depend on the thread count.
"""
import numpy as np

from cython.parallel cimport prange, threadid
from libc.math cimport fabs, pow
from libc.stdlib cimport free, malloc


cdef double _vr_power(const double* p, Py_ssize_t n, double r, double* D) noexcept nogil:
    # p[0..n] are prefix sums with p[0] == 0; returns max over partitions of sum |block|^r
    cdef Py_ssize_t i, j
    cdef double best, cand, pj, diff
    D[0] = 0.0
    if r == 2.0:
        for j in range(1, n + 1):
            pj = p[j]
            best = -1.0
            for i in range(j):
                diff = pj - p[i]
                cand = D[i] + diff * diff
                best = cand if cand > best else best
            D[j] = best
    else:
        for j in range(1, n + 1):
            pj = p[j]
            best = -1.0
            for i in range(j):
                cand = D[i] + pow(fabs(pj - p[i]), r)
                best = cand if cand > best else best
            D[j] = best
    return D[n]


def vr_power_field(const double[:, ::1] prefix_by_point, double r, int threads=1):
    """Return sum-of-powers optimum at every point.

    ``prefix_by_point`` has shape (X, N+1); row x holds the partial sums
    0, d_1, d_1+d_2, ... of the increments at grid point x.
    """
    cdef Py_ssize_t X = prefix_by_point.shape[0]
    cdef Py_ssize_t n = prefix_by_point.shape[1] - 1
    cdef Py_ssize_t x
    if n < 1:
        raise ValueError("need at least one increment")
    if threads < 1:
        threads = 1
    out_arr = np.empty(X, dtype=np.float64)
    work_arr = np.empty((threads, n + 1), dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[:, ::1] work = work_arr
    for x in prange(X, nogil=True, schedule="static", num_threads=threads):
        out[x] = _vr_power(&prefix_by_point[x, 0], n, r, &work[threadid(), 0])
    return out_arr


def vr_power_single(const double[::1] prefix, double r):
    """Single-sequence variant of :func:`vr_power_field`."""
    cdef Py_ssize_t n = prefix.shape[0] - 1
    cdef double* D
    cdef double value
    if n < 1:
        raise ValueError("need at least one increment")
    D = <double*> malloc((n + 1) * sizeof(double))
    if D == NULL:
        raise MemoryError()
    with nogil:
        value = _vr_power(&prefix[0], n, r, D)
    free(D)
    return value
