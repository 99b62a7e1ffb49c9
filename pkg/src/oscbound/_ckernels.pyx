# cython: language_level=3
"""Compiled kernels for the trajectory hot loops. Mirrors ``_kernels_py``."""

import numpy as np
from libc.math cimport fabs, INFINITY


def integrate_resets(t, y, reset):
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const unsigned char[::1] rv = np.ascontiguousarray(reset, dtype=np.uint8)
    cdef Py_ssize_t n = tv.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double acc = 0.0, comp = 0.0, inc, s
    cdef Py_ssize_t i
    with nogil:
        for i in range(1, n):
            if rv[i]:
                acc = 0.0
                comp = 0.0
            else:
                inc = 0.5 * (yv[i] + yv[i - 1]) * (tv[i] - tv[i - 1]) - comp
                s = acc + inc
                comp = (s - acc) - inc
                acc = s
            ov[i] = acc
    return out


def violation_runs(t, dT, double t_l):
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(dT, dtype=np.float64)
    cdef Py_ssize_t n = dv.shape[0]
    cdef Py_ssize_t i, start = -1
    runs = []
    for i in range(n):
        if fabs(dv[i]) > t_l:
            if start < 0:
                start = i
        elif start >= 0:
            runs.append((tv[start], tv[i - 1]))
            start = -1
    if start >= 0:
        runs.append((tv[start], tv[n - 1]))
    return runs


def max_excess(values, bounds):
    cdef const double[::1] vv = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(bounds, dtype=np.float64)
    cdef Py_ssize_t n = min(vv.shape[0], bv.shape[0])
    cdef Py_ssize_t i
    cdef double worst = -INFINITY, e
    with nogil:
        for i in range(n):
            e = fabs(vv[i]) - bv[i]
            if e > worst:
                worst = e
    return worst
