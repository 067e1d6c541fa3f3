# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled IPF inner loop. Must stay call-compatible with _ipf_kernel_py."""
from libc.math cimport fabs

import numpy as np


cdef void _row_step(double[:, ::1] z, const double[::1] rt) noexcept nogil:
    cdef Py_ssize_t n = z.shape[0], m = z.shape[1], i, j
    cdef double s, f
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += z[i, j]
        if s > 0.0:
            f = rt[i] / s
            for j in range(m):
                z[i, j] *= f


cdef void _col_step(double[:, ::1] z, const double[::1] ct, double[::1] buf) noexcept nogil:
    cdef Py_ssize_t n = z.shape[0], m = z.shape[1], i, j
    for j in range(m):
        buf[j] = 0.0
    for i in range(n):
        for j in range(m):
            buf[j] += z[i, j]
    for j in range(m):
        if buf[j] > 0.0:
            buf[j] = ct[j] / buf[j]
        else:
            buf[j] = 1.0
    for i in range(n):
        for j in range(m):
            z[i, j] *= buf[j]


cdef double _residual(double[:, ::1] z, const double[::1] rt, const double[::1] ct,
                      double[::1] buf, double total) noexcept nogil:
    cdef Py_ssize_t n = z.shape[0], m = z.shape[1], i, j
    cdef double s, worst = 0.0
    for j in range(m):
        buf[j] = 0.0
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += z[i, j]
            buf[j] += z[i, j]
        if fabs(s - rt[i]) > worst:
            worst = fabs(s - rt[i])
    for j in range(m):
        if fabs(buf[j] - ct[j]) > worst:
            worst = fabs(buf[j] - ct[j])
    return worst / total


def ipf_loop(double[:, ::1] cells, const double[::1] row_targets,
             const double[::1] col_targets, Py_ssize_t max_iterations,
             double tolerance):
    """Scale ``cells`` in place; return ``(iterations, residual, converged)``.

    One iteration is a row step followed by a column step. Rows or columns
    whose current sum is zero are left untouched.
    """
    cdef Py_ssize_t m = cells.shape[1], it = 0
    cdef double total = 0.0, res = 0.0
    cdef Py_ssize_t k
    cdef bint converged = False
    cdef double[::1] buf = np.empty(m)
    for k in range(row_targets.shape[0]):
        total += row_targets[k]
    with nogil:
        while it < max_iterations:
            it += 1
            _row_step(cells, row_targets)
            _col_step(cells, col_targets, buf)
            res = _residual(cells, row_targets, col_targets, buf, total)
            if res <= tolerance:
                converged = True
                break
    return it, res, converged
