# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled inner loop of the interval-partition value table.

Same contract as ``persuade._dp_numpy.dp_fill``; selected at import when the
extension was built.
"""

from libc.math cimport INFINITY

import numpy as np


def dp_fill(double[:, ::1] w, int budget):
    """Fill the budgeted best-partition table over interval values ``w``.

    ``w[i, j]`` is the value of covering grid cell [x_i, x_j) with one
    signal (upper triangle; anything else must be -inf).  Returns the value
    table U of shape (budget+1, n) and the choice table: -1 marks carrying
    the previous budget row, i >= 0 marks closing interval [x_i, x_j].
    Ties keep the carry, then the smallest i, so outputs are deterministic.
    """
    cdef Py_ssize_t n = w.shape[0]
    values = np.full((budget + 1, n), -np.inf)
    choices = np.full((budget + 1, n), -2, dtype=np.int32)
    cdef double[:, ::1] u = values
    cdef int[:, ::1] p = choices
    cdef Py_ssize_t k, j, i
    cdef double best, prev, v
    cdef int arg

    u[0, 0] = 0.0
    p[0, 0] = -1
    for k in range(1, budget + 1):
        for j in range(n):
            best = u[k - 1, j]
            arg = -1
            for i in range(j):
                prev = u[k - 1, i]
                if prev == -INFINITY:
                    continue
                v = prev + w[i, j]
                if v > best:
                    best = v
                    arg = <int> i
            u[k, j] = best
            p[k, j] = arg
    return values, choices
