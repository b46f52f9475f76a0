# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: Hermite-function tables and greedy ball selection.

Contracts match ``_kernels_py`` exactly; see that module for documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

BACKEND = "compiled"


def hermite_function_table(int kmax, cnp.ndarray[cnp.float64_t, ndim=1] x not None):
    cdef Py_ssize_t m = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((kmax + 1, m), dtype=np.float64)
    cdef double c0 = np.pi ** -0.25
    cdef double s2 = sqrt(2.0)
    cdef Py_ssize_t i
    cdef int k
    cdef double a, b, xi
    for i in range(m):
        xi = x[i]
        out[0, i] = c0 * exp(-0.5 * xi * xi)
        if kmax >= 1:
            out[1, i] = s2 * xi * out[0, i]
    for k in range(1, kmax):
        a = sqrt(2.0 / (k + 1))
        b = sqrt(k / (k + 1.0))
        for i in range(m):
            out[k + 1, i] = a * x[i] * out[k, i] - b * out[k - 1, i]
    return out


def greedy_ball_select(cnp.ndarray[cnp.float64_t, ndim=2] cand not None,
                       cnp.ndarray[cnp.float64_t, ndim=1] radii not None):
    cdef Py_ssize_t m = cand.shape[0]
    cdef Py_ssize_t n = cand.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] kept = np.empty(m, dtype=np.int64)
    cdef Py_ssize_t nkept = 0
    cdef Py_ssize_t i, j, d
    cdef double dist2, sep, diff
    cdef bint ok
    for i in range(m):
        ok = True
        for j in range(nkept):
            dist2 = 0.0
            for d in range(n):
                diff = cand[i, d] - cand[kept[j], d]
                dist2 += diff * diff
            sep = (radii[i] + radii[kept[j]]) / 3.0
            if dist2 < sep * sep:
                ok = False
                break
        if ok:
            kept[nkept] = i
            nkept += 1
    return kept[:nkept].copy()
