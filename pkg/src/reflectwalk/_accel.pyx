# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels; see reflectwalk._fallback for the reference versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdint cimport int64_t

cnp.import_array()


def coupled_paths(const double[:, ::1] uniforms,
                  const double[:, ::1] down_lo, const int64_t[:, ::1] next_down_lo,
                  const int64_t[:, ::1] next_up_lo,
                  const double[:, ::1] down_hi, const int64_t[:, ::1] next_down_hi,
                  const int64_t[:, ::1] next_up_hi,
                  int64_t start_lo, int64_t start_hi):
    cdef Py_ssize_t n_paths = uniforms.shape[0]
    cdef Py_ssize_t n_steps = uniforms.shape[1]
    lo_arr = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    hi_arr = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    cdef int64_t[:, ::1] lo = lo_arr
    cdef int64_t[:, ::1] hi = hi_arr
    cdef Py_ssize_t i, n
    cdef int64_t a, b
    cdef double u
    with nogil:
        for i in range(n_paths):
            a = start_lo
            b = start_hi
            lo[i, 0] = a
            hi[i, 0] = b
            for n in range(n_steps):
                u = uniforms[i, n]
                if u < down_lo[n, a]:
                    a = next_down_lo[n, a]
                else:
                    a = next_up_lo[n, a]
                if u < down_hi[n, b]:
                    b = next_down_hi[n, b]
                else:
                    b = next_up_hi[n, b]
                lo[i, n + 1] = a
                hi[i, n + 1] = b
    return lo_arr, hi_arr


def walk_functionals(const double[:, ::1] z, const double[::1] drifts, double scale):
    cdef Py_ssize_t n_paths = z.shape[0]
    cdef Py_ssize_t n_steps = z.shape[1]
    cdef Py_ssize_t n_drifts = drifts.shape[0]
    sup_arr = np.empty((n_paths, n_drifts))
    term_arr = np.empty((n_paths, n_drifts))
    cdef double[:, ::1] sup = sup_arr
    cdef double[:, ::1] term = term_arr
    cdef Py_ssize_t i, j, k
    cdef double s, m, d, a
    with nogil:
        for i in range(n_paths):
            for j in range(n_drifts):
                d = drifts[j]
                s = 0.0
                m = 0.0
                for k in range(n_steps):
                    s = s + (z[i, k] + d)
                    a = fabs(s)
                    if a > m:
                        m = a
                sup[i, j] = m * scale
                term[i, j] = fabs(s) * scale
    return sup_arr, term_arr
