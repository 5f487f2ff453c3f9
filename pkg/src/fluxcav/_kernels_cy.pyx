# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernel; contract documented in ``_kernels_np``."""

import numpy as np

from libc.math cimport sqrt

BACKEND = "cython"


def susceptibility_grid(object flux, object counts, object delta, object current,
                        object g_bare, object gamma_phi, double omega,
                        double eps_coef):
    cdef double[::1] xv = np.ascontiguousarray(flux, dtype=np.float64)
    cdef double[::1] cnt = np.ascontiguousarray(counts, dtype=np.float64)
    cdef double[::1] dlt = np.ascontiguousarray(delta, dtype=np.float64)
    cdef double[::1] cur = np.ascontiguousarray(current, dtype=np.float64)
    cdef double[::1] gb = np.ascontiguousarray(g_bare, dtype=np.float64)
    cdef double[::1] gp = np.ascontiguousarray(gamma_phi, dtype=np.float64)

    cdef Py_ssize_t m = xv.shape[0]
    cdef Py_ssize_t n = cnt.shape[0]
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] ov = out

    cdef Py_ssize_t i, k
    cdef double eps, energy, det, g_eps, g_eps2, weight, s_re, s_im
    for i in range(m):
        s_re = 0.0
        s_im = 0.0
        for k in range(n):
            eps = eps_coef * cur[k] * xv[i]
            energy = sqrt(dlt[k] * dlt[k] + eps * eps)
            det = energy - omega
            g_eps = dlt[k] / energy * gb[k]
            g_eps2 = g_eps * g_eps
            weight = cnt[k] * g_eps2 / (gp[k] * gp[k] + det * det)
            s_re += weight * gp[k]
            s_im -= weight * det
        ov[i] = s_re + 1j * s_im
    return out
