# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled harmonic path kernel; see ``_pykernels.harmonic_paths`` for the contract."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def harmonic_paths(x0, noise, double h, neg_a, c2, double c0, Py_ssize_t n_burn,
                   record_steps, double cap, Py_ssize_t dim):
    cdef double[:, ::1] xin = np.ascontiguousarray(x0, dtype=np.float64)
    cdef double[:, :, ::1] dw = np.ascontiguousarray(noise, dtype=np.float64)
    cdef double[::1] na = np.ascontiguousarray(neg_a, dtype=np.float64)
    cdef double[::1] q = np.ascontiguousarray(c2, dtype=np.float64)
    cdef long long[::1] rec = np.ascontiguousarray(record_steps, dtype=np.int64)
    cdef Py_ssize_t B = xin.shape[0], n = xin.shape[1], total = dw.shape[1]
    cdef Py_ssize_t n_rec = rec.shape[0]

    log_w_arr = np.zeros((B, n_rec))
    x_rec_arr = np.zeros((B, n_rec, n))
    flags_arr = np.zeros(B, dtype=np.int8)
    cdef double[:, ::1] log_w = log_w_arr
    cdef double[:, :, ::1] x_rec = x_rec_arr
    cdef signed char[::1] flags = flags_arr

    cdef double[::1] x = np.empty(n)
    cdef double[::1] y = np.empty(n)
    cdef double hh = 0.5 * h
    cdef double lw, vp_x, vp_y, s, dr
    cdef Py_ssize_t b, k, i, p, j, r

    with nogil:
        for b in range(B):
            for i in range(n):
                x[i] = xin[b, i]
            lw = 0.0
            vp_x = c0
            for i in range(n):
                vp_x = vp_x + q[i] * x[i] * x[i]
            r = 0
            for k in range(total):
                for i in range(n):
                    y[i] = x[i] + (na[i] * x[i]) * h + dw[b, k, i]
                for p in range(n // dim):
                    s = 0.0
                    for j in range(p * dim, (p + 1) * dim):
                        dr = na[j] * y[j]
                        s = s + dr * dr
                    if sqrt(s) * h > cap:
                        flags[b] = 1
                vp_y = c0
                for i in range(n):
                    vp_y = vp_y + q[i] * y[i] * y[i]
                if k >= n_burn:
                    lw = lw - hh * (vp_x + vp_y)
                    if r < n_rec and k - n_burn + 1 == rec[r]:
                        log_w[b, r] = lw
                        for i in range(n):
                            x_rec[b, r, i] = y[i]
                        r = r + 1
                for i in range(n):
                    x[i] = y[i]
                vp_x = vp_y
    return log_w_arr, x_rec_arr, flags_arr
