# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid-sup kernel: evaluates the last Fourier axis and reduces in one pass."""

import numpy as np

from libc.math cimport sqrt


def grid_sup(const double complex[:, :, ::1] A, const double complex[:, ::1] E,
             const double[::1] w, const long[::1] group, int ngroups):
    cdef Py_ssize_t F = A.shape[0], P = A.shape[1], B = A.shape[2], L = E.shape[0]
    cdef Py_ssize_t f, p, l, b
    cdef double re, im, ar, ai
    # split storage keeps the inner loop on plain doubles
    cdef double[:, ::1] Er = np.ascontiguousarray(np.real(E))
    cdef double[:, ::1] Ei = np.ascontiguousarray(np.imag(E))
    cdef double[:, :, ::1] Ar = np.ascontiguousarray(np.real(A))
    cdef double[:, :, ::1] Ai = np.ascontiguousarray(np.imag(A))
    cdef double[::1] best = np.zeros(ngroups)
    cdef double[:, ::1] acc = np.zeros((L, ngroups))
    cdef Py_ssize_t g
    for p in range(P):
        acc[:, :] = 0.0
        for f in range(F):
            g = group[f]
            for l in range(L):
                re = 0.0
                im = 0.0
                for b in range(B):
                    ar = Ar[f, p, b]
                    ai = Ai[f, p, b]
                    re = re + ar * Er[l, b] - ai * Ei[l, b]
                    im = im + ar * Ei[l, b] + ai * Er[l, b]
                acc[l, g] += w[f] * (re * re + im * im)
        for l in range(L):
            for g in range(ngroups):
                if acc[l, g] > best[g]:
                    best[g] = acc[l, g]
    out = np.empty(ngroups)
    for g in range(ngroups):
        out[g] = sqrt(best[g])
    return out
