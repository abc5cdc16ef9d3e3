# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. The pure-numpy twins live in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def schur_sdp(double[:, ::1] X, double[:, ::1] Sinv,
              cnp.int64_t[::1] ptr, cnp.int64_t[::1] rows,
              cnp.int64_t[::1] cols, double[::1] vals):
    """Return H with H[k, l] = tr(A_k X A_l Sinv) for sparse symmetric A_k.

    Constraint k owns the COO entries ``ptr[k]:ptr[k+1]``.
    """
    cdef Py_ssize_t K = ptr.shape[0] - 1
    cdef Py_ssize_t k, l, e, f, i, j
    cdef double v, acc
    H_arr = np.zeros((K, K), dtype=np.float64)
    cdef double[:, ::1] H = H_arr
    with nogil:
        for k in range(K):
            for l in range(k, K):
                acc = 0.0
                for e in range(ptr[k], ptr[k + 1]):
                    i = rows[e]
                    j = cols[e]
                    v = vals[e]
                    for f in range(ptr[l], ptr[l + 1]):
                        acc = acc + v * vals[f] * X[j, rows[f]] * Sinv[cols[f], i]
                H[k, l] = acc
                H[l, k] = acc
    return H_arr

