"""Pure-numpy implementations of the compiled kernels."""

import numpy as np


def schur_sdp(X, Sinv, ptr, rows, cols, vals, chunk=512):
    """Return H with H[k, l] = tr(A_k X A_l Sinv) for sparse symmetric A_k.

    Constraint k owns the COO entries ``ptr[k]:ptr[k+1]``.  Entries are
    padded to a rectangular (K, E) layout and the double sum over entry
    pairs is done with fancy indexing, ``chunk`` rows at a time.
    """
    ptr = np.asarray(ptr)
    K = ptr.size - 1
    counts = np.diff(ptr)
    E = int(counts.max()) if K else 0
    R = np.zeros((K, E), dtype=np.int64)
    Cc = np.zeros((K, E), dtype=np.int64)
    V = np.zeros((K, E))
    for e in range(E):
        has = counts > e
        idx = ptr[:-1][has] + e
        R[has, e] = rows[idx]
        Cc[has, e] = cols[idx]
        V[has, e] = vals[idx]
    H = np.zeros((K, K))
    for lo in range(0, K, chunk):
        hi = min(K, lo + chunk)
        blk = H[lo:hi]
        for e in range(E):
            ve = V[lo:hi, e][:, None]
            ie = R[lo:hi, e][:, None]
            je = Cc[lo:hi, e][:, None]
            for f in range(E):
                blk += ve * V[None, :, f] * X[je, R[None, :, f]] * Sinv[Cc[None, :, f], ie]
    return H
