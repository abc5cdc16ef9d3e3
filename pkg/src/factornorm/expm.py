"""Batched matrix exponential by Pade scaling and squaring.

The degree and scaling selection follows Higham's 2005 algorithm with the
theta thresholds for double precision.  One degree and scaling is chosen for
the whole batch from the largest 1-norm, which costs a little accuracy on
small members but keeps every operation a stacked matmul.
"""

import numpy as np

_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068, 13: 5.371920351148152}
_B = {
    3: [120.0, 60.0, 12.0, 1.0],
    5: [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
    7: [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
    9: [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0],
    13: [64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0],
}


def _pade_low(A, m, eye):
    b = _B[m]
    A2 = A @ A
    U = b[1] * eye
    V = b[0] * eye
    P = eye
    for k in range(1, (m - 1) // 2 + 1):
        P = P @ A2 if k > 1 else A2
        U = U + b[2 * k + 1] * P
        V = V + b[2 * k] * P
    return A @ U, V


def _pade13(A, eye):
    b = _B[13]
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
    return U, V


def expm(A):
    """exp(A) for a square matrix or a stack of them (shape ``(..., d, d)``)."""
    A = np.asarray(A)
    if not np.iscomplexobj(A):
        A = A.astype(np.float64)
    d = A.shape[-1]
    if d == 0 or A.size == 0:
        return np.broadcast_to(np.eye(d), A.shape).copy()
    eye = np.broadcast_to(np.eye(d, dtype=A.dtype), A.shape)
    norm = float(np.max(np.sum(np.abs(A), axis=-2))) if A.size else 0.0
    if not np.isfinite(norm):
        raise ValueError("matrix has non-finite entries")
    s = 0
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            U, V = _pade_low(A, m, eye)
            break
    else:
        if norm > _THETA[13]:
            s = int(np.ceil(np.log2(norm / _THETA[13])))
        As = A / (2.0 ** s)
        U, V = _pade13(As, eye)
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E
