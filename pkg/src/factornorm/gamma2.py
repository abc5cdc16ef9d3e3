"""The factorization norm gamma_2 and its dual, with certificates.

gamma_2(M) is the least value of (max row norm of R) * (max row norm of C)
over factorizations M = R C^*.  Both it and the dual norm

    gamma_2^*(N) = max { |<M, N>| : gamma_2(M) <= 1 },   <M, N> = sum M_ij N_ij,

are computed by semidefinite programming (see :mod:`factornorm.sdp`).  Every
certificate carries a rigorous bracket: one side comes from an explicit
factorization, the other from an explicit feasible point of the dual problem,
both evaluated on the caller's matrix in floating point.

For gamma_2 the program is posed on the range of M.  With M ~ U_r Sigma V_r^*
(singular values beyond a truncation level dropped), a factorization
R = U_r F_1, C = V_r F_2 with F_1 F_2^* = Sigma is optimal among those that
live on the ranges, so only two r x r Hermitian blocks enter the Newton
system.  Truncation is accounted for by adding ||M - R C^*||_2 to the upper
bound, which is valid because gamma_2(E) <= ||E||_2.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize as opt

from . import sdp

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
WITNESS_RANK_THRESHOLD = 1e-9


class Gamma2Error(ArithmeticError):
    """Raised when the bracket is wider than the requested tolerance.

    The best available certificate is attached as ``certificate``.
    """

    def __init__(self, msg, certificate=None):
        super().__init__(msg)
        self.certificate = certificate


@dataclass
class Gamma2Certificate:
    """Bracket for gamma_2 (``kind='gamma2'``) or gamma_2^* (``kind='dual'``).

    For ``gamma2`` the ``value`` is the upper bound attained by the factors
    and ``dualValue`` the lower bound from the dual weights.  For ``dual`` the
    ``value`` is the lower bound |<M, N>| attained by ``attaining`` and
    ``dualValue`` the upper bound from the diagonal dual certificate.
    """

    value: float
    rowFactor: np.ndarray
    colFactor: np.ndarray
    dualValue: float
    gap: float
    iterations: int
    kind: str = "gamma2"
    rank: int = 0
    status: str = "optimal"
    attaining: np.ndarray | None = field(default=None, repr=False)
    weights: tuple | None = field(default=None, repr=False)

    @property
    def lower(self):
        return min(self.value, self.dualValue)

    @property
    def upper(self):
        return max(self.value, self.dualValue)

    def to_dict(self):
        return {"kind": self.kind, "value": self.value, "dualValue": self.dualValue,
                "gap": self.gap, "rank": self.rank, "iterations": self.iterations,
                "status": self.status}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class FactorWitness:
    """Sampled witness with M[i, j] = <alpha[j], beta[i]> = sum_k alpha[j,k] conj(beta[i,k])."""

    dim: int
    alpha: np.ndarray
    beta: np.ndarray
    supAlpha: float
    supBeta: float

    def reconstruct(self):
        return self.beta.conj() @ self.alpha.T


def _check_input(M):
    M = np.atleast_2d(np.asarray(M))
    if M.ndim != 2 or min(M.shape) < 1:
        raise ValueError("expected a non-empty matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if np.iscomplexobj(M) and not np.any(M.imag):
        M = M.real
    return M.astype(complex if np.iscomplexobj(M) else float)


def _row_norms(A):
    return np.sqrt(np.sum(np.abs(A) ** 2, axis=1)) if A.size else np.zeros(A.shape[0])


def trace_norm(A):
    return float(np.sum(np.linalg.svd(A, compute_uv=False)))


def _psd_factor(B, threshold=WITNESS_RANK_THRESHOLD):
    """W with W W^* ~ B, keeping eigenvalues above threshold * lambda_max."""
    lam, V = np.linalg.eigh(0.5 * (B + B.conj().T))
    top = lam[-1] if lam.size else 0.0
    keep = lam > threshold * max(top, 0.0)
    if top <= 0 or not np.any(keep):
        return np.zeros((B.shape[0], 0), dtype=B.dtype)
    return V[:, keep] * np.sqrt(lam[keep])


# ------------------------------------------------------------- SDP assembly

def _basis(r, complex_):
    """Index arrays for a Hermitian (or real symmetric) r x r basis.

    Order: diagonal, real off-diagonal pairs, imaginary off-diagonal pairs.
    """
    ia, ib = np.triu_indices(r, 1)
    return ia, ib, (2 * ia.size + r if complex_ else ia.size + r)


def _block_entries(r, offset, complex_, first):
    """COO entries of -B_k for every basis element, placed at ``offset``."""
    ia, ib, nb = _basis(r, complex_)
    P = ia.size
    d = np.arange(r)
    owners, ii, jj, vv = [], [], [], []
    owners.append(first + d); ii.append(offset + d); jj.append(offset + d); vv.append(-np.ones(r))
    k = first + r + np.arange(P)
    owners += [k, k]; ii += [offset + ia, offset + ib]; jj += [offset + ib, offset + ia]
    vv += [-np.ones(P), -np.ones(P)]
    if complex_:
        k = first + r + P + np.arange(P)
        owners += [k, k]; ii += [offset + ia, offset + ib]; jj += [offset + ib, offset + ia]
        vv += [-1j * np.ones(P), 1j * np.ones(P)]
    return (np.concatenate(owners), np.concatenate(ii), np.concatenate(jj),
            np.concatenate(vv).astype(complex), nb)


def _embed_coo(owner, i, j, v, N, complex_):
    if not complex_:
        return owner, i, j, v.real
    parts = [(owner, i, j, v.real), (owner, i + N, j + N, v.real),
             (owner, i, j + N, -v.imag), (owner, i + N, j, v.imag)]
    o = np.concatenate([p[0] for p in parts])
    a = np.concatenate([p[1] for p in parts])
    b = np.concatenate([p[2] for p in parts])
    w = np.concatenate([p[3] for p in parts])
    nz = w != 0
    return o[nz], a[nz], b[nz], w[nz]


def _group(owner, i, j, v, K):
    order = np.lexsort((j, i, owner))
    owner, i, j, v = owner[order], i[order], j[order], v[order]
    ptr = np.zeros(K + 1, dtype=np.int64)
    np.add.at(ptr, owner + 1, 1)
    return np.cumsum(ptr), i, j, v


def _quad_coeffs(U, complex_):
    """Columns: u_i B_k u_i^* for each basis element B_k."""
    r = U.shape[1]
    ia, ib, _ = _basis(r, complex_)
    w = U[:, ia] * U[:, ib].conj()
    cols = [np.abs(U) ** 2, 2 * w.real]
    if complex_:
        cols.append(-2 * w.imag)
    return np.concatenate(cols, axis=1)


def _assemble(g, r, complex_):
    ia, ib, _ = _basis(r, complex_)
    P = ia.size
    G = np.zeros((r, r), dtype=complex if complex_ else float)
    G[np.arange(r), np.arange(r)] = g[:r]
    off = g[r:r + P] + (1j * g[r + P:r + 2 * P] if complex_ else 0)
    G[ia, ib] = off
    G[ib, ia] = np.conj(off)
    return G


def _truncation_rank(s, tol):
    """Smallest r with sigma_{r+1} <= 1e-3 * tol (relative to sigma_1 if larger)."""
    if s.size == 0 or s[0] == 0:
        return 0
    cut = 1e-3 * tol
    r = int(np.sum(s > cut))
    return max(r, 1)


def gamma2_problem(Ms, tol):
    """SDP data for gamma_2 of Ms on its numerical range, plus the SVD parts used.

    Returns ``(data, U, s, V, nb)`` where ``nb`` is the number of Hermitian
    coordinates per block.
    """
    n, m = Ms.shape
    complex_ = np.iscomplexobj(Ms)
    dtype = complex if complex_ else float
    U, s, Vh = np.linalg.svd(Ms, full_matrices=False)
    r = _truncation_rank(s, tol)
    U, s, V = U[:, :r], s[:r], Vh[:r].conj().T
    _, _, nb = _basis(r, complex_)
    K = 1 + 2 * nb
    # matrix block [[G, Sigma], [Sigma, H]] in Hermitian coordinates
    og, ig, jg, vg, _ = _block_entries(r, 0, complex_, 1)
    oh, ih, jh, vh, _ = _block_entries(r, r, complex_, 1 + nb)
    owner = np.concatenate([og, oh])
    ii = np.concatenate([ig, ih])
    jj = np.concatenate([jg, jh])
    vv = np.concatenate([vg, vh])
    owner, ii, jj, vv = _embed_coo(owner, ii, jj, vv, 2 * r, complex_)
    ptr, ii, jj, vv = _group(owner, ii, jj, vv, K)
    Cb = np.zeros((2 * r, 2 * r), dtype=dtype)
    Cb[:r, r:] = np.diag(s)
    Cb[r:, :r] = np.diag(s)
    A_lp = np.zeros((K, n + m))
    A_lp[0] = -1.0
    A_lp[1:1 + nb, :n] = _quad_coeffs(U, complex_).T
    A_lp[1 + nb:, n:] = _quad_coeffs(V, complex_).T
    b = np.zeros(K)
    b[0] = -1.0
    data = sdp.SDPData(sdp.embed(Cb), np.zeros(n + m), ptr, ii, jj, vv, A_lp, b)
    return data, U, s, V, nb


def gamma2_norm(M, tol=DEFAULT_TOL, max_iter=120, raise_on_gap=True):
    """Certified bracket for gamma_2(M).

    Parameters
    ----------
    M : array_like
        Real or complex matrix.
    tol : float
        Requested absolute width of the bracket.

    Returns
    -------
    Gamma2Certificate
        ``value`` is an upper bound attained by ``rowFactor``/``colFactor``,
        ``dualValue`` a lower bound.

    Raises
    ------
    Gamma2Error
        If the bracket is wider than ``tol`` (certificate attached).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = _check_input(M)
    n, m = M.shape
    complex_ = np.iscomplexobj(M)
    dtype = complex if complex_ else float
    scale = float(np.max(np.abs(M)))
    if scale == 0:
        return Gamma2Certificate(0.0, np.zeros((n, 0), dtype), np.zeros((m, 0), dtype),
                                 0.0, 0.0, 0, rank=0)
    data, U, s, V, nb = gamma2_problem(M / scale, tol / scale)
    r = s.size
    res = sdp.solve(data, tol=1e-9, max_iter=max_iter)

    # upper bound: explicit factorization from the dual variables
    G = _assemble(res.y[1:1 + nb], r, complex_)
    H = _assemble(res.y[1 + nb:], r, complex_)
    block = np.block([[G, np.diag(s).astype(dtype)], [np.diag(s).astype(dtype), H]])
    W = _psd_factor(block)
    R = (U @ W[:r]) * np.sqrt(scale)
    C = (V @ W[r:]) * np.sqrt(scale)
    a, c = float(np.max(_row_norms(R))), float(np.max(_row_norms(C)))
    if a > 0 and c > 0:
        R = R * np.sqrt(c / a)
        C = C * np.sqrt(a / c)
    resid = np.linalg.norm(M - R @ C.conj().T, 2)
    upper = a * c + resid
    # lower bound: trace norm of the reweighted matrix
    x = np.maximum(res.x, 0.0)
    p = x[:n] / max(np.sum(x[:n]), 1e-300)
    q = x[n:] / max(np.sum(x[n:]), 1e-300)
    lower = trace_norm(np.sqrt(p)[:, None] * M * np.sqrt(q)[None, :])
    lower = max(lower, float(np.max(np.abs(M))))
    cert = Gamma2Certificate(float(upper), R, C, float(lower), float(abs(upper - lower)),
                             res.iterations, "gamma2", W.shape[1], res.status,
                             weights=(p, q))
    log.debug("gamma2 %dx%d rank %d: [%.12g, %.12g] in %d its", n, m, r, lower, upper,
              res.iterations)
    if cert.gap > tol:
        cert.status = "gap"
        if raise_on_gap:
            raise Gamma2Error(f"gamma2 bracket width {cert.gap:.3g} exceeds tol {tol:.3g}", cert)
    return cert


def gamma2_dual(N, tol=DEFAULT_TOL, max_iter=120, raise_on_gap=True):
    """Certified bracket for gamma_2^*(N) with an attaining matrix.

    ``value`` is |<M, N>| for the returned ``attaining`` matrix M, which has
    gamma_2(M) <= 1 by construction (it is the off-diagonal block of a
    positive semidefinite matrix with unit diagonal).  ``dualValue`` is the
    upper bound (tr D_1 + tr D_2) / 2 from diagonal D_1, D_2 with
    [[D_1, conj(N)], [N^T, D_2]] positive semidefinite.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    N = _check_input(N)
    n, m = N.shape
    complex_ = np.iscomplexobj(N)
    dtype = complex if complex_ else float
    scale = float(np.max(np.abs(N)))
    if scale == 0:
        return Gamma2Certificate(0.0, np.zeros((n, 0), dtype), np.zeros((m, 0), dtype), 0.0,
                                 0.0, 0, "dual", 0, attaining=np.zeros((n, m), dtype))
    Ns = N / scale
    T = n + m
    Chat = np.zeros((T, T), dtype=dtype)
    Chat[:n, n:] = 0.5 * Ns.conj()
    Chat[n:, :n] = 0.5 * Ns.T
    d = np.arange(T)
    owner, ii, jj, vv = _embed_coo(d, d, d, -np.ones(T, dtype=complex), T, complex_)
    ptr, ii, jj, vv = _group(owner, ii, jj, vv, T)
    data = sdp.SDPData(-sdp.embed(Chat), np.zeros(0), ptr, ii, jj, vv,
                       np.zeros((T, 0)), -np.ones(T))
    res = sdp.solve(data, tol=1e-9, max_iter=max_iter)

    # upper bound from the diagonal certificate, shifted to be exactly feasible
    y = res.y.copy()
    lam_min = np.linalg.eigvalsh(np.diag(y).astype(dtype) - Chat)[0]
    if lam_min < 0:
        y = y - lam_min * (1 + 1e-12)
    upper = float(np.sum(y)) * scale
    # lower bound from the normalized primal matrix
    Z = sdp.unembed(res.X) * 2 if complex_ else res.X
    dz = np.sqrt(np.maximum(np.real(np.diag(Z)), 1e-300))
    Z = Z / dz[:, None] / dz[None, :]
    Mat = Z[:n, n:]
    pairing = np.sum(Mat * N)
    phase = np.conj(pairing) / abs(pairing) if abs(pairing) > 0 else 1.0
    Mat = Mat * phase
    lower = float(abs(pairing))
    W = _psd_factor(Z)
    R, C = W[:n] * phase, W[n:]
    cert = Gamma2Certificate(lower, R, C, upper, abs(upper - lower), res.iterations,
                             "dual", W.shape[1], res.status, attaining=Mat)
    if cert.gap > tol:
        cert.status = "gap"
        if raise_on_gap:
            raise Gamma2Error(f"gamma2* bracket width {cert.gap:.3g} exceeds tol {tol:.3g}", cert)
    return cert


def pairing(M, N):
    """Bilinear pairing <M, N> = sum_ij M_ij N_ij."""
    return complex(np.sum(np.asarray(M) * np.asarray(N)))


def extract_witness(cert, M, tol=None):
    """Turn a gamma_2 certificate for M into sampled alpha/beta vectors."""
    M = np.atleast_2d(np.asarray(M))
    if tol is None:
        tol = 1e-6 * (1 + float(np.max(np.abs(M))) if M.size else 1.0)
    R = np.asarray(cert.rowFactor)
    C = np.asarray(cert.colFactor)
    alpha = C.conj()
    beta = R.conj()
    w = FactorWitness(R.shape[1], alpha, beta,
                      float(np.max(_row_norms(alpha))) if alpha.size else 0.0,
                      float(np.max(_row_norms(beta))) if beta.size else 0.0)
    err = float(np.max(np.abs(w.reconstruct() - M))) if M.size else 0.0
    if err > tol:
        raise ValueError(f"witness reconstruction error {err:.3g} exceeds {tol:.3g}")
    return w


# ------------------------------------------------------------- oracle

def brute_force_gamma2(M, starts=24, seed=0):
    """gamma_2 of a matrix with at most 3 rows and columns by direct search.

    Uses that an optimal factorization can be taken with R square and
    invertible, so C^* = R^{-1} M.  After normalizing max_i ||R_i|| <= 1 the
    objective is max_j ||(R^{-1} M)_{:, j}||^2, minimized in epigraph form
    with SLSQP from ``starts`` random initial R.  Independent of any SVD or
    SDP code.
    """
    M = np.atleast_2d(np.asarray(M))
    n, m = M.shape
    if max(n, m) > 3:
        raise ValueError("brute force is limited to 3 x 3")
    if not np.any(M):
        return 0.0
    if n > m:
        return brute_force_gamma2(M.T, starts, seed)
    complex_ = np.iscomplexobj(M) and np.any(M.imag)
    rng = np.random.default_rng(seed)
    npar = 2 * n * n if complex_ else n * n

    def unpack(z):
        if complex_:
            return z[:n * n].reshape(n, n) + 1j * z[n * n:npar].reshape(n, n)
        return z[:npar].reshape(n, n)

    def col_norms(z):
        R = unpack(z)
        try:
            X = np.linalg.solve(R, M)
        except np.linalg.LinAlgError:
            return np.full(m, 1e6)
        return np.sum(np.abs(X) ** 2, axis=0)

    cons = [{"type": "ineq", "fun": lambda z: z[-1] - col_norms(z)},
            {"type": "ineq", "fun": lambda z: 1.0 - np.sum(np.abs(unpack(z)) ** 2, axis=1)}]
    best = np.inf
    for k in range(starts):
        R0 = np.eye(n) if k == 0 else rng.normal(size=(n, n)) + (
            1j * rng.normal(size=(n, n)) if complex_ else 0)
        R0 = R0 / np.max(np.sqrt(np.sum(np.abs(R0) ** 2, axis=1)))
        z0 = np.concatenate([R0.real.ravel()] + ([R0.imag.ravel()] if complex_ else []))
        t0 = float(np.max(col_norms(np.append(z0, 0.0))))
        if not np.isfinite(t0) or t0 > 1e8:
            continue
        out = opt.minimize(lambda z: z[-1], np.append(z0, t0), method="SLSQP",
                           constraints=cons, options={"maxiter": 500, "ftol": 1e-14})
        z = out.x
        R = unpack(z)
        rn = float(np.max(np.sqrt(np.sum(np.abs(R) ** 2, axis=1))))
        try:
            cn = float(np.max(np.sqrt(col_norms(z))))
        except np.linalg.LinAlgError:
            continue
        val = rn * cn
        if np.isfinite(val):
            best = min(best, val)
    return float(best)
