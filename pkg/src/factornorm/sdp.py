"""Dense primal-dual interior-point solver for small semidefinite programs.

Problems are stated in the dual standard form

    maximise  b.y   subject to   S = C - sum_k y_k A_k  in  K,

where K is one positive semidefinite block times a non-negative orthant.  The
matching primal is  minimise <C, X>  subject to  <A_k, X> = b_k, X in K.
Each A_k is sparse in the matrix block and dense in the orthant block.  The
solver uses the HKM search direction with Mehrotra's predictor-corrector
heuristic.  Complex Hermitian data is handled by the caller via
:func:`embed` before the problem reaches this module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import _core

log = logging.getLogger(__name__)


def embed(H):
    """Real symmetric image [[Re, -Im], [Im, Re]] of a Hermitian matrix."""
    H = np.asarray(H)
    if not np.iscomplexobj(H):
        return H.astype(float)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def unembed(X):
    """Inverse of :func:`embed`, averaging the redundant copies."""
    n = X.shape[0] // 2
    a, b = X[:n, :n], X[:n, n:]
    c, d = X[n:, :n], X[n:, n:]
    return 0.5 * (a + d) + 0.5j * (c - b)


@dataclass
class SDPData:
    """Problem data.

    ``A_sdp`` is given in COO form grouped by constraint: constraint k owns
    entries ``ptr[k]:ptr[k+1]`` of ``rows``/``cols``/``vals``, listing both
    (i, j) and (j, i) for off-diagonal positions.
    """

    C: np.ndarray
    c_lp: np.ndarray
    ptr: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    A_lp: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float)
        self.c_lp = np.asarray(self.c_lp, dtype=float)
        self.ptr = np.asarray(self.ptr, dtype=np.int64)
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.cols = np.asarray(self.cols, dtype=np.int64)
        self.vals = np.asarray(self.vals, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.K = self.b.size
        self.ns = self.C.shape[0]
        self.nl = self.c_lp.size
        self.A_lp = np.asarray(self.A_lp, dtype=float).reshape(self.K, self.nl)
        owner = np.repeat(np.arange(self.K), np.diff(self.ptr))
        self._Asp = sp.csr_matrix((self.vals, (owner, self.rows * self.ns + self.cols)),
                                  shape=(self.K, self.ns * self.ns))
        self._AspT = self._Asp.T.tocsr()

    def A(self, X, x):
        return self._Asp @ X.ravel() + self.A_lp @ x

    def At(self, y):
        return (self._AspT @ y).reshape(self.ns, self.ns), self.A_lp.T @ y


@dataclass
class SDPResult:
    y: np.ndarray
    X: np.ndarray
    x: np.ndarray
    S: np.ndarray
    s: np.ndarray
    primal_objective: float
    dual_objective: float
    iterations: int
    status: str


def _chol_inv(S):
    L = np.linalg.cholesky(S)
    Linv = sla.solve_triangular(L, np.eye(S.shape[0]), lower=True)
    return Linv.T @ Linv, L


def _max_step_psd(L, D):
    """Largest alpha with L L^T + alpha D still PSD (inf if unbounded)."""
    if D.shape[0] == 0:
        return np.inf
    M = sla.solve_triangular(L, sla.solve_triangular(L, D, lower=True).T, lower=True)
    lam = np.linalg.eigvalsh(0.5 * (M + M.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x, dx):
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def solve(data: SDPData, tol=1e-9, max_iter=120, step=0.98):
    """Run the interior-point method and return an :class:`SDPResult`."""
    ns, nl, K = data.ns, data.nl, data.K
    b, C, c = data.b, data.C, data.c_lp
    nrm_b = np.linalg.norm(b)
    nrm_C = np.sqrt(np.linalg.norm(C) ** 2 + np.linalg.norm(c) ** 2)
    a_norms = np.sqrt(np.asarray(data._Asp.multiply(data._Asp).sum(axis=1)).ravel()
                      + np.sum(data.A_lp ** 2, axis=1))
    n = ns + nl
    xi = max(10.0, np.sqrt(n), float(np.max((1 + np.abs(b)) / (1 + a_norms))) if K else 1.0)
    eta = max(10.0, np.sqrt(n), nrm_C, float(np.max(a_norms)) if K else 1.0)
    X = xi * np.eye(ns)
    x = xi * np.ones(nl)
    S = eta * np.eye(ns)
    s = eta * np.ones(nl)
    y = np.zeros(K)
    status = "max_iter"
    it = 0
    best = None
    best_score = np.inf
    for it in range(1, max_iter + 1):
        AtS, Atl = data.At(y)
        Rd = C - AtS - S
        rd = c - Atl - s
        rp = b - data.A(X, x)
        pobj = float(np.sum(C * X) + c @ x)
        dobj = float(b @ y)
        mu = (float(np.sum(X * S)) + float(x @ s)) / n
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / (1 + nrm_b)
        dinf = np.sqrt(np.linalg.norm(Rd) ** 2 + np.linalg.norm(rd) ** 2) / (1 + nrm_C)
        log.debug("it %d pobj %.10g dobj %.10g gap %.2e pinf %.2e dinf %.2e",
                  it, pobj, dobj, gap, pinf, dinf)
        score = max(gap, pinf, dinf)
        if score < best_score:
            best_score = score
            best = (it, X.copy(), x.copy(), y.copy(), S.copy(), s.copy())
        if gap < tol and pinf < tol and dinf < tol:
            status = "optimal"
            break
        if score > 100 * best_score or (it > best[0] + 4 and best_score < 1e3 * tol):
            # loss of precision: fall back to the best iterate seen
            status = "stalled"
            break
        try:
            Sinv, LS = _chol_inv(S)
            LX = np.linalg.cholesky(X)
        except np.linalg.LinAlgError:
            status = "numerical"
            break
        H = _core.schur_sdp(X, Sinv, data.ptr, data.rows, data.cols, data.vals)
        if nl:
            H += (data.A_lp * (x / s)) @ data.A_lp.T
        H = 0.5 * (H + H.T)
        try:
            cf = sla.cho_factor(H, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            H[np.diag_indices(K)] += 1e-14 * np.max(np.abs(np.diag(H)))
            try:
                cf = sla.cho_factor(H, lower=True, check_finite=False)
            except np.linalg.LinAlgError:
                status = "numerical"
                break
        XRS = X @ Rd @ Sinv
        xrs = x * rd / s

        def direction(smu, corr, corr_lp):
            rhs = b - data.A(smu * Sinv, smu / s) + data.A(XRS, xrs)
            if corr is not None:
                rhs = rhs + data.A(corr @ Sinv, corr_lp / s)
            dy = sla.cho_solve(cf, rhs, check_finite=False)
            AtdS, Atdl = data.At(dy)
            dS = Rd - AtdS
            ds = rd - Atdl
            dX = smu * Sinv - X - X @ dS @ Sinv
            dx = smu / s - x - x * ds / s
            if corr is not None:
                dX = dX - corr @ Sinv
                dx = dx - corr_lp / s
            dX = 0.5 * (dX + dX.T)
            return dy, dX, dx, dS, ds

        def steps(dX, dx, dS, ds):
            ap = min(_max_step_psd(LX, dX), _max_step_lp(x, dx))
            ad = min(_max_step_psd(LS, dS), _max_step_lp(s, ds))
            return ap, ad

        dya, dXa, dxa, dSa, dsa = direction(0.0, None, None)
        ap, ad = steps(dXa, dxa, dSa, dsa)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = (float(np.sum((X + ap * dXa) * (S + ad * dSa)))
                  + float((x + ap * dxa) @ (s + ad * dsa))) / n
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3))
        dy, dX, dx, dS, ds = direction(sigma * mu, dXa @ dSa, dxa * dsa)
        ap, ad = steps(dX, dx, dS, ds)
        ap, ad = min(1.0, step * ap), min(1.0, step * ad)
        if max(ap, ad) < 1e-10:
            status = "stalled"
            break
        X = X + ap * dX
        x = x + ap * dx
        y = y + ad * dy
        S = S + ad * dS
        s = s + ad * ds
        X = 0.5 * (X + X.T)
        S = 0.5 * (S + S.T)
    if status != "optimal" and best is not None:
        _, X, x, y, S, s = best
    pobj = float(np.sum(C * X) + c @ x)
    dobj = float(b @ y)
    return SDPResult(y, X, x, S, s, pobj, dobj, it, status)
