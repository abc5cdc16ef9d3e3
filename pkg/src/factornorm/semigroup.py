"""Matrix semigroups T_t = exp(-t A) and the Hille-Phillips calculus."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize_scalar

from .expm import expm
from .gamma2 import gamma2_dual
from .hankel import refine_grid, weighted_tensor_matrix
from .quadrature import integrate

IMAG_AXIS_TOL = 1e-10


def _bounded(A, lam):
    """Re(lambda) >= 0 everywhere, and imaginary-axis eigenvalues semisimple."""
    if np.any(lam.real < -IMAG_AXIS_TOL):
        return False
    axis = np.abs(lam.real) <= IMAG_AXIS_TOL
    if not np.any(axis):
        return True
    d = A.shape[0]
    scale = max(1.0, float(np.max(np.abs(lam))))
    for mu in np.unique(np.round(lam[axis], 8)):
        alg = int(np.sum(np.abs(lam - mu) <= 1e-6 * scale))
        sv = np.linalg.svd(A - mu * np.eye(d), compute_uv=False)
        geo = int(np.sum(sv <= 1e-8 * max(1.0, sv[0])))
        if geo < alg:
            return False
    return True


@dataclass
class SemigroupModel:
    generator: np.ndarray
    id: str = "A"
    spectralAbscissa: float = field(init=False)
    boundedFlag: bool = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.generator, dtype=complex))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("generator must be square")
        if not np.all(np.isfinite(A)):
            raise ValueError("generator has non-finite entries")
        self.generator = A
        lam = np.linalg.eigvals(A)
        self.eigenvalues = lam
        self.spectralAbscissa = float(np.min(lam.real))
        self.boundedFlag = _bounded(A, lam)
        self._growth = None

    @property
    def dim(self):
        return self.generator.shape[0]

    def shifted(self, eps):
        return SemigroupModel(self.generator + eps * np.eye(self.dim), f"{self.id}+{eps:g}")


def semigroup_at(model, t):
    """exp(-t A) for scalar t, or a stack for an array of t."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("semigroup is defined for t >= 0")
    A = model.generator
    if t_arr.ndim == 0:
        return expm(-float(t_arr) * A)
    return expm(-t_arr[:, None, None] * A[None])


def _spec_norms(E):
    return np.linalg.svd(E, compute_uv=False)[..., 0]


def _schur_tail(A, h):
    """Bound on sup_{t >= h} ||exp(-t A)|| when every Re(lambda) > 0.

    With A = Q (D + N) Q^*, ||exp(-tA)|| <= exp(-alpha t) sum_k (||N|| t)^k / k!;
    each term is bounded separately by its supremum over t >= h.
    """
    T, _ = sla.schur(A, output="complex")
    alpha = float(np.min(np.real(np.diag(T))))
    nu = float(np.linalg.norm(np.triu(T, 1), 2))
    if nu <= 1e-14 * max(1.0, float(np.max(np.abs(T)))):
        return math.exp(-alpha * h)
    total = 0.0
    for k in range(A.shape[0]):
        tk = max(h, k / alpha)
        total += math.exp(-alpha * tk + k * math.log(nu * tk) - math.lgamma(k + 1)) if tk > 0 else (1.0 if k == 0 else 0.0)
    return total


def _tail_bound(model, h):
    A = model.generator
    lam = model.eigenvalues
    axis = np.abs(lam.real) <= IMAG_AXIS_TOL
    if not np.any(axis):
        return _schur_tail(A, h)
    d = A.shape[0]
    # reorder the Schur form with the imaginary-axis eigenvalues first
    T, Z, sdim = sla.schur(A, output="complex", sort=lambda x: abs(x.real) <= IMAG_AXIS_TOL)
    A1, A12, A2 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
    if sdim < d:
        X = sla.solve_sylvester(A1, -A2, -A12)
    else:
        X = np.zeros((sdim, 0))
    # A = Z S diag(A1, A2) S^{-1} Z^* with S = [[I, X], [0, I]]
    S = np.eye(d, dtype=complex)
    S[:sdim, sdim:] = X
    kS = np.linalg.cond(S)
    w, V1 = np.linalg.eig(A1)
    kV = np.linalg.cond(V1) if sdim > 1 else 1.0
    if np.allclose(A1, np.diag(np.diag(A1)), atol=1e-12):
        kV = 1.0
    rest = _schur_tail(A2, h) if sdim < d else 0.0
    return kS * max(kV, rest)


def estimate_growth_bound(model, horizon=None, samples=2000, with_details=False):
    """C_A = sup_{t >= 0} ||exp(-t A)|| (spectral norm).

    Samples [0, horizon] on a mixed linear/logarithmic grid, polishes the
    largest local maxima by bounded golden-section search, and bounds the
    tail t >= horizon from the Schur form (and a block diagonalisation when
    there are eigenvalues on the imaginary axis).  Returns the larger of the
    sampled maximum and the tail bound.
    """
    if not model.boundedFlag:
        raise ValueError(f"semigroup {model.id} is not uniformly bounded")
    alpha = model.spectralAbscissa
    if horizon is None:
        horizon = 50.0 / alpha if alpha > IMAG_AXIS_TOL else 1e3
    ts = np.unique(np.concatenate([np.linspace(0, horizon, samples),
                                   np.geomspace(1e-4 * horizon, horizon, samples // 4)]))
    norms = np.concatenate([_spec_norms(semigroup_at(model, chunk))
                            for chunk in np.array_split(ts, max(1, ts.size // 256))])
    best = float(np.max(norms))
    # polish the three best local maxima
    interior = np.where((norms[1:-1] >= norms[:-2]) & (norms[1:-1] >= norms[2:]))[0] + 1
    cand = sorted(interior, key=lambda i: -norms[i])[:3]
    for i in cand:
        res = minimize_scalar(lambda t: -_spec_norms(semigroup_at(model, t)),
                              bounds=(ts[i - 1], ts[i + 1]), method="bounded",
                              options={"xatol": 1e-10 * max(1.0, ts[i])})
        best = max(best, float(-res.fun))
    tail = _tail_bound(model, horizon)
    value = max(best, tail)
    if with_details:
        return value, {"sampled": best, "tail": tail, "horizon": horizon}
    return value


def growth_bound(model):
    """Cached :func:`estimate_growth_bound` with default settings."""
    if model._growth is None:
        model._growth = estimate_growth_bound(model, with_details=True)
    return model._growth[0]


@dataclass
class CalculusResult:
    operatorValue: np.ndarray
    operatorNorm: float
    quadratureError: float
    tailError: float


def hille_phillips(model, b, tol=1e-10, cA=None, max_panels=20000):
    """Gamma(A, b) = int_0^inf b(t) exp(-t A) dt.

    Adaptive Gauss-Kronrod on [0, T*] split at the weight's breakpoints,
    with T* chosen so that C_A int_{T*}^inf |b| <= tol / 2.
    """
    if not model.boundedFlag:
        raise ValueError(f"semigroup {model.id} is not uniformly bounded")
    cA = growth_bound(model) if cA is None else cA
    d = model.dim
    bps = b.breakpoints()
    T = max(bps[-1], 1.0)
    alpha = b.min_decay
    step = 1.0 / alpha if math.isfinite(alpha) else 1.0
    while cA * b.abs_tail(T) > tol / 2:
        T += step
        if T > 1e7:
            raise ArithmeticError("tail of the weight does not decay fast enough")
    tail = cA * b.abs_tail(T)
    A = model.generator

    def f(t):
        return b(t)[:, None, None] * expm(-t[:, None, None] * A[None])

    pts = sorted({p for p in bps if p < T} | {T})
    # split long stretches so each panel sees a bounded amount of oscillation
    width = 1.0 / max(1.0, float(np.max(np.abs(model.eigenvalues))))
    extra = np.arange(0.0, T, 16 * width)
    pts = np.unique(np.concatenate([pts, extra[extra < T]]))
    val, err = integrate(f, pts, tol=tol / (2 * d), rtol=0.0, max_panels=max_panels)
    qerr = d * err
    if qerr + tail > tol:
        raise ArithmeticError(f"Hille-Phillips tolerance {tol:.2g} not reached "
                              f"(quadrature {qerr:.2g}, tail {tail:.2g})")
    val = np.asarray(val)
    return CalculusResult(val, float(np.linalg.norm(val, 2)), float(qerr), float(tail))


@dataclass
class BoundReport:
    modelId: str
    weightId: str
    lhs: float
    rhs: float
    cA: float
    slack: float
    passed: bool
    cASampled: float
    levels: list
    tolerances: dict

    @property
    def pass_(self):
        return self.passed

    def to_dict(self):
        return {"model": self.modelId, "weight": self.weightId, "lhs": self.lhs,
                "rhs": self.rhs, "cA": self.cA, "cASampled": self.cASampled,
                "slack": self.slack, "pass": self.passed, "levels": self.levels,
                "tolerances": self.tolerances}


def verify_calculus_bound(model, psi, gS, gU, tol=1e-4, levels=2, hp_tol=1e-10,
                          sdp_tol=1e-7):
    """Check ||Gamma(A, b)|| <= C_A^2 gamma_2^*(Psi) with b the contraction of Psi.

    gamma_2^* is replaced by the lower end of the certified bracket for the
    weighted sample of Psi, at ``levels`` successive grid refinements.  The
    report passes when every level satisfies lhs <= rhs + tol.
    """
    cA = growth_bound(model)
    sampled = model._growth[1]["sampled"]
    b = psi.contracted()
    lhs = hille_phillips(model, b, tol=hp_tol, cA=cA).operatorNorm
    rows = []
    gs, gu = gS, gU
    for level in range(levels):
        N = weighted_tensor_matrix(psi, gs, gu).entries
        cert = gamma2_dual(N, tol=sdp_tol)
        rhs = cA ** 2 * cert.value
        rows.append({"level": level, "nS": len(gs), "nU": len(gu),
                     "gamma2Dual": cert.value, "gamma2DualUpper": cert.dualValue,
                     "rhs": rhs, "pass": bool(lhs <= rhs + tol)})
        if level + 1 < levels:
            gs, gu = refine_grid(gs), refine_grid(gu)
    rhs = rows[-1]["rhs"]
    return BoundReport(model.id, psi.id, float(lhs), float(rhs), float(cA), float(rhs - lhs),
                       all(r["pass"] for r in rows), float(sampled), rows,
                       {"bound": tol, "hillePhillips": hp_tol, "sdp": sdp_tol})


def shift_consistency(model, b, eps, tol=1e-10):
    """||Gamma(A + eps I, b) - Gamma(A, exp(-eps t) b)||."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0:
        return 0.0
    left = hille_phillips(model.shifted(eps), b, tol=tol)
    right = hille_phillips(model, b.damp(eps), tol=tol)
    return float(np.linalg.norm(left.operatorValue - right.operatorValue, 2))
