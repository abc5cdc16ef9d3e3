"""Hardy-space utilities on the circle and the line.

Circle functions are analytic polynomials (or truncated power series)
sum_n c_n z^n; norms use the normalized measure d(theta) / 2 pi.  Line
functions are images of circle functions under the conformal transfer

    G_p(f)(t) = f((t - i) / (t + i)) / (pi^{1/p} (t + i)^{2/p}),   p in {1, 2},

which maps H^p of the circle isometrically onto H^p of the line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .quadrature import gauss_legendre, integrate
from .symbols import Piece, Weight

BOUNDARY_GAP = 1e-10


@dataclass(frozen=True)
class HardyFunction:
    """Circle series (``p is None``) or its line image G_p (``p`` in {1, 2})."""

    coeffs: np.ndarray
    p: int | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("need a non-empty coefficient list")
        object.__setattr__(self, "coeffs", c)
        if self.p not in (None, 1, 2):
            raise ValueError("p must be 1 or 2")

    @property
    def degree(self):
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0

    def circle(self, z):
        """Value of the underlying circle function at z (|z| <= 1)."""
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def __call__(self, x):
        if self.p is None:
            return self.circle(x)
        return conformal_transfer(HardyFunction(self.coeffs), self.p, x)

    def on_circle(self, N):
        """Samples at the N-th roots of unity exp(2 pi i k / N)."""
        c = self.coeffs
        if c.size <= N:
            return N * np.fft.ifft(c, N)
        folded = np.zeros(N, dtype=complex)
        np.add.at(folded, np.arange(c.size) % N, c)
        return N * np.fft.ifft(folded)

    def to_line(self, p):
        return HardyFunction(self.coeffs, p)

    def norm(self, q=None, N=None):
        """L^q norm (q defaults to the space index, 2 on the circle)."""
        q = q if q is not None else (self.p or 2)
        N = N or max(8192, 8 * self.coeffs.size)
        if self.p is None:
            vals = np.abs(self.on_circle(N))
            return float(np.mean(vals ** q) ** (1.0 / q))
        return line_norm(self, q, N)


def conformal_transfer(f, p, t):
    """G_p(f)(t) for a circle function ``f``."""
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    t = np.asarray(t, dtype=float)
    w = (t - 1j) / (t + 1j)
    val = f.circle(w) if isinstance(f, HardyFunction) else f(w)
    return val / (math.pi ** (1.0 / p) * (t + 1j) ** (2.0 / p))


def line_norm(F, q, N=8192):
    """||F||_q on the real line for F = G_p(f), F a line HardyFunction.

    Substitutes t = tan(theta / 2), dt = (1 + t^2) / 2 d(theta), and applies
    the midpoint rule on (-pi, pi); the integrand is smooth and periodic.
    """
    theta = -math.pi + (np.arange(N) + 0.5) * (2 * math.pi / N)
    t = np.tan(theta / 2)
    vals = np.abs(F(t)) ** q * (1 + t * t) / 2
    return float(np.sum(vals) * (2 * math.pi / N)) ** (1.0 / q)


@dataclass
class RieszFactors:
    """h = h1 * h2 on the circle with |h1| = |h2| = |h|^{1/2}."""

    h1: HardyFunction
    h2: HardyFunction
    residual: float
    normH1: float
    normH2: float
    normH: float
    innerRoots: np.ndarray
    phase: complex

    def __iter__(self):
        yield self.h1
        yield self.h2


def _outer_sqrt_samples(h, N):
    """Samples of exp(log O / 2) where log O has real part log|h| on the circle."""
    vals = h.on_circle(N)
    mod = np.abs(vals)
    if np.min(mod) <= 0:
        raise ArithmeticError("function vanishes on the sampling grid")
    c = np.fft.fft(np.log(mod)) / N
    analytic = np.zeros(N, dtype=complex)
    analytic[0] = c[0]
    analytic[1:N // 2] = 2 * c[1:N // 2]
    log_outer = N * np.fft.ifft(analytic)
    return np.exp(0.5 * log_outer), vals


def _series_from_samples(samples):
    N = samples.size
    coef = np.fft.fft(samples) / N
    coef = coef[: N // 2]
    big = np.nonzero(np.abs(coef) > 1e-17 * np.max(np.abs(coef)))[0]
    return coef[: big[-1] + 1] if big.size else coef[:1]


def riesz_factorize_circle(h, fftSize=4096):
    """Split h = h1 h2 with |h1| = |h2| = |h|^{1/2} on the circle.

    Zeros inside the disc go to a Blaschke factor carried by h1; a zero of
    order k at the origin is split as z^{ceil(k/2)} on h1 and z^{floor(k/2)}
    on h2.  The outer part's square root comes from the FFT of log|h|, with
    its constant phase fixed so the product reproduces h at z = 1.
    """
    if not isinstance(h, HardyFunction):
        h = HardyFunction(h)
    c = np.trim_zeros(h.coeffs, "b")
    if c.size == 0:
        raise ValueError("h must not vanish identically")
    deg = c.size - 1
    if fftSize <= 8 * deg:
        raise ValueError(f"fftSize must exceed 8 x degree = {8 * deg}")
    k = int(np.argmax(np.abs(c) > 0))
    g = c[k:]
    roots = np.roots(g[::-1]) if g.size > 1 else np.zeros(0, dtype=complex)
    if not np.all(np.isfinite(roots)):
        raise ArithmeticError("root finding failed")
    mod = np.abs(roots)
    if np.any(np.abs(mod - 1) <= BOUNDARY_GAP):
        raise ValueError("h has a zero on the unit circle")
    inner = roots[mod < 1 - BOUNDARY_GAP]
    N = int(fftSize)
    z = np.exp(2j * math.pi * np.arange(N) / N)
    blaschke = np.ones(N, dtype=complex)
    for r in inner:
        blaschke *= (z - r) / (1 - np.conj(r) * z)
    sq, vals = _outer_sqrt_samples(h, N)
    k1, k2 = k - k // 2, k // 2
    raw = z ** k * blaschke * sq * sq
    phase = vals[0] / raw[0]
    phase /= abs(phase)
    h1 = HardyFunction(_series_from_samples(z ** k1 * blaschke * phase * sq))
    h2 = HardyFunction(_series_from_samples(z ** k2 * sq))
    # residual off the FFT grid
    M = 3 * N + 1
    zt = np.exp(2j * math.pi * (np.arange(M) + 0.5) / M)
    hv = h.circle(zt)
    resid = float(np.max(np.abs(hv - h1.circle(zt) * h2.circle(zt))))
    sup = float(np.max(np.abs(hv)))
    return RieszFactors(h1, h2, resid / sup, h1.norm(2), h2.norm(2), h.norm(1),
                        inner, complex(phase))


def sarason_factorize_line(h):
    """Factor a line function h = G_1(g) as G_2(g1) G_2(g2)."""
    if not isinstance(h, HardyFunction):
        h = HardyFunction(h, 1)
    if h.p != 1:
        raise ValueError("expected a line function in H^1 (p = 1)")
    fac = riesz_factorize_circle(HardyFunction(h.coeffs))
    return fac.h1.to_line(2), fac.h2.to_line(2)


# ---------------------------------------------------------------- Fejer kernels

_S7 = np.array([0, 0, 0, 0, 35, -84, 70, -20], dtype=float)  # smoothstep, degree 7


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return np.polynomial.polynomial.polyval(x, _S7)


def bump_hat(u):
    """1 on [-1, 1], 0 outside [-2, 2], 1 - smoothstep(|u| - 1) in between."""
    a = np.abs(np.asarray(u, dtype=float))
    return np.where(a <= 1, 1.0, np.where(a >= 2, 0.0, 1.0 - _smoothstep(a - 1.0)))


# g(u) = 1 - S(u - 1) on [1, 2] written in the variable x = u - 1
_G = -_S7.copy()
_G[0] += 1.0
_G_DERIVS = [_G]
for _ in range(7):
    _G_DERIVS.append(np.polynomial.polynomial.polyder(_G_DERIVS[-1]))
_GL_U, _GL_W = gauss_legendre(48, 1.0, 2.0)


def _fourth_derivative_l1():
    d4 = np.polynomial.polynomial.polyder(_S7, 4)
    r = np.polynomial.polynomial.polyroots(d4)
    r = np.sort(r[(np.abs(r.imag) < 1e-12) & (r.real > 0) & (r.real < 1)].real)
    pts = np.concatenate([[0.0], r, [1.0]])
    anti = np.polynomial.polynomial.polyint(d4)
    vals = np.polynomial.polynomial.polyval(pts, anti)
    return 2.0 * float(np.sum(np.abs(np.diff(vals))))


BUMP_D4_L1 = _fourth_derivative_l1()


def bump(t):
    """phi(t) = (1 / 2 pi) int bump_hat(u) exp(i u t) du (real and even)."""
    t = np.abs(np.asarray(t, dtype=float))
    out = np.empty(t.shape)
    small = t < 8.0
    if np.any(small):
        ts = t[small]
        head = np.where(ts > 0, np.sin(ts) / np.where(ts > 0, ts, 1.0), 1.0)
        tail = np.cos(np.multiply.outer(ts, _GL_U)) @ (_GL_W * np.polynomial.polynomial.polyval(_GL_U - 1.0, _G))
        out[small] = (head + tail) / math.pi
    big = ~small
    if np.any(big):
        tb = t[big]
        acc = np.zeros(tb.shape, dtype=complex)
        for k, gk in enumerate(_G_DERIVS):
            g1 = np.polynomial.polynomial.polyval(0.0, gk)
            g2 = np.polynomial.polynomial.polyval(1.0, gk)
            term = (g2 * np.exp(2j * tb) - g1 * np.exp(1j * tb)) / (1j * tb) ** (k + 1)
            acc += (-1) ** k * term
        out[big] = (np.sin(tb) / tb + acc.real) / math.pi
    return out


def bump_abs_tail(T):
    """Bound on int_T^inf |phi| from |phi(t)| <= ||phi-hat''''||_1 / (2 pi t^4)."""
    return BUMP_D4_L1 / (6 * math.pi * T ** 3)


_BUMP_T = 2000.0


def _abs_integral(f, a, b, period, tol=1e-11):
    if b <= a:
        return 0.0
    bps = np.concatenate([np.arange(a, b, period), [b]])
    val, _ = integrate(lambda t: np.abs(f(t)), bps, tol=tol, rtol=1e-13, max_panels=400000)
    return float(val)


_BUMP_CUM = {}


def bump_abs_integral(a, b):
    """int_a^b |phi| for 0 <= a <= b <= 2000 (cached on a fixed partition)."""
    key = (a, b)
    if key not in _BUMP_CUM:
        _BUMP_CUM[key] = _abs_integral(bump, a, b, math.pi / 2)
    return _BUMP_CUM[key]


@dataclass(frozen=True)
class FejerKernel:
    """phi_n(t) = n phi(n t) - phi(t / n) / n built on the smoothstep bump."""

    n: int

    def hat(self, u):
        u = np.asarray(u, dtype=float)
        return bump_hat(u / self.n) - bump_hat(self.n * u)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = self.n
        return n * bump(n * t) - bump(t / n) / n

    def l1_norm(self):
        """||phi_n||_1 with an absolute accuracy around 1e-9."""
        n = self.n
        if n == 1:
            return 0.0
        T1 = _BUMP_T
        head = _abs_integral(self, 0.0, T1, math.pi / (2 * n))
        # beyond T1 the first term is below the bump tail bound at n * T1
        far = bump_abs_integral(0.0, _BUMP_T) - bump_abs_integral(0.0, T1 / n)
        far += bump_abs_tail(_BUMP_T)
        return 2.0 * (head + far)


def bump_l1_norm():
    return 2.0 * (bump_abs_integral(0.0, _BUMP_T) + bump_abs_tail(_BUMP_T))


def fejer_weight(base=None, n=1):
    """Fejer kernel phi_n for the built-in bump (``base`` may name it)."""
    if base not in (None, "smoothstep7") and not (isinstance(base, dict)
                                                 and base.get("kind") == "smoothstep7"):
        raise ValueError(f"unsupported bump spec {base!r}")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    return FejerKernel(int(n))


def _restrict(weight, lo, hi):
    """Pieces of ``weight`` restricted to [lo, hi), re-expanded about their new start."""
    out = []
    for p in weight.pieces:
        a = max(lo, p.start)
        b = min(hi, p.end)
        if b <= a:
            continue
        h = a - p.start
        scale = p.coeff * np.exp(-p.decay * h)
        for j in range(p.power + 1):
            c = scale * math.comb(p.power, j) * h ** (p.power - j)
            if c != 0:
                out.append(Piece(complex(c), p.decay, j, a, b))
    return out


def _times_poly(pieces, poly):
    """Multiply pieces starting at a common point s by sum_m poly[m] (t - s)^m."""
    out = []
    for p in pieces:
        for m, a in enumerate(poly):
            if a != 0:
                out.append(Piece(p.coeff * a, p.decay, p.power + m, p.start, p.end))
    return out


def error_transform(kernel, b):
    """(phi_n-hat - 1) b as a Weight on [0, inf).

    phi_n-hat equals 1 on [2/n, n], so the error lives on [0, 2/n] and
    [n, inf): -b on [0, 1/n] and [2n, inf), -(1 - S(n u - 1)) b on
    [1/n, 2/n], and -S(u/n - 1) b on [n, 2n].
    """
    n = kernel.n
    if n == 1:
        return Weight(tuple(_restrict(b, 0.0, math.inf))).scaled(-1.0)
    pieces = [q for q in _restrict(b, 0.0, 1.0 / n)]
    pieces = [Piece(-q.coeff, q.decay, q.power, q.start, q.end) for q in pieces]
    scale_lo = n ** np.arange(8.0)
    g_lo = -(_G * scale_lo)  # -(1 - S(n x)) with x = u - 1/n
    by_start = _restrict(b, 1.0 / n, 2.0 / n)
    pieces += _times_poly(by_start, g_lo)
    s_hi = -(_S7 / (float(n) ** np.arange(8.0)))  # -S(x / n) with x = u - n
    pieces += _times_poly(_restrict(b, float(n), 2.0 * n), s_hi)
    pieces += [Piece(-q.coeff, q.decay, q.power, q.start, q.end)
               for q in _restrict(b, 2.0 * n, math.inf)]
    return Weight(tuple(pieces))


def _jumps(weight, orders=1):
    """Jumps of the derivatives 0..orders at every breakpoint, as {point: [J0, J1, ...]}."""
    out = {}
    for p in weight.pieces:
        a = complex(p.decay)
        for x, sign, at in ((0.0, 1.0, p.start), (p.length, -1.0, p.end)):
            if not math.isfinite(at):
                continue
            vals = out.setdefault(at, [0j] * (orders + 1))
            for j in range(orders + 1):
                # d^j/dx^j [x^k e^{-a x}] = e^{-a x} sum_i C(j,i) k!/(k-i)! x^{k-i} (-a)^{j-i}
                acc = 0j
                for i in range(min(j, p.power) + 1):
                    acc += (math.comb(j, i) * math.perm(p.power, i)
                            * (x ** (p.power - i) if p.power - i > 0 else 1.0)
                            * (-a) ** (j - i))
                vals[j] += sign * p.coeff * np.exp(-a * x) * acc
    return out


def l1_approx_error(kernel, h, T=1e7, tol=1e-9):
    """||phi_n * h - h||_1 for h with transform b on [0, inf) (zero on u < 0).

    The error function E(t) = (1 / 2 pi) int E-hat(u) exp(i u t) du is
    evaluated in closed form from the piecewise representation of
    E-hat = (phi_n-hat - 1) b.  |E| is integrated over [-T, T] after the
    substitution t = sinh(v); beyond T the leading asymptotic term
    |E-hat'(0+)| / (2 pi t^2) is integrated exactly.  Raises ValueError when
    E-hat has a jump, since then E is not integrable.

    Returns
    -------
    value, error : float, float
    """
    if isinstance(h, Weight) and not h.pieces:
        return 0.0, 0.0
    Ehat = error_transform(kernel, h)
    if not Ehat.pieces:
        return 0.0, 0.0
    jumps = _jumps(Ehat, 1)
    scale = max(abs(p.coeff) for p in Ehat.pieces)
    for at, (j0, _) in jumps.items():
        if abs(j0) > 1e-12 * scale:
            raise ValueError(f"error transform jumps at u = {at:g}; h is not in H^1")
    d0 = abs(jumps.get(0.0, [0j, 0j])[1])

    def E(t):
        return Ehat.laplace(-1j * t) / (2 * math.pi)

    vmax = math.asinh(T)
    bps = np.linspace(-vmax, vmax, 401)
    val, err = integrate(lambda v: np.abs(E(np.sinh(v))) * np.cosh(v), bps,
                         tol=tol, rtol=1e-10, max_panels=200000)
    tail = 2 * d0 / (2 * math.pi * T)
    return float(val) + tail, float(err) + tail * 1e-3 + 10.0 * d0 / T ** 2


# ---------------------------------------------------------------- Plancherel

def l2_norm_sq(weight):
    """int_0^inf |b|^2 in closed form (pairwise products of pieces)."""
    from .symbols import _moment

    total = 0j
    for p in weight.pieces:
        for q in weight.pieces:
            lo, hi = max(p.start, q.start), min(p.end, q.end)
            if hi <= lo:
                continue
            L = hi - lo
            for pp in _restrict(Weight((p,)), lo, hi):
                for qq in _restrict(Weight((q,)), lo, hi):
                    total += (pp.coeff * np.conj(qq.coeff)
                              * _moment(pp.power + qq.power, pp.decay + np.conj(qq.decay), L))
    return float(total.real)


def plancherel_ratio(h, U=None, tol=1e-13):
    """||h-hat||_2 / (sqrt(2 pi) ||h||_2) with h-hat computed by quadrature.

    |h-hat|^2 is integrated adaptively on [-U, U]; beyond U the transform is
    replaced by its two-term expansion sum_k exp(-i u s_k) (J0_k / (iu) +
    J1_k / (iu)^2) in the derivative jumps J at the breakpoints s_k, whose
    square is integrated with oscillatory (QAWF) quadrature.
    """
    if not h.pieces:
        raise ValueError("zero weight")
    a_max = max(abs(complex(p.decay)) for p in h.pieces)
    U = U or 2000.0 * max(1.0, a_max)
    bps_h = h.breakpoints() + [p.end for p in h.pieces if math.isfinite(p.end)]
    spread = max(bps_h) - min(bps_h) if bps_h else 0.0
    period = 2 * math.pi / max(spread, 1.0)

    def f(u):
        return np.abs(h.fourier(u)) ** 2

    core_bps = np.concatenate([np.arange(-U, U, period / 2), [U]])
    core, _ = integrate(f, core_bps, tol=tol, rtol=1e-14, max_panels=2000000)
    jumps = _jumps(h, 1)
    pts = sorted(jumps)
    tail = 0.0
    for sigma in (1.0, -1.0):
        alpha = [jumps[s][0] / (1j * sigma) for s in pts]
        beta = [-jumps[s][1] for s in pts]
        for k, sk in enumerate(pts):
            for l, sl in enumerate(pts):
                coefs = {2: alpha[k] * np.conj(alpha[l]),
                         3: alpha[k] * np.conj(beta[l]) + beta[k] * np.conj(alpha[l]),
                         4: beta[k] * np.conj(beta[l])}
                omega = sigma * (sk - sl)
                for pw, c in coefs.items():
                    if c == 0:
                        continue
                    if omega == 0:
                        tail += (c / ((pw - 1) * U ** (pw - 1))).real
                        continue
                    ic = quad(lambda v: v ** -pw, U, np.inf, weight="cos", wvar=abs(omega))[0]
                    is_ = quad(lambda v: v ** -pw, U, np.inf, weight="sin", wvar=abs(omega))[0]
                    # exp(-i omega v) = cos(omega v) - i sin(omega v)
                    tail += (c * (ic - 1j * math.copysign(1.0, omega) * is_)).real
    hat_sq = float(core) + tail
    return math.sqrt(hat_sq / (2 * math.pi * l2_norm_sq(h)))
