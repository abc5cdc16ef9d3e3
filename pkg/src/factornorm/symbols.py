"""Weights on the half-line, their Laplace transforms and multiplier symbols.

A :class:`Weight` is a finite sum of pieces

    coeff * (t - start)**power * exp(-decay * (t - start)),   start <= t < end,

where ``end`` may be infinite.  This family contains the exponential-polynomial
terms and indicator windows used throughout the package and is closed under
addition, damping by ``exp(-eps t)`` and convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import integrate

_INF = math.inf


@dataclass(frozen=True)
class Piece:
    coeff: complex
    decay: complex = 1.0
    power: int = 0
    start: float = 0.0
    end: float = _INF

    def __post_init__(self):
        if self.power < 0 or int(self.power) != self.power:
            raise ValueError(f"power must be a non-negative integer, got {self.power}")
        if not (self.start >= 0 and math.isfinite(self.start)):
            raise ValueError(f"start must be finite and >= 0, got {self.start}")
        if not self.end > self.start:
            raise ValueError("piece must have end > start")
        if complex(self.decay).real < 0:
            raise ValueError("decay must have non-negative real part")
        if math.isinf(self.end) and complex(self.decay).real <= 0:
            raise ValueError("a semi-infinite piece needs Re(decay) > 0 to be integrable")

    @property
    def length(self):
        return self.end - self.start

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        x = t - self.start
        inside = (x >= 0) & (t < self.end)
        xs = np.where(inside, x, 0.0)
        vals = self.coeff * xs ** self.power * np.exp(-self.decay * xs)
        return np.where(inside, vals, 0.0)


def _moment(k, w, L):
    """int_0^L x^k exp(-w x) dx, vectorised over complex ``w``."""
    w = np.asarray(w, dtype=complex)
    fk = math.factorial(k)
    if math.isinf(L):
        return fk / w ** (k + 1)
    x = w * L
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) <= k + 2.0
    if np.any(small):
        xs = x[small]
        term = np.ones_like(xs)
        acc = term / (k + 1)
        for n in range(1, 400):
            term = term * (-xs) / n
            contrib = term / (n + k + 1)
            acc = acc + contrib
            if np.all(np.abs(contrib) <= 1e-18 * np.maximum(np.abs(acc), 1e-300)):
                break
        out[small] = L ** (k + 1) * acc
    big = ~small
    if np.any(big):
        xb = x[big]
        partial = np.zeros_like(xb)
        term = np.ones_like(xb)
        for j in range(k + 1):
            if j:
                term = term * xb / j
            partial = partial + term
        out[big] = fk / w[big] ** (k + 1) * (1.0 - np.exp(-xb) * partial)
    return out


def _real_moment(k, alpha, lo, hi):
    """int_lo^hi x^k exp(-alpha x) dx for real alpha >= 0, 0 <= lo <= hi."""
    if hi <= lo:
        return 0.0
    top = _moment(k, alpha, hi)
    bottom = _moment(k, alpha, lo) if lo > 0 else 0.0
    return float(np.real(top - bottom))


@dataclass(frozen=True)
class Weight:
    """Sum of :class:`Piece` terms; callable on arrays of t >= 0."""

    pieces: tuple = ()
    name: str = ""

    @staticmethod
    def exp(coeff=1.0, decay=1.0, power=0, shift=0.0, name=""):
        return Weight((Piece(complex(coeff), complex(decay), int(power), float(shift)),), name)

    @staticmethod
    def indicator(a, b, coeff=1.0, name=""):
        return Weight((Piece(complex(coeff), 0.0, 0, float(a), float(b)),), name)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for p in self.pieces:
            out = out + p(t)
        return out

    def __add__(self, other):
        return Weight(self.pieces + other.pieces)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, lam):
        return Weight(tuple(Piece(p.coeff * lam, p.decay, p.power, p.start, p.end)
                            for p in self.pieces), self.name)

    def damp(self, eps):
        """Multiply by exp(-eps t)."""
        if eps < 0:
            raise ValueError("damping needs eps >= 0")
        return Weight(tuple(Piece(p.coeff * math.exp(-eps * p.start), p.decay + eps,
                                  p.power, p.start, p.end) for p in self.pieces),
                      self.name)

    def breakpoints(self):
        pts = {0.0}
        for p in self.pieces:
            pts.add(p.start)
            if math.isfinite(p.end):
                pts.add(p.end)
        return sorted(pts)

    @property
    def is_real(self):
        return all(complex(p.coeff).imag == 0 and complex(p.decay).imag == 0
                   for p in self.pieces)

    @property
    def is_sign_definite(self):
        if not self.is_real:
            return False
        signs = {np.sign(complex(p.coeff).real) for p in self.pieces if p.coeff != 0}
        return len(signs) <= 1

    @property
    def min_decay(self):
        """Smallest Re(decay) over the semi-infinite pieces (inf if none)."""
        ds = [complex(p.decay).real for p in self.pieces if math.isinf(p.end)]
        return min(ds) if ds else _INF

    def laplace(self, z):
        """L_b(z) = int_0^inf exp(-z t) b(t) dt, vectorised over z."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for p in self.pieces:
            out = out + p.coeff * np.exp(-z * p.start) * _moment(p.power, p.decay + z, p.length)
        return out

    def fourier(self, u):
        """b-hat(u) = int exp(-i u t) b(t) dt."""
        return self.laplace(1j * np.asarray(u, dtype=float))

    def abs_tail(self, T):
        """Upper bound for int_T^inf |b(t)| dt from the triangle inequality."""
        total = 0.0
        for p in self.pieces:
            lo = max(T, p.start) - p.start
            hi = p.end - p.start
            total += abs(p.coeff) * _real_moment(p.power, complex(p.decay).real, lo, hi)
        return total

    def abs_integral_bound(self):
        return self.abs_tail(0.0)

    def total_variation(self):
        """Upper bound on the total variation of b extended by 0 to t < 0."""
        tv = 0.0
        for p in self.pieces:
            a = complex(p.decay)
            alpha = a.real
            c = abs(p.coeff)
            L = p.length
            # jumps at both ends of the window
            if p.power == 0:
                tv += c
            if math.isfinite(L):
                tv += c * L ** p.power * math.exp(-alpha * L)
            # int |d/dx x^k e^{-a x}| <= k int x^{k-1} e^{-alpha x} + |a| int x^k e^{-alpha x}
            if p.power > 0:
                tv += c * p.power * _real_moment(p.power - 1, alpha, 0.0, L)
            tv += c * abs(a) * _real_moment(p.power, alpha, 0.0, L)
        return tv

    def l1_norm(self, tol=1e-13):
        """||b||_1.

        Closed form when the weight is real and sign-definite, adaptive
        quadrature of |b| otherwise.
        """
        if not self.pieces:
            return 0.0
        if self.is_sign_definite:
            return float(abs(self.laplace(0.0).real))
        bound = self.abs_integral_bound()
        finite_ends = [p.end for p in self.pieces if math.isfinite(p.end)]
        T = max(self.breakpoints() + finite_ends)
        alpha = self.min_decay
        if math.isfinite(alpha):
            # extend until the triangle-inequality tail is negligible
            step = 1.0 / alpha
            while self.abs_tail(T) > 0.1 * tol * max(bound, 1e-300):
                T += step
        bps = sorted(set(self.breakpoints() + [T]))
        val, err = integrate(lambda t: np.abs(self(t)), bps, tol=tol * max(bound, 1e-300),
                             rtol=tol, max_panels=20000)
        return float(val) + self.abs_tail(T)

    def to_config(self):
        out = []
        for p in self.pieces:
            c, a = complex(p.coeff), complex(p.decay)
            term = {"coeff_re": c.real, "coeff_im": c.imag, "decay_re": a.real,
                    "decay_im": a.imag, "power": p.power, "shift": p.start}
            if math.isfinite(p.end):
                term["end"] = p.end
            out.append(term)
        return out


def laplace_transform(weight, z):
    """Closed-form L_b(z) for Re z >= 0, scalar or array ``z``.

    Re z = 0 is allowed because every semi-infinite piece has a decay with
    positive real part.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < 0):
        raise ValueError("Laplace transform needs Re z >= 0")
    out = weight.laplace(z)
    return complex(out) if out.ndim == 0 else out


def _as_complex(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


def weight_from_config(spec, name=""):
    """Build a Weight from a list of term tables.

    A term with ``a`` and ``b`` (optionally ``coeff``) is an indicator of
    [a, b].  Otherwise the keys are ``coeff_re``, ``coeff_im``, ``decay_re``,
    ``decay_im``, ``power``, ``shift`` and an optional finite ``end``;
    ``coeff`` and ``decay`` may also be given directly as numbers or
    ``[re, im]`` pairs.
    """
    pieces = []
    if isinstance(spec, dict):
        spec = [spec]
    for term in spec:
        if "a" in term and "b" in term:
            pieces.append(Piece(_as_complex(term.get("coeff", 1.0)), 0.0, 0,
                                float(term["a"]), float(term["b"])))
            continue
        end = term.get("end")
        coeff = (_as_complex(term["coeff"]) if "coeff" in term
                 else complex(term.get("coeff_re", 1.0), term.get("coeff_im", 0.0)))
        decay = (_as_complex(term["decay"]) if "decay" in term
                 else complex(term.get("decay_re", 1.0), term.get("decay_im", 0.0)))
        pieces.append(Piece(coeff, decay,
                            int(term.get("power", 0)),
                            float(term.get("shift", term.get("start", 0.0))),
                            _INF if end is None else float(end)))
    return Weight(tuple(pieces), name)


# ---------------------------------------------------------------- convolution

def _split_atoms(p):
    """Write a piece as a signed sum of semi-infinite atoms (c, a, k, s)."""
    atoms = [(complex(p.coeff), complex(p.decay), p.power, p.start)]
    if math.isfinite(p.end):
        L = p.length
        scale = complex(p.coeff) * np.exp(-complex(p.decay) * L)
        for j in range(p.power + 1):
            c = -scale * math.comb(p.power, j) * L ** (p.power - j)
            atoms.append((complex(c), complex(p.decay), j, p.end))
    return atoms


def _same_decay(a, b):
    return abs(a - b) <= 1e-12 * (1.0 + abs(a))


def _convolve_atoms(x, y):
    c1, a1, k1, s1 = x
    c2, a2, k2, s2 = y
    s = s1 + s2
    base = c1 * c2 * math.factorial(k1) * math.factorial(k2)
    if _same_decay(a1, a2):
        return [(base / math.factorial(k1 + k2 + 1), a1, k1 + k2 + 1, s)]
    out = []
    m, n = k1 + 1, k2 + 1
    for (aa, bb, mm, nn) in ((a1, a2, m, n), (a2, a1, n, m)):
        delta = bb - aa
        for j in range(1, mm + 1):
            A = (-1) ** (mm - j) * math.comb(nn + mm - j - 1, mm - j) / delta ** (nn + mm - j)
            out.append((base * A / math.factorial(j - 1), aa, j - 1, s))
    return out


def _atoms_to_weight(atoms, name=""):
    starts = sorted({a[3] for a in atoms})
    pieces = []
    for i, beta in enumerate(starts):
        end = starts[i + 1] if i + 1 < len(starts) else _INF
        coeffs = {}
        mags = {}
        for (c, a, k, s) in atoms:
            if s > beta:
                continue
            h = beta - s
            shift = c * np.exp(-a * h)
            for j in range(k + 1):
                term = shift * math.comb(k, j) * h ** (k - j)
                key = (a, j)
                coeffs[key] = coeffs.get(key, 0.0) + term
                mags[key] = mags.get(key, 0.0) + abs(term)
        for (a, j), c in sorted(coeffs.items(), key=lambda kv: (kv[0][0].real, kv[0][0].imag, kv[0][1])):
            if abs(c) <= 1e-13 * mags[(a, j)] or c == 0:
                continue
            if math.isinf(end) and a.real <= 0:
                if abs(c) <= 1e-9 * mags[(a, j)]:
                    continue
                raise ArithmeticError("non-integrable remainder in convolution")
            pieces.append(Piece(complex(c), complex(a), j, float(beta), end))
    return Weight(tuple(pieces), name)


def convolve_weights(c, d):
    """Closed-form convolution (c * d)(t) = int_0^t c(s) d(t - s) ds."""
    atoms = []
    for p in c.pieces:
        for q in d.pieces:
            for x in _split_atoms(p):
                for y in _split_atoms(q):
                    atoms.extend(_convolve_atoms(x, y))
    name = f"({c.name}*{d.name})" if c.name and d.name else ""
    if not atoms:
        return Weight((), name)
    return _atoms_to_weight(atoms, name)


@dataclass(frozen=True)
class TensorWeight:
    """Psi = sum_j c_j (x) d_j with the contraction b = sum_j c_j * d_j."""

    pairs: tuple
    id: str = ""

    def contracted(self):
        out = Weight(())
        for c, d in self.pairs:
            out = out + convolve_weights(c, d)
        return Weight(out.pieces, self.id)

    def scaled(self, lam):
        return TensorWeight(tuple((c.scaled(lam), d) for c, d in self.pairs), self.id)

    def evaluate(self, s, u):
        """Matrix sum_j c_j(s_i) d_j(u_k)."""
        s = np.asarray(s, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.zeros((s.size, u.size), dtype=complex)
        for c, d in self.pairs:
            out += np.outer(c(s), d(u))
        return out

    def projective_bound(self):
        """sum_j ||c_j||_1 ||d_j||_1, an upper bound for the projective norm."""
        return sum(c.l1_norm() * d.l1_norm() for c, d in self.pairs)


# ---------------------------------------------------------------- symbols

@dataclass(frozen=True)
class FactorWitnessSpec:
    """Closed-form upper bound for the factorization norm of a symbol.

    When ``alpha``/``beta`` are given, m(s + t) = <alpha(t), beta(s)> with
    both maps returning arrays of shape (len(points), dim), which gives an
    explicit sampled factorization.
    """

    description: str
    nu2_bound: float
    alpha: Callable | None = field(default=None, compare=False, repr=False)
    beta: Callable | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Symbol:
    id: str
    kind: str
    evaluator: Callable = field(compare=False, repr=False)
    witness: FactorWitnessSpec | None = None
    weight: Weight | None = field(default=None, compare=False, repr=False)
    params: tuple = ()

    def __call__(self, u):
        return eval_symbol(self, u)


def eval_symbol(symbol, u):
    """m(u) for u > 0 (scalar or array)."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0)):
        raise ValueError(f"symbol {symbol.id} is defined for u > 0 only")
    return np.asarray(symbol.evaluator(u), dtype=complex)


def laplace_symbol(weight, id=None):
    """m = L_b restricted to [0, inf)."""
    bound = weight.l1_norm()
    wit = FactorWitnessSpec("m(s+t) = <e^{-t x}, e^{-s x}> in L^2(|b|)", bound)
    return Symbol(id or f"laplace[{weight.name or 'b'}]", "laplace",
                  lambda u: weight.laplace(u), wit, weight)


def power_imaginary(r=1.0, id=None):
    """u -> u^{i r} = exp(i r log u); no finite factorization bound exists."""
    r = float(r)
    return Symbol(id or f"power_imag[{r:g}]", "power_imaginary",
                  lambda u: np.exp(1j * r * np.log(u)), None, None, (("r", r),))


def exponential(rate=1.0, coeff=1.0, id=None):
    """u -> coeff * exp(-rate u) with the rank-one witness exp(-rate s) exp(-rate t)."""
    rate = float(rate)
    coeff = complex(coeff)
    root = np.sqrt(coeff)
    wit = FactorWitnessSpec(
        "rank one", abs(coeff),
        alpha=lambda t: (root * np.exp(-rate * np.asarray(t, float)))[:, None],
        beta=lambda s: (np.conj(root) * np.exp(-rate * np.asarray(s, float)))[:, None])
    return Symbol(id or f"exp[{rate:g}]", "custom",
                  lambda u: coeff * np.exp(-rate * u), wit,
                  None, (("rate", rate), ("coeff", coeff)))


def constant(value=1.0, id=None):
    value = complex(value)
    root = np.sqrt(value)
    wit = FactorWitnessSpec(
        "rank one", abs(value),
        alpha=lambda t: np.full((np.size(t), 1), root),
        beta=lambda s: np.full((np.size(s), 1), np.conj(root)))
    return Symbol(id or f"const[{value.real:g}]", "custom",
                  lambda u: np.full(u.shape, value), wit, None, (("value", value),))


def shifted(base, eps, id=None):
    """u -> m(u + eps)."""
    eps = float(eps)
    if eps < 0:
        raise ValueError("shift must be non-negative")
    wit = None
    if base.kind == "laplace" and base.weight is not None:
        damped = base.weight.damp(eps)
        wit = FactorWitnessSpec("laplace of the damped weight", damped.l1_norm())
    elif base.witness is not None:
        bw = base.witness
        if bw.alpha is not None:
            # m(s + t + eps) = <alpha(t + eps/2), beta(s + eps/2)>
            wit = FactorWitnessSpec(
                bw.description + ", shifted", bw.nu2_bound,
                alpha=lambda t: bw.alpha(np.asarray(t, float) + eps / 2),
                beta=lambda s: bw.beta(np.asarray(s, float) + eps / 2))
        else:
            wit = bw
    return Symbol(id or f"{base.id}+{eps:g}", "shifted",
                  lambda u: base.evaluator(u + eps), wit, base.weight,
                  (("base", base.id), ("eps", eps)))


def custom(id, func, witness=None):
    return Symbol(id, "custom", func, witness)


# ---------------------------------------------------------------- Poisson extension

def poisson_tilde(weight, z, tol=1e-6):
    """Poisson extension of F(t) = L_b(-i t) evaluated at Re z > 0.

    Computes (1/pi) int F(x + y tan(theta)) d(theta) over (-pi/2, pi/2) with
    x = -Im z, y = Re z.  The window is cut at distance delta from the ends
    and the cut-off part is bounded via |F(t)| <= TV(b) / |t|.  Raises
    ``ArithmeticError`` if error estimate plus tail bound exceeds ``tol``.
    """
    if isinstance(weight, Symbol):
        if weight.weight is None or weight.kind != "laplace":
            raise TypeError("poisson_tilde needs a Laplace-transform symbol")
        weight = weight.weight
    z = complex(z)
    x, y = -z.imag, z.real
    if y <= 0:
        raise ValueError("z must lie in the open right half-plane")
    tv = max(weight.total_variation(), 1e-300)

    def tail(delta):
        edge = y / math.tan(delta) - abs(x)
        if edge <= 0:
            return _INF
        return (2.0 / math.pi) * delta * tv / edge

    delta = min(0.5, math.sqrt(math.pi * y * tol / (8.0 * tv)))
    while tail(delta) > 0.25 * tol:
        delta *= 0.5

    def f(theta):
        return weight.laplace(-1j * (x + y * np.tan(theta))) / math.pi

    lim = math.pi / 2 - delta
    bps = np.concatenate([[-lim], np.arctan((np.linspace(-50, 50, 41) - x) / y), [lim]])
    bps = bps[(bps >= -lim) & (bps <= lim)]
    val, err = integrate(f, bps, tol=0.25 * tol, rtol=0.0, max_panels=200000)
    total_err = err + tail(delta)
    if total_err > tol:
        raise ArithmeticError(f"Poisson extension error {total_err:.3g} exceeds tol {tol:.3g}")
    return complex(val)
