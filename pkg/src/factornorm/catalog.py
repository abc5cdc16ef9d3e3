"""Default catalog of weights, symbols, tensor weights, generators and polynomials.

Every entry is addressed by a string id.  :class:`Catalog` starts from the
defaults below and accepts extra entries from a config mapping, so that
experiment configs can refer to built-in and user-defined objects alike.
"""

from __future__ import annotations

import numpy as np

from .hardy import HardyFunction
from .semigroup import SemigroupModel
from .symbols import (TensorWeight, Weight, constant, exponential, laplace_symbol,
                      power_imaginary, shifted, weight_from_config)

CATALOG_SEED = 20240611


def default_weights():
    W = Weight
    return {
        "exp1": W.exp(1.0, 1.0, name="exp1"),
        "exp2": W.exp(1.0, 2.0, name="exp2"),
        "texp": W.exp(1.0, 1.0, power=1, name="texp"),
        "box": W.indicator(0.0, 1.0, name="box"),
        "box_late": W.indicator(0.5, 1.5, 2.0, name="box_late"),
        "osc": W.exp(1.0, 1 + 2j, name="osc"),
        "signed": Weight(W.exp(1.0, 1.0).pieces + W.exp(-2.0, 2.0).pieces, "signed"),
        "late_exp": W.exp(0.5, 1.5, shift=0.25, name="late_exp"),
    }


def default_tensor_weights(weights):
    def tw(id, *pairs):
        return TensorWeight(tuple((weights[c], weights[d]) for c, d in pairs), id)

    return {
        "exp1xexp1": tw("exp1xexp1", ("exp1", "exp1")),
        "exp1xexp2": tw("exp1xexp2", ("exp1", "exp2")),
        "boxxexp1": tw("boxxexp1", ("box", "exp1")),
        "texpxbox_late": tw("texpxbox_late", ("texp", "box_late")),
        "oscxexp2": tw("oscxexp2", ("osc", "exp2")),
        "signedxexp1": tw("signedxexp1", ("signed", "exp1")),
        "mixed": tw("mixed", ("exp1", "exp2"), ("box", "late_exp")),
    }


def default_symbols(weights):
    syms = [
        constant(1.0, id="const"),
        exponential(1.0, id="exp[1]"),
        exponential(0.1, id="exp[0.1]"),
        exponential(0.5, 0.5 + 0.5j, id="exp[0.5,c]"),
        laplace_symbol(weights["exp1"], id="laplace[exp1]"),
        laplace_symbol(weights["texp"], id="laplace[texp]"),
        laplace_symbol(weights["box"], id="laplace[box]"),
        laplace_symbol(weights["osc"], id="laplace[osc]"),
        laplace_symbol(weights["signed"], id="laplace[signed]"),
        power_imaginary(1.0, id="power_imag[1]"),
    ]
    syms.append(shifted(syms[4], 0.5, id="laplace[exp1]+0.5"))
    return {s.id: s for s in syms}


def _jordan(a):
    return np.array([[a, 1.0], [0.0, a]])


def _random_skew(rng, d):
    X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5j * (X + X.conj().T)


def _random_diagonalizable(rng, d, max_cond=100.0):
    """V diag(lam) V^{-1} with Re(lam) > 0 and cond(V) <= max_cond."""
    lam = rng.uniform(0.2, 2.0, d) + 1j * rng.uniform(-2.0, 2.0, d)
    while True:
        V = np.eye(d) + 0.4 * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        if np.linalg.cond(V) <= max_cond:
            return V @ np.diag(lam) @ np.linalg.inv(V)


def default_models(seed=CATALOG_SEED):
    rng = np.random.default_rng(seed)
    rot = np.array([[0.0, 1.0], [-1.0, 0.0]])
    gens = {
        "id1": np.eye(2),
        "id0.5": 0.5 * np.eye(3),
        "jordan1": _jordan(1.0),
        "jordan0.5": _jordan(0.5),
        "jordan0.25": _jordan(0.25),
        "jordan0.1": _jordan(0.1),
        "rotation": rot,
        "skew3": _random_skew(rng, 3),
        "diag4": _random_diagonalizable(rng, 4),
        "jordan0.25+rotation": np.block([[_jordan(0.25), np.zeros((2, 2))],
                                         [np.zeros((2, 2)), rot]]),
    }
    return {k: SemigroupModel(v, k) for k, v in gens.items()}


def default_hardy():
    roots = {
        "const": [],
        "outer1": [-2.0],
        "inner1": [0.3],
        "z2": [0.0, 0.0],
        "mixed3": [0.5, -2.0, 0.4j],
        "mixed4": [0.8 + 0.1j, 1.5j, -0.2, 1.25],
    }
    out = {}
    for k, r in roots.items():
        c = np.poly(r)[::-1] if r else np.array([1.0])
        out[k] = HardyFunction(c / np.max(np.abs(c)))
    return out


# (model, tensor weight) pairs verified by bound-verify by default
DEFAULT_BOUND_PAIRS = [
    (m, p)
    for m in ["id1", "id0.5", "jordan1", "jordan0.5", "jordan0.25", "jordan0.1",
              "rotation", "skew3", "diag4", "jordan0.25+rotation"]
    for p in ["exp1xexp1", "boxxexp1", "oscxexp2"]
]


def _generator_from_config(spec):
    A = np.asarray(spec, dtype=float)
    if A.ndim == 3 and A.shape[-1] == 2:
        return A[..., 0] + 1j * A[..., 1]
    return A


class Catalog:
    """Lookup tables by id, defaults first, then entries from a config mapping.

    Config sections: ``weights`` (id -> list of terms), ``tensor_weights``
    (id -> list of [c, d] weight ids), ``symbols`` (id -> {kind, params}),
    ``models`` (id -> generator rows, complex entries as [re, im]) and
    ``hardy`` (id -> coefficient list, complex entries as [re, im]).
    """

    def __init__(self, extra=None, seed=CATALOG_SEED):
        extra = extra or {}
        self.weights = default_weights()
        for k, v in extra.get("weights", {}).items():
            self.weights[k] = weight_from_config(v, k)
        self.tensor_weights = default_tensor_weights(self.weights)
        for k, v in extra.get("tensor_weights", {}).items():
            pairs = tuple((self.weight(c), self.weight(d)) for c, d in v)
            self.tensor_weights[k] = TensorWeight(pairs, k)
        self.symbols = default_symbols(self.weights)
        for k, v in extra.get("symbols", {}).items():
            self.symbols[k] = self._symbol_from_config(k, v)
        self.models = default_models(seed)
        for k, v in extra.get("models", {}).items():
            self.models[k] = SemigroupModel(_generator_from_config(v), k)
        self.hardy = default_hardy()
        for k, v in extra.get("hardy", {}).items():
            c = np.asarray(v, dtype=float)
            self.hardy[k] = HardyFunction(c[:, 0] + 1j * c[:, 1] if c.ndim == 2 else c)

    def _symbol_from_config(self, id, spec):
        kind = spec.get("kind")
        p = spec.get("params", {})
        if kind == "laplace":
            return laplace_symbol(self.weight(p["weight"]), id=id)
        if kind == "power_imaginary":
            return power_imaginary(float(p.get("r", 1.0)), id=id)
        if kind == "exponential":
            return exponential(float(p.get("rate", 1.0)),
                               complex(p.get("coeff_re", 1.0), p.get("coeff_im", 0.0)), id=id)
        if kind == "constant":
            return constant(float(p.get("value", 1.0)), id=id)
        if kind == "shifted":
            return shifted(self.symbol(p["base"]), float(p["eps"]), id=id)
        raise ValueError(f"symbol {id}: unknown kind {kind!r}")

    @staticmethod
    def _get(table, what, id):
        try:
            return table[id]
        except KeyError:
            raise KeyError(f"unknown {what} id {id!r}") from None

    def weight(self, id):
        return self._get(self.weights, "weight", id)

    def tensor_weight(self, id):
        return self._get(self.tensor_weights, "tensor weight", id)

    def symbol(self, id):
        return self._get(self.symbols, "symbol", id)

    def model(self, id):
        return self._get(self.models, "model", id)

    def hardy_function(self, id):
        return self._get(self.hardy, "hardy polynomial", id)
