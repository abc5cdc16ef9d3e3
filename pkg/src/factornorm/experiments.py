"""Row definitions for the configured experiments.

Each builder returns a :class:`Plan`: a fixed column list, one task per row
and an optional finalizer that sees all rows in order (used for properties
that compare consecutive rows).  A task returns the row's computed columns,
including a boolean ``ok``; the runner fills in identifiers and the status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .catalog import DEFAULT_BOUND_PAIRS
from .gamma2 import extract_witness, gamma2_norm
from .hankel import grid_from_spec, make_grid, sample_hankel, sample_semigroup_kernel
from .hardy import (FejerKernel, bump_l1_norm, conformal_transfer, l1_approx_error,
                    plancherel_ratio, riesz_factorize_circle)
from .semigroup import growth_bound, hille_phillips, shift_consistency, verify_calculus_bound
from .symbols import convolve_weights, laplace_transform, poisson_tilde


@dataclass
class Task:
    ident: dict
    run: Callable[[], dict]


@dataclass
class Plan:
    columns: list
    tasks: list
    finalize: Callable | None = None
    details: bool = False
    extra_columns: dict = field(default_factory=dict)


def _cert_cols(cert):
    return {"gamma2_upper": cert.upper, "gamma2_lower": cert.lower, "gap": cert.gap,
            "rank": cert.rank, "iterations": cert.iterations, "sdp_status": cert.status}


# ------------------------------------------------------------ gamma2-table

def gamma2_table(cfg, cat):
    p = cfg.params
    ids = p.get("symbols") or [s for s, sym in cat.symbols.items() if sym.witness is not None]
    syms = [cat.symbol(s) for s in ids]
    sizes = [int(n) for n in p.get("sizes", [16, 32, 64])]
    g = p.get("grid", {})
    kind, lo, hi = g.get("kind", "uniform"), float(g.get("lo", 0.05)), float(g.get("hi", 10.0))
    tol, btol = cfg.tol("sdp"), cfg.tol("bound")

    def task(sym, n):
        def run():
            grid = make_grid(kind, n, lo, hi)
            M = sample_hankel(sym, grid, grid).entries
            cert = gamma2_norm(M, tol=tol)
            bound = sym.witness.nu2_bound if sym.witness is not None else math.nan
            ok = bool(math.isnan(bound) or cert.upper <= bound + btol)
            return {**_cert_cols(cert), "nu2_bound": bound, "ok": ok,
                    "_detail": {"symbol": sym.id, "n": n, **cert.to_dict()}}
        return Task({"symbol": sym.id, "n": n, "grid": kind, "lo": lo, "hi": hi}, run)

    cols = ["symbol", "n", "grid", "lo", "hi", "gamma2_upper", "gamma2_lower", "gap", "rank",
            "iterations", "sdp_status", "nu2_bound", "sdp_tol", "bound_tol"]
    tasks = [task(s, n) for s in syms for n in sizes]
    return Plan(cols, tasks, details=True,
                extra_columns={"sdp_tol": tol, "bound_tol": btol})


# ------------------------------------------------------------ symbol-growth

def symbol_growth(cfg, cat):
    p = cfg.params
    r = float(p.get("r", 1.0))
    ks = [int(k) for k in p.get("ks", [1, 2, 3, 4, 5])]
    ppd = int(p.get("points_per_decade", 8))
    sym = cat.symbol(p["symbol"]) if "symbol" in p else None
    if sym is None:
        from .symbols import power_imaginary
        sym = power_imaginary(r)
    tol = cfg.tol("sdp")

    def task(k):
        def run():
            n = 2 * ppd * k + 1
            grid = make_grid("geometric", n, 10.0 ** -k, 10.0 ** k)
            cert = gamma2_norm(sample_hankel(sym, grid, grid).entries, tol=tol)
            return {"n": n, **_cert_cols(cert), "ok": True}
        return Task({"k": k, "symbol": sym.id, "lo": 10.0 ** -k, "hi": 10.0 ** k}, run)

    def finalize(rows):
        # grids are nested, so gamma_2 can only grow with k
        prev = None
        for row in rows:
            if prev is None or "gamma2_upper" not in row or "gamma2_upper" not in prev:
                row["nondecreasing"] = True if prev is None else ""
            else:
                row["nondecreasing"] = bool(row["gamma2_upper"] >= prev["gamma2_lower"] - 2 * tol)
                row["ok"] = row["ok"] and row["nondecreasing"]
            prev = row

    cols = ["k", "symbol", "n", "lo", "hi", "gamma2_upper", "gamma2_lower", "gap", "rank",
            "iterations", "sdp_status", "nondecreasing", "sdp_tol"]
    return Plan(cols, [task(k) for k in ks], finalize, extra_columns={"sdp_tol": tol})


# ------------------------------------------------------------ bound-verify

DEFAULT_BOUND_GRID = {"kind": "gauss", "breakpoints": [0, 0.5, 1, 1.5, 2, 4, 8, 16, 32],
                      "per_panel": 8}


def bound_verify(cfg, cat):
    p = cfg.params
    pairs = [tuple(x) for x in p.get("pairs", DEFAULT_BOUND_PAIRS)]
    for m, w in pairs:
        cat.model(m), cat.tensor_weight(w)
    grid = grid_from_spec(p.get("grid", DEFAULT_BOUND_GRID))
    levels = int(p.get("levels", 2))
    tb, th, ts = cfg.tol("bound"), cfg.tol("hille_phillips"), cfg.tol("sdp")

    def task(m, w):
        def run():
            rep = verify_calculus_bound(cat.model(m), cat.tensor_weight(w), grid, grid,
                                        tol=tb, levels=levels, hp_tol=th, sdp_tol=ts)
            return {"levels": levels, "n_final": rep.levels[-1]["nS"], "lhs": rep.lhs,
                    "rhs": rep.rhs, "cA": rep.cA, "cA_sampled": rep.cASampled,
                    "slack": rep.slack, "pass": rep.passed, "ok": rep.passed,
                    "_detail": rep.to_dict()}
        return Task({"model": m, "weight": w}, run)

    cols = ["model", "weight", "levels", "n_final", "lhs", "rhs", "cA", "cA_sampled", "slack",
            "pass", "bound_tol", "hp_tol", "sdp_tol"]
    return Plan(cols, [task(m, w) for m, w in pairs], details=True,
                extra_columns={"bound_tol": tb, "hp_tol": th, "sdp_tol": ts})


# ------------------------------------------------------------ kernel-factor

def _unit(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def kernel_factor(cfg, cat):
    p = cfg.params
    ids = p.get("models") or list(cat.models)
    models = [cat.model(m) for m in ids]
    count = int(p.get("pairs_per_model", 50))
    g = p.get("grid", {})
    grid = make_grid(g.get("kind", "uniform"), int(g.get("n", 32)),
                     float(g.get("lo", 0.05)), float(g.get("hi", 8.0)))
    tol, btol = cfg.tol("sdp"), cfg.tol("bound")
    rng = np.random.default_rng(cfg.seed)
    tasks = []
    for model in models:
        for j in range(count):
            x, y = _unit(rng, model.dim), _unit(rng, model.dim)

            def run(model=model, x=x, y=y):
                M = sample_semigroup_kernel(model, x, y, grid, grid).entries
                cert = gamma2_norm(M, tol=tol)
                bound = growth_bound(model) ** 2 * np.linalg.norm(x) * np.linalg.norm(y)
                return {**_cert_cols(cert), "bound": bound,
                        "ok": bool(cert.upper <= bound + btol)}
            tasks.append(Task({"model": model.id, "pair": j, "n": len(grid)}, run))
    cols = ["model", "pair", "n", "gamma2_upper", "gamma2_lower", "gap", "rank", "iterations",
            "sdp_status", "bound", "sdp_tol", "bound_tol"]
    return Plan(cols, tasks, extra_columns={"sdp_tol": tol, "bound_tol": btol})


# ------------------------------------------------------------ factor-demo

def factor_demo(cfg, cat):
    p = cfg.params
    sym_ids = p.get("symbols", ["exp[1]", "exp[0.5,c]", "const", "laplace[exp1]"])
    hardy_ids = p.get("hardy", list(cat.hardy))
    n = int(p.get("n", 32))
    g = p.get("grid", {})
    kind, lo, hi = g.get("kind", "uniform"), float(g.get("lo", 0.05)), float(g.get("hi", 10.0))
    tol, btol, rtol, ntol = cfg.tol("sdp"), cfg.tol("bound"), cfg.tol("riesz"), cfg.tol("norm")
    tasks = []
    for s in sym_ids:
        sym = cat.symbol(s)

        def run(sym=sym):
            grid = make_grid(kind, n, lo, hi)
            M = sample_hankel(sym, grid, grid).entries
            cert = gamma2_norm(M, tol=tol)
            wit = extract_witness(cert, M)
            err = float(np.max(np.abs(wit.reconstruct() - M)))
            ref = sym.witness.nu2_bound if sym.witness is not None else math.nan
            val = wit.supAlpha * wit.supBeta
            ok = bool(err <= 1e-6 * (1 + np.max(np.abs(M)))
                      and (math.isnan(ref) or val <= ref + btol))
            return {"value": val, "reference": ref, "residual": err, "dim": wit.dim, "ok": ok}
        tasks.append(Task({"item": sym.id, "method": "gamma2-witness", "size": n}, run))
    for h in hardy_ids:
        fn = cat.hardy_function(h)

        def run(fn=fn):
            fac = riesz_factorize_circle(fn)
            val = fac.normH1 * fac.normH2
            ok = bool(fac.residual <= rtol and abs(val - fac.normH) <= ntol)
            return {"value": val, "reference": fac.normH, "residual": fac.residual,
                    "dim": fn.degree, "ok": ok}
        tasks.append(Task({"item": h, "method": "riesz", "size": fn.degree}, run))
    cols = ["item", "method", "size", "value", "reference", "residual", "dim", "sdp_tol",
            "riesz_tol", "norm_tol"]
    return Plan(cols, tasks, extra_columns={"sdp_tol": tol, "riesz_tol": rtol, "norm_tol": ntol})


# ------------------------------------------------------------ fejer-demo

def _band_gap_exact(kernel):
    n = kernel.n
    inner = np.linspace(-1.0 / n, 1.0 / n, 257)
    outer = np.concatenate([np.linspace(2.0 * n, 8.0 * n, 257), -np.linspace(2.0 * n, 8.0 * n, 257)])
    mid = np.linspace(2.0 / n, n, 257) if n > 1 else np.zeros(0)
    return bool(np.all(kernel.hat(inner) == 0) and np.all(kernel.hat(outer) == 0)
                and np.all(kernel.hat(mid) == 1))


def fejer_demo(cfg, cat):
    p = cfg.params
    ns = [int(n) for n in p.get("ns", [2, 4, 8, 16])]
    h = cat.weight(p.get("weight", "texp"))
    ntol = cfg.tol("norm")
    bound = 2 * bump_l1_norm()

    def task(n):
        def run():
            ker = FejerKernel(n)
            l1 = ker.l1_norm()
            err, est = l1_approx_error(ker, h)
            gap = _band_gap_exact(ker)
            return {"phi_n_l1": l1, "bound": bound, "band_gap_exact": gap,
                    "approx_error": err, "approx_error_est": est,
                    "ok": bool(gap and l1 <= bound + ntol)}
        return Task({"n": n, "weight": h.name}, run)

    def finalize(rows):
        prev = None
        for row in rows:
            if prev is not None and "approx_error" in row and "approx_error" in prev:
                row["decreasing"] = bool(row["approx_error"] < prev["approx_error"])
                row["ok"] = row["ok"] and row["decreasing"]
            else:
                row["decreasing"] = True if prev is None else ""
            prev = row

    cols = ["n", "weight", "phi_n_l1", "bound", "band_gap_exact", "approx_error",
            "approx_error_est", "decreasing", "norm_tol"]
    return Plan(cols, [task(n) for n in ns], finalize, extra_columns={"norm_tol": ntol})


# ------------------------------------------------------------ consistency-suite

TEST_POINTS = np.array([0.1, 1.0, 3.0 + 2.0j, 0.5 - 4.0j, 10.0, 1e-3 + 1.0j])


def _laplace_mult(c, d):
    conv = convolve_weights(c, d)
    return float(np.max(np.abs(laplace_transform(conv, TEST_POINTS)
                               - laplace_transform(c, TEST_POINTS) * laplace_transform(d, TEST_POINTS))))


def _poisson(b, tol):
    pts = [1.0, 0.5 + 2.0j, 2.0 - 1.0j]
    return max(abs(poisson_tilde(b, z, tol=tol) - laplace_transform(b, z)) for z in pts)


def _homomorphism(model, c, d, tol):
    cd = hille_phillips(model, convolve_weights(c, d), tol=tol).operatorValue
    gc = hille_phillips(model, c, tol=tol).operatorValue
    gd = hille_phillips(model, d, tol=tol).operatorValue
    return float(np.linalg.norm(cd - gc @ gd, 2))


def _crude(model, b, tol):
    val = hille_phillips(model, b, tol=tol).operatorNorm
    return val - growth_bound(model) * b.l1_norm()


def _isometry(fn, p):
    return abs(fn.to_line(p).norm(p) - fn.norm(p))


def _product(fn):
    h1, h2 = riesz_factorize_circle(fn)
    t = np.tan(np.linspace(-1.5, 1.5, 301))
    lhs = conformal_transfer(h1, 2, t) * conformal_transfer(h2, 2, t)
    rhs = conformal_transfer(fn, 1, t)
    return float(np.max(np.abs(lhs - rhs)))


def consistency_suite(cfg, cat):
    p = cfg.params
    T = cfg.tolerances
    wids = p.get("weights", list(cat.weights))
    mids = p.get("models", list(cat.models))
    hids = p.get("hardy", list(cat.hardy))
    wpairs = [tuple(x) for x in p.get("weight_pairs",
                                      [["exp1", "exp2"], ["box", "exp1"], ["osc", "texp"],
                                       ["box_late", "signed"]])]
    eps = float(p.get("eps", 0.3))
    W = {w: cat.weight(w) for w in set(wids) | {x for pr in wpairs for x in pr}}
    M = {m: cat.model(m) for m in mids}
    H = {h: cat.hardy_function(h) for h in hids}
    hp = T["hille_phillips"]
    checks = []

    def add(check, item, tol, fn):
        checks.append(Task({"check": check, "item": item, "tol": tol},
                           lambda: (lambda v: {"value": v, "ok": bool(v <= tol)})(float(fn()))))

    for i, a in enumerate(wids):
        for b in wids[i:]:
            add("laplace-multiplicative", f"{a}*{b}", T["laplace"],
                lambda a=a, b=b: _laplace_mult(W[a], W[b]))
    for w in wids:
        add("poisson-laplace", w, T["poisson"], lambda w=w: _poisson(W[w], 0.5 * T["poisson"]))
    for m in mids:
        for c, d in wpairs:
            add("homomorphism", f"{m}:{c}*{d}", T["homomorphism"],
                lambda m=m, c=c, d=d: _homomorphism(M[m], W[c], W[d], hp))
        for w in wids:
            add("crude-bound", f"{m}:{w}", T["homomorphism"],
                lambda m=m, w=w: max(0.0, _crude(M[m], W[w], hp)))
            add("shift", f"{m}:{w}@{eps:g}", T["shift"],
                lambda m=m, w=w: shift_consistency(M[m], W[w], eps, hp))
    for w in wids:
        add("plancherel", w, T["plancherel"], lambda w=w: abs(plancherel_ratio(W[w]) - 1))
    for h in hids:
        add("riesz-roundtrip", h, T["riesz"], lambda h=h: riesz_factorize_circle(H[h]).residual)
        add("riesz-norm", h, T["norm"],
            lambda h=h: (lambda f: abs(f.normH1 * f.normH2 - f.normH))(riesz_factorize_circle(H[h])))
        for q in (1, 2):
            add(f"isometry-p{q}", h, T["isometry"], lambda h=h, q=q: _isometry(H[h], q))
        add("product-G2G2-G1", h, T["product"], lambda h=h: _product(H[h]))
    return Plan(["check", "item", "value", "tol"], checks)


BUILDERS = {
    "gamma2-table": gamma2_table,
    "symbol-growth": symbol_growth,
    "bound-verify": bound_verify,
    "kernel-factor": kernel_factor,
    "factor-demo": factor_demo,
    "fejer-demo": fejer_demo,
    "consistency-suite": consistency_suite,
}
