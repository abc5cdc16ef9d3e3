"""Sampling grids and kernel matrices on the positive half-line."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .quadrature import gauss_legendre
from .symbols import eval_symbol


@dataclass(frozen=True)
class SampleGrid:
    points: np.ndarray
    weights: np.ndarray | None = None
    kind: str = "custom"
    spec: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("grid needs a 1-D array of points")
        if np.any(pts <= 0) or np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly positive and increasing")
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != pts.shape or np.any(w <= 0):
                raise ValueError("weights must be positive and match the points")
            object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.points.size

    def subgrid(self, idx):
        idx = np.asarray(idx)
        return SampleGrid(self.points[idx], None if self.weights is None else self.weights[idx],
                          "custom")

    def describe(self):
        out = {"kind": self.kind, "n": int(self.points.size),
               "lo": float(self.points[0]), "hi": float(self.points[-1])}
        if self.spec is not None:
            out["spec"] = self.spec
        return out


def make_grid(kind, n, lo, hi):
    """Uniform or geometric grid with trapezoid weights (linear or log)."""
    if n < 2:
        raise ValueError("a grid needs n >= 2")
    if not (lo > 0 and hi > lo):
        raise ValueError("need 0 < lo < hi")
    if kind == "uniform":
        pts = np.linspace(lo, hi, n)
        h = (hi - lo) / (n - 1)
        w = np.full(n, h)
    elif kind == "geometric":
        pts = np.geomspace(lo, hi, n)
        pts[0], pts[-1] = lo, hi
        h = np.log(hi / lo) / (n - 1)
        w = pts * h
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    w[0] *= 0.5
    w[-1] *= 0.5
    return SampleGrid(pts, w, kind, {"kind": kind, "n": n, "lo": lo, "hi": hi})


def gauss_grid(breakpoints, per_panel=16, panels=None):
    """Composite Gauss-Legendre grid over consecutive breakpoints.

    ``panels`` optionally subdivides every interval into that many equal
    panels.  Nodes are interior, hence strictly positive.
    """
    bps = np.unique(np.asarray(breakpoints, dtype=float))
    if bps.size < 2 or bps[0] < 0:
        raise ValueError("need at least two non-negative breakpoints")
    pts, wts = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        sub = np.linspace(a, b, (panels or 1) + 1)
        for c, d in zip(sub[:-1], sub[1:]):
            x, w = gauss_legendre(per_panel, c, d)
            pts.append(x)
            wts.append(w)
    return SampleGrid(np.concatenate(pts), np.concatenate(wts), "custom",
                      {"kind": "gauss", "breakpoints": [float(v) for v in bps],
                       "per_panel": per_panel, "panels": panels or 1})


def grid_from_spec(spec):
    if spec.get("kind") == "gauss":
        return gauss_grid(spec["breakpoints"], spec.get("per_panel", 16), spec.get("panels", 1))
    return make_grid(spec["kind"], int(spec["n"]), float(spec["lo"]), float(spec["hi"]))


def refine_grid(grid):
    """Next refinement level: halve the spacing (or double the Gauss panels)."""
    spec = grid.spec
    if spec is None:
        raise ValueError("grid carries no construction spec to refine")
    spec = dict(spec)
    if spec["kind"] == "gauss":
        spec["panels"] = 2 * spec.get("panels", 1)
    else:
        spec["n"] = 2 * spec["n"] - 1
    return grid_from_spec(spec)


@dataclass
class KernelMatrix:
    entries: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("kernel matrix has non-finite entries")

    @property
    def shape(self):
        return self.entries.shape

    def to_csv(self):
        """Rows of interleaved real/imaginary parts."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.entries:
            w.writerow([f"{v:.17g}" for z in row for v in (z.real, z.imag)])
        return buf.getvalue()

    def provenance_json(self):
        return json.dumps(self.provenance, sort_keys=True, indent=2)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_csv())
        with open(str(path) + ".json", "w") as fh:
            fh.write(self.provenance_json())

    @staticmethod
    def from_csv(text, provenance=None):
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        vals = np.array([[float(v) for v in r] for r in rows])
        return KernelMatrix(vals[:, 0::2] + 1j * vals[:, 1::2], provenance or {})

    @staticmethod
    def load(path):
        with open(path) as fh:
            text = fh.read()
        prov = {}
        try:
            with open(str(path) + ".json") as fh:
                prov = json.load(fh)
        except FileNotFoundError:
            pass
        return KernelMatrix.from_csv(text, prov)


def sample_hankel(m, gS, gT):
    """entries[i, j] = m(s_i + t_j)."""
    arg = np.add.outer(gS.points, gT.points)
    vals = eval_symbol(m, arg.ravel()).reshape(arg.shape)
    return KernelMatrix(vals, {"type": "hankel", "symbol": m.id,
                               "gridS": gS.describe(), "gridT": gT.describe()})


def sample_semigroup_kernel(model, x, y, gS, gU):
    """entries[i, j] = <e^{-u_j A} x, (e^{-s_i A})^* y> = y^* e^{-(s_i + u_j) A} x."""
    from .semigroup import semigroup_at

    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    d = model.dim
    if x.size != d or y.size != d:
        raise ValueError(f"vectors must have dimension {d}")
    left = np.einsum("k,ikl->il", y.conj(), semigroup_at(model, gS.points))
    right = np.einsum("jkl,l->jk", semigroup_at(model, gU.points), x)
    vals = left @ right.T
    return KernelMatrix(vals, {"type": "semigroup", "model": model.id,
                               "x": [[v.real, v.imag] for v in x],
                               "y": [[v.real, v.imag] for v in y],
                               "gridS": gS.describe(), "gridU": gU.describe()})


def weighted_tensor_matrix(psi, gS, gU):
    """entries[i, j] = (sum_k c_k(s_i) d_k(u_j)) w_i w_j."""
    if gS.weights is None or gU.weights is None:
        raise ValueError("weighted_tensor_matrix needs grids with quadrature weights")
    vals = psi.evaluate(gS.points, gU.points) * np.outer(gS.weights, gU.weights)
    return KernelMatrix(vals, {"type": "tensor", "weight": psi.id,
                               "gridS": gS.describe(), "gridU": gU.describe()})
