"""Quadrature, matrix exponential, the Schur-complement kernels and the SDP solver."""

import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from factornorm import _core, _kernels_py, sdp
from factornorm.expm import expm
from factornorm.gamma2 import gamma2_problem
from factornorm.quadrature import gauss_legendre, integrate


# ----------------------------------------------------------- quadrature

def test_integrate_smooth():
    val, err = integrate(np.exp, [0.0, 1.0], tol=1e-14)
    assert val == pytest.approx(math.e - 1, abs=1e-14)
    assert err < 1e-13


def test_integrate_vector_valued():
    f = lambda t: np.stack([np.sin(t), np.cos(t), t ** 3], axis=-1)
    val, _ = integrate(f, [0.0, math.pi], tol=1e-13)
    np.testing.assert_allclose(val, [2.0, 0.0, math.pi ** 4 / 4], atol=1e-12)


def test_integrate_kink_at_breakpoint():
    val, _ = integrate(lambda t: np.abs(t - 0.3), [0.0, 0.3, 1.0], tol=1e-14)
    assert val == pytest.approx(0.045 + 0.245, abs=1e-15)


def test_integrate_degenerate_interval():
    assert integrate(np.exp, [1.0, 1.0]) == (0.0, 0.0)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(5, 1.0, 3.0)
    assert np.sum(w * x ** 9) == pytest.approx((3 ** 10 - 1) / 10, rel=1e-14)


# ----------------------------------------------------------- expm

@pytest.mark.parametrize("scale", [1e-6, 0.1, 1.0, 5.0, 60.0])
def test_expm_against_scipy(rng, scale):
    A = scale * (rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
    ref = sla.expm(A)
    assert np.linalg.norm(expm(A) - ref) <= 1e-12 * max(1.0, np.linalg.norm(ref))


def test_expm_batched(rng):
    A = rng.standard_normal((7, 3, 3))
    E = expm(A)
    for k in range(7):
        np.testing.assert_allclose(E[k], sla.expm(A[k]), rtol=1e-12, atol=1e-14)


def test_expm_nilpotent():
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(expm(-2.0 * N), [[1.0, -2.0], [0.0, 1.0]], atol=1e-15)


@given(arrays(float, (3, 3), elements=st.floats(-3, 3)), st.floats(-2, 2), st.floats(-2, 2))
def test_expm_group_property(A, s, t):
    lhs = expm((s + t) * A)
    rhs = expm(s * A) @ expm(t * A)
    assert np.linalg.norm(lhs - rhs) <= 1e-11 * max(1.0, np.linalg.norm(lhs))


# ----------------------------------------------------------- Schur-complement kernels

def _spd(rng, n):
    G = rng.standard_normal((n, n))
    return G @ G.T / n + np.eye(n)


@pytest.mark.parametrize("complex_", [False, True])
def test_schur_kernels_agree_with_definition(rng, complex_):
    M = rng.standard_normal((6, 4)) + (1j * rng.standard_normal((6, 4)) if complex_ else 0)
    data = gamma2_problem(M, 1e-6)[0]
    X, Sinv = _spd(rng, data.ns), _spd(rng, data.ns)
    H = _kernels_py.schur_sdp(X, Sinv, data.ptr, data.rows, data.cols, data.vals)
    # dense reference tr(A_k X A_l Sinv)
    A = [np.zeros((data.ns, data.ns)) for _ in range(data.K)]
    for k in range(data.K):
        sl = slice(data.ptr[k], data.ptr[k + 1])
        A[k][data.rows[sl], data.cols[sl]] = data.vals[sl]
    ref = np.array([[np.trace(Ak @ X @ Al @ Sinv) for Al in A] for Ak in A])
    np.testing.assert_allclose(H, ref, atol=1e-12)
    np.testing.assert_allclose(_core.schur_sdp(X, Sinv, data.ptr, data.rows, data.cols,
                                               data.vals), ref, atol=1e-12)


def test_backend_reported():
    assert _core.BACKEND in ("cython", "python")


# ----------------------------------------------------------- SDP solver

def test_sdp_tiny_problem():
    # max y subject to [[1, y], [y, 1]] >= 0 has optimum y = 1
    C = np.eye(2)
    data = sdp.SDPData(C, np.zeros(0), [0, 2], [0, 1], [1, 0], [-1.0, -1.0],
                       np.zeros((1, 0)), [1.0])
    res = sdp.solve(data)
    assert res.status == "optimal"
    assert res.dual_objective == pytest.approx(1.0, abs=1e-8)
    assert res.primal_objective == pytest.approx(1.0, abs=1e-8)


def test_sdp_with_orthant():
    # max y1 + y2 subject to y1 <= 2 (matrix block 1x1), y2 <= 3 (orthant)
    data = sdp.SDPData(np.array([[2.0]]), np.array([3.0]), [0, 1, 1], [0], [0], [1.0],
                       np.array([[0.0], [1.0]]), [1.0, 1.0])
    res = sdp.solve(data)
    np.testing.assert_allclose(res.y, [2.0, 3.0], atol=1e-7)


def test_embed_roundtrip(rng):
    H = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = H + H.conj().T
    E = sdp.embed(H)
    np.testing.assert_allclose(E, E.T)
    np.testing.assert_allclose(sdp.unembed(E), H)
    # eigenvalues are duplicated
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(E))[::2], np.linalg.eigvalsh(H),
                               atol=1e-12)


def test_pure_python_backend_selected_by_env():
    import os
    import subprocess
    import sys

    code = ("import numpy as np, factornorm as f; "
            "c = f.gamma2_norm(np.array([[1.0, 1.0], [1.0, -1.0]])); "
            "print(f.BACKEND, round(c.value, 6))")
    env = {**os.environ, "FACTORNORM_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out == ["python", str(round(math.sqrt(2), 6))]
