import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from factornorm import (SemigroupModel, TensorWeight, Weight, convolve_weights,
                        estimate_growth_bound, gauss_grid, hille_phillips, semigroup_at,
                        shift_consistency, verify_calculus_bound)

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
N = np.array([[0.0, 1.0], [0.0, 0.0]])
E1 = Weight.exp(1.0, 1.0)
TE = Weight.exp(1.0, 1.0, power=1)
GRID = gauss_grid([0, 0.5, 1, 2, 4, 8, 16, 32], per_panel=8)


def jordan(a):
    return a * np.eye(2) + N


def jordan_growth(a):
    """max_t exp(-a t) ||[[1, -t], [0, 1]]||, maximised in closed form.

    The norm is (t + sqrt(t^2 + 4)) / 2, so the log-derivative vanishes at
    t = sqrt(1/a^2 - 4) when a < 1/2; otherwise the maximum is at t = 0.
    """
    if a >= 0.5:
        return 1.0
    t = math.sqrt(1 / a ** 2 - 4)
    return math.exp(-a * t) * (t + math.sqrt(t * t + 4)) / 2


# ----------------------------------------------------------- semigroup_at

def test_semigroup_identity():
    np.testing.assert_allclose(semigroup_at(SemigroupModel(np.eye(2)), math.log(2)),
                               0.5 * np.eye(2), atol=1e-15)


def test_semigroup_rotation():
    T = semigroup_at(SemigroupModel(ROT), math.pi / 2)
    np.testing.assert_allclose(T, [[0, 1], [-1, 0]], atol=1e-15)
    assert np.linalg.norm(T, 2) == pytest.approx(1.0)


def test_semigroup_jordan():
    np.testing.assert_allclose(semigroup_at(SemigroupModel(jordan(1.0)), 1.0),
                               math.exp(-1) * np.array([[1, -1], [0, 1]]), atol=1e-15)


def test_semigroup_stack_and_domain():
    m = SemigroupModel(jordan(0.5))
    ts = np.array([0.0, 0.5, 3.0])
    stack = semigroup_at(m, ts)
    for k, t in enumerate(ts):
        np.testing.assert_allclose(stack[k], semigroup_at(m, t), atol=1e-15)
    with pytest.raises(ValueError):
        semigroup_at(m, -1.0)


def test_model_validation():
    with pytest.raises(ValueError):
        SemigroupModel(np.ones((2, 3)))
    with pytest.raises(ValueError):
        SemigroupModel([[np.inf]])


# ----------------------------------------------------------- growth bound

@pytest.mark.parametrize("A, expected", [(np.eye(2), 1.0), (ROT, 1.0), (jordan(1.0), 1.0)])
def test_growth_examples(A, expected):
    assert estimate_growth_bound(SemigroupModel(A)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("a", [1.0, 0.5, 0.25, 0.1])
def test_growth_jordan_against_closed_form(a):
    assert estimate_growth_bound(SemigroupModel(jordan(a))) == pytest.approx(jordan_growth(a),
                                                                             rel=1e-9)


def test_growth_jordan_frozen():
    # frozen from the closed-form maximiser above
    assert jordan_growth(0.25) == pytest.approx(1.5697753079149, abs=1e-12)
    assert jordan_growth(0.1) == pytest.approx(3.7159552280300, abs=1e-12)


def test_growth_block_with_rotation():
    A = np.block([[jordan(0.25), np.zeros((2, 2))], [np.zeros((2, 2)), ROT]])
    val, info = estimate_growth_bound(SemigroupModel(A), with_details=True)
    assert val == pytest.approx(jordan_growth(0.25), rel=1e-9)
    assert info["sampled"] <= val


def test_unbounded_models():
    for A in [-np.eye(2), N, np.array([[0, 1], [0, 0]]) * 1j]:
        m = SemigroupModel(A)
        assert not m.boundedFlag
        with pytest.raises(ValueError):
            estimate_growth_bound(m)
        with pytest.raises(ValueError):
            hille_phillips(m, E1)


def test_bounded_flag_semisimple_axis():
    assert SemigroupModel(np.zeros((2, 2))).boundedFlag
    assert SemigroupModel(ROT).spectralAbscissa == pytest.approx(0.0)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_growth_bound_dominates_samples(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 3)) + 3.5 * np.eye(3)
    m = SemigroupModel(A)
    if not m.boundedFlag:
        return
    c = estimate_growth_bound(m)
    ts = rng.uniform(0, 5, 50)
    assert np.all(np.linalg.norm(semigroup_at(m, ts), 2, axis=(1, 2)) <= c * (1 + 1e-12))
    assert c >= 1.0 - 1e-15


# ----------------------------------------------------------- Hille-Phillips calculus

def test_hp_identity():
    r = hille_phillips(SemigroupModel(np.eye(2)), E1)
    np.testing.assert_allclose(r.operatorValue, 0.5 * np.eye(2), atol=1e-10)


def test_hp_jordan():
    r = hille_phillips(SemigroupModel(jordan(1.0)), E1)
    np.testing.assert_allclose(r.operatorValue, 0.5 * np.eye(2) - 0.25 * N, atol=1e-10)
    assert r.quadratureError + r.tailError <= 1e-10


def test_hp_random_diagonalizable(rng):
    lam = rng.uniform(0.2, 2.0, 4) + 1j * rng.uniform(-2, 2, 4)
    V = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
    Vi = np.linalg.inv(V)
    A = V @ np.diag(lam) @ Vi
    r = hille_phillips(SemigroupModel(A), TE)
    ref = V @ np.diag(1 / (1 + lam) ** 2) @ Vi
    np.testing.assert_allclose(r.operatorValue, ref, atol=1e-9)


def test_hp_indicator_and_rotation():
    # int_0^1 exp(-tA) dt = A^{-1} (I - exp(-A))
    r = hille_phillips(SemigroupModel(ROT), Weight.indicator(0.0, 1.0))
    ref = np.linalg.solve(ROT, np.eye(2) - semigroup_at(SemigroupModel(ROT), 1.0))
    np.testing.assert_allclose(r.operatorValue, ref, atol=1e-10)


@pytest.mark.parametrize("A", [np.eye(2), jordan(0.25), ROT])
@pytest.mark.parametrize("c, d", [(E1, Weight.exp(1.0, 2.0)),
                                  (Weight.indicator(0.0, 1.0), TE),
                                  (Weight.exp(1.0, 1 + 2j), Weight.indicator(0.5, 1.5))])
def test_hp_homomorphism(A, c, d):
    m = SemigroupModel(A)
    lhs = hille_phillips(m, convolve_weights(c, d)).operatorValue
    rhs = hille_phillips(m, c).operatorValue @ hille_phillips(m, d).operatorValue
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-8


@pytest.mark.parametrize("A", [np.eye(2), jordan(0.1), ROT])
def test_hp_crude_bound(A):
    m = SemigroupModel(A)
    b = Weight.exp(1.0, 1.0) + Weight.exp(-2.0, 3.0)
    assert hille_phillips(m, b).operatorNorm <= estimate_growth_bound(m) * b.l1_norm() + 1e-8


# ----------------------------------------------------------- shift consistency

def test_shift_identity():
    m = SemigroupModel(np.eye(2))
    assert shift_consistency(m, E1, 1.0) <= 2e-10
    np.testing.assert_allclose(hille_phillips(m.shifted(1.0), E1).operatorValue,
                               np.eye(2) / 3, atol=1e-10)


def test_shift_zero():
    assert shift_consistency(SemigroupModel(jordan(0.3)), TE, 0.0) == 0.0


def test_shift_jordan():
    m = SemigroupModel(jordan(1.0))
    assert shift_consistency(m, TE, 0.5) <= 2e-10
    ref = np.linalg.matrix_power(np.linalg.inv(1.5 * np.eye(2) + jordan(1.0)), 2)
    np.testing.assert_allclose(hille_phillips(m.shifted(0.5), TE).operatorValue, ref, atol=1e-10)


def test_shift_negative_rejected():
    with pytest.raises(ValueError):
        shift_consistency(SemigroupModel(np.eye(1)), E1, -1.0)


# ----------------------------------------------------------- bound verification

@pytest.mark.parametrize("a", [0.5, 2.0])
def test_bound_scalar_semigroup(a):
    psi = TensorWeight(((E1, E1),))
    rep = verify_calculus_bound(SemigroupModel(a * np.eye(2)), psi, GRID, GRID)
    assert rep.lhs == pytest.approx(1 / (1 + a) ** 2, abs=1e-10)
    assert rep.rhs == pytest.approx(1.0, abs=1e-5)
    assert rep.passed and len(rep.levels) == 2


def test_bound_rotation():
    psi = TensorWeight(((E1, E1),))
    rep = verify_calculus_bound(SemigroupModel(ROT), psi, GRID, GRID)
    ref = np.linalg.norm(np.linalg.matrix_power(np.linalg.inv(np.eye(2) + ROT), 2), 2)
    assert rep.lhs == pytest.approx(ref, abs=1e-10)
    assert rep.passed


def test_bound_homogeneous():
    m = SemigroupModel(jordan(0.25))
    psi = TensorWeight(((Weight.indicator(0.0, 1.0), E1),))
    r1 = verify_calculus_bound(m, psi, GRID, GRID, levels=1)
    r3 = verify_calculus_bound(m, psi.scaled(3.0), GRID, GRID, levels=1)
    assert r3.lhs == pytest.approx(3 * r1.lhs, rel=1e-9)
    assert r3.rhs == pytest.approx(3 * r1.rhs, rel=1e-6)
    assert r3.slack == pytest.approx(3 * r1.slack, rel=1e-6)


def test_bound_report_dict():
    rep = verify_calculus_bound(SemigroupModel(np.eye(1)), TensorWeight(((E1, E1),)),
                                GRID, GRID, levels=1)
    d = rep.to_dict()
    assert d["pass"] is True and d["tolerances"]["bound"] == 1e-4
