import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from factornorm import (KernelMatrix, SampleGrid, SemigroupModel, TensorWeight, Weight,
                        constant, exponential, gauss_grid, make_grid, power_imaginary,
                        refine_grid, sample_hankel, sample_semigroup_kernel,
                        weighted_tensor_matrix)


def test_uniform_grid():
    np.testing.assert_allclose(make_grid("uniform", 3, 1, 2).points, [1, 1.5, 2])


def test_geometric_grid():
    np.testing.assert_allclose(make_grid("geometric", 3, 0.01, 1).points, [0.01, 0.1, 1],
                               rtol=1e-15)


@pytest.mark.parametrize("args", [("uniform", 2, 1, 1), ("uniform", 1, 1, 2),
                                  ("uniform", 3, 0, 2), ("spiral", 3, 1, 2)])
def test_grid_errors(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_sample_grid_validation():
    with pytest.raises(ValueError):
        SampleGrid([1.0, 0.5])
    with pytest.raises(ValueError):
        SampleGrid([0.0, 1.0])
    with pytest.raises(ValueError):
        SampleGrid([1.0, 2.0], [1.0])


def test_grid_weights_integrate():
    g = make_grid("geometric", 161, 1e-3, 50.0)
    assert np.sum(g.weights * np.exp(-g.points)) == pytest.approx(1 - 1e-3, abs=1e-3)
    gg = gauss_grid([0, 1, 3], per_panel=12)
    assert np.sum(gg.weights * gg.points ** 5) == pytest.approx(3 ** 6 / 6, rel=1e-13)


def test_refinement_nests_uniform_grids():
    g = make_grid("uniform", 5, 1.0, 2.0)
    r = refine_grid(g)
    assert len(r) == 9
    np.testing.assert_allclose(r.points[::2], g.points)
    assert len(refine_grid(gauss_grid([0, 1], per_panel=4))) == 8


def test_hankel_exponential_example():
    a = 0.1
    g = SampleGrid([a, a + math.log(2)])
    M = sample_hankel(exponential(1.0), g, g).entries
    np.testing.assert_allclose(M, math.exp(-2 * a) * np.array([[1, 0.5], [0.5, 0.25]]),
                               atol=1e-15)


def test_hankel_constant_is_all_ones():
    g = make_grid("uniform", 4, 0.5, 2.0)
    np.testing.assert_array_equal(sample_hankel(constant(1.0), g, g).entries, np.ones((4, 4)))


def test_hankel_power_imaginary_example():
    g = SampleGrid([1.0])
    val = sample_hankel(power_imaginary(1.0), g, g).entries[0, 0]
    assert val == pytest.approx(np.exp(1j * math.log(2)))
    assert val == pytest.approx(0.7692 + 0.6390j, abs=1e-4)


def test_hankel_provenance():
    g = make_grid("uniform", 3, 1, 2)
    prov = sample_hankel(constant(1.0), g, g).provenance
    assert prov["symbol"] == "const[1]" and prov["gridS"]["n"] == 3


def test_semigroup_kernel_identity():
    g = make_grid("uniform", 4, 0.1, 2.0)
    e1 = np.array([1.0, 0.0])
    M = sample_semigroup_kernel(SemigroupModel(np.eye(2)), e1, e1, g, g).entries
    np.testing.assert_allclose(M, np.exp(-np.add.outer(g.points, g.points)), atol=1e-15)


def test_semigroup_kernel_rotation():
    g = SampleGrid([math.pi / 2])
    e1 = np.array([1.0, 0.0])
    model = SemigroupModel(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert sample_semigroup_kernel(model, e1, e1, g, g).entries[0, 0] == pytest.approx(-1.0)


def test_semigroup_kernel_zero_vector_and_shape_check():
    g = make_grid("uniform", 3, 0.1, 1.0)
    model = SemigroupModel(np.eye(2))
    assert not np.any(sample_semigroup_kernel(model, np.zeros(2), np.ones(2), g, g).entries)
    with pytest.raises(ValueError):
        sample_semigroup_kernel(model, np.ones(3), np.ones(2), g, g)


def test_tensor_matrix_indicator_example():
    box = Weight.indicator(0.0, 1.0)
    g = SampleGrid([0.5], [1.0])
    N = weighted_tensor_matrix(TensorWeight(((box, box),)), g, g).entries
    np.testing.assert_array_equal(N, [[1.0]])


def test_tensor_matrix_exponential_example():
    e = Weight.exp(1.0, 1.0)
    g = make_grid("uniform", 2, 0.5, 1.0)
    N = weighted_tensor_matrix(TensorWeight(((e, e),)), g, g).entries
    ref = np.exp(-np.add.outer(g.points, g.points)) * np.outer(g.weights, g.weights)
    np.testing.assert_allclose(N, ref, rtol=1e-15)


def test_tensor_matrix_needs_weights():
    g = SampleGrid([0.5, 1.0])
    with pytest.raises(ValueError):
        weighted_tensor_matrix(TensorWeight(((Weight.exp(), Weight.exp()),)), g, g)


@given(st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3))
def test_tensor_matrix_linear(lam):
    e, box = Weight.exp(1.0, 1.0), Weight.indicator(0.2, 1.4)
    psi = TensorWeight(((e, box), (box, e)))
    g = make_grid("uniform", 5, 0.1, 2.0)
    N = weighted_tensor_matrix(psi, g, g).entries
    np.testing.assert_allclose(weighted_tensor_matrix(psi.scaled(lam), g, g).entries, lam * N,
                               rtol=1e-14, atol=1e-16)


def test_kernel_matrix_csv_roundtrip(tmp_path, rng):
    K = KernelMatrix(rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4)),
                     {"type": "test"})
    path = tmp_path / "k.csv"
    K.save(path)
    back = KernelMatrix.load(path)
    np.testing.assert_array_equal(back.entries, K.entries)
    assert back.provenance == {"type": "test"}


def test_kernel_matrix_rejects_nan():
    with pytest.raises(ValueError):
        KernelMatrix([[np.nan]])
