"""Factorization norms of Hankel kernels and the Hille-Phillips calculus.

The package computes the Hilbert-space factorization norm gamma_2 of sampled
kernels m(s + t) and its dual norm, evaluates the Hille-Phillips calculus
Gamma(A, b) = int b(t) exp(-tA) dt for matrix generators, and checks the
bound ||Gamma(A, b)|| <= C_A^2 gamma_2^*(Psi) on a catalog of examples.
Hardy-space helpers cover scalar Riesz factorization on the circle, the
conformal transfer to the line and band-limited Fejer kernels.
"""

from ._core import BACKEND
from .gamma2 import (Gamma2Certificate, Gamma2Error, FactorWitness, brute_force_gamma2,
                     extract_witness, gamma2_dual, gamma2_norm, pairing)
from .hardy import (FejerKernel, HardyFunction, RieszFactors, bump, bump_hat, bump_l1_norm,
                    conformal_transfer, fejer_weight, l1_approx_error, line_norm,
                    plancherel_ratio, riesz_factorize_circle, sarason_factorize_line)
from .hankel import (KernelMatrix, SampleGrid, gauss_grid, make_grid, refine_grid,
                     sample_hankel, sample_semigroup_kernel, weighted_tensor_matrix)
from .semigroup import (BoundReport, CalculusResult, SemigroupModel, estimate_growth_bound,
                        hille_phillips, semigroup_at, shift_consistency,
                        verify_calculus_bound)
from .symbols import (FactorWitnessSpec, Piece, Symbol, TensorWeight, Weight, constant,
                      convolve_weights, eval_symbol, exponential, laplace_symbol,
                      laplace_transform, poisson_tilde, power_imaginary, shifted,
                      weight_from_config)

__version__ = "0.1.0"
