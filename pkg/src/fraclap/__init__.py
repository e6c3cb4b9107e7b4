"""fraclap: operator-factorization discretization of the integral fractional
Laplacian (1D/2D, Lagrange bases of degree 0..2) with FFT-accelerated
Toeplitz/BTTB application and a Dirichlet fractional-Poisson solver.
"""

from .kernel import FieldFn, Grid, KernelSpec
from .specfun import gamma, gauss_2f1, kummer_1f1, normalization_constant
from .weights import (WeightTable1D, WeightTable2D, load_table, save_table,
                      weights_1d_analytic, weights_1d_quadrature,
                      weights_2d_quadrature)
from .stencil import (StencilCoefficients1D, StencilCoefficients2D, coeffs_1d,
                      coeffs_2d, farfield_measure_1d, farfield_measure_2d)
from .fastop import BTTBOperator, ToeplitzOperator, dense_assemble
from .boundary import (BoundaryVector, boundary_vector_1d, boundary_vector_2d,
                       tail_integral_1d)
from .solver import (PoissonProblem, SolveReport, apply_operator,
                     grid_error_norms, solve_poisson)
from .studies import (ConvergenceRow, emit_csv, emit_error_field,
                      gamma_sensitivity_study, operator_error_study,
                      poisson_convergence_study, rate_of, tempered_study)

__version__ = "0.1.0"

__all__ = [
    "FieldFn", "Grid", "KernelSpec",
    "gamma", "gauss_2f1", "kummer_1f1", "normalization_constant",
    "WeightTable1D", "WeightTable2D", "weights_1d_analytic",
    "weights_1d_quadrature", "weights_2d_quadrature", "save_table", "load_table",
    "StencilCoefficients1D", "StencilCoefficients2D", "coeffs_1d", "coeffs_2d",
    "farfield_measure_1d", "farfield_measure_2d",
    "ToeplitzOperator", "BTTBOperator", "dense_assemble",
    "BoundaryVector", "boundary_vector_1d", "boundary_vector_2d",
    "tail_integral_1d",
    "PoissonProblem", "SolveReport", "apply_operator", "solve_poisson",
    "grid_error_norms",
    "ConvergenceRow", "rate_of", "operator_error_study",
    "poisson_convergence_study", "gamma_sensitivity_study", "tempered_study",
    "emit_csv", "emit_error_field",
]
