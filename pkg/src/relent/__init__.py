"""Relative entropy of entanglement for maximally correlated bipartite states."""

from .certifier import (
    CertificateReport,
    certify,
    convexity_probe,
    derivative_ensemble,
    derivative_kernel_form,
    derivative_spectral_form,
)
from .closed_form import ErResult, er_closed_form, g_kernel, g_matrix, two_qubit_er
from .linalg import (
    eigh,
    frechet_log_trace,
    log_divided_difference,
    relative_entropy,
    von_neumann_entropy,
)
from .minimizer import MinimizeConfig, MinimizeResult, lower_bound_check, minimize
from .states import (
    CoefficientMatrix,
    DensityMatrix,
    ProductPureState,
    SeparableEnsemble,
    build_sigma,
    closest_separable,
    ensemble_to_density,
    random_coefficient_matrix,
    random_product_state,
    validate_coefficients,
)

__version__ = "0.1.0"
