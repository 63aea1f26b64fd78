"""Independent finite-chain references for the infinite-chain integrals."""
from .exact_diag import exact_diag_reference
from .freefermion import (
    CovarianceState,
    QuadraticForm,
    build_quadratic_form,
    covariance_observables,
    evolve_covariance,
    free_fermion_correlators,
    thermal_covariance,
)
from .validate import PANEL, cross_validate, validate_panel

__all__ = [
    "CovarianceState",
    "QuadraticForm",
    "build_quadratic_form",
    "thermal_covariance",
    "evolve_covariance",
    "covariance_observables",
    "free_fermion_correlators",
    "exact_diag_reference",
    "cross_validate",
    "validate_panel",
    "PANEL",
]
