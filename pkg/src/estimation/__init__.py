from .point import (
    alice_referred,
    fit_point,
    model_point_estimates,
    select_pe_subset,
    xi_standard_error,
)
from .finite_size import (
    calibration_bound,
    finite_size_estimates,
    worst_case,
    worst_case_curve,
    xi_finite_size,
    z_of_epsilon,
)

__all__ = [
    'alice_referred',
    'fit_point',
    'model_point_estimates',
    'select_pe_subset',
    'xi_standard_error',
    'calibration_bound',
    'finite_size_estimates',
    'worst_case',
    'worst_case_curve',
    'xi_finite_size',
    'z_of_epsilon',
]
