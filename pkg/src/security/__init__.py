from .gaussian import (
    TwoModeCov,
    cov_channel_output,
    cov_measured,
    detector_model_variance,
    g_entropy,
    heterodyne_condition,
    holevo_bound,
    mutual_information,
    numeric_symplectic_eigenvalues,
    symplectic_eigenvalues,
    trusted_noise_variance,
)
from .keyrate import evaluate_key_rate, skr_asymptotic, skr_finite
from .sweep import attenuation_grid, log_m_grid, sweep_attenuation, zero_crossing

__all__ = [
    'TwoModeCov',
    'cov_channel_output',
    'cov_measured',
    'detector_model_variance',
    'g_entropy',
    'heterodyne_condition',
    'holevo_bound',
    'mutual_information',
    'numeric_symplectic_eigenvalues',
    'symplectic_eigenvalues',
    'trusted_noise_variance',
    'evaluate_key_rate',
    'skr_asymptotic',
    'skr_finite',
    'attenuation_grid',
    'log_m_grid',
    'sweep_attenuation',
    'zero_crossing',
]
