"""
Finite-size worst-case estimators.

    z             = sqrt(2) erf^-1(1 - eps)
    t_min         = t_hat - z sqrt(sigma2_hat / (m V_A))
    sigma2_max    = sigma2_hat + z sigma2_hat sqrt(2) / sqrt(m)
    d_sigma2_0    = z sigma2_0_hat sqrt(2) / sqrt(m')
    xi_bq_fs      = sigma2_max - (sigma2_0_hat - d_sigma2_0)
    T_min         = 2 t_min^2 / eta

t_min is clamped at zero before conversion to T_min.
"""
import math
from typing import Sequence

from scipy.special import erfcinv

from src.errors import ParameterError
from src.estimation.point import model_point_estimates
from src.schemas.reports import PointEstimates, WorstCaseEstimates, WorstCaseRow
from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


def z_of_epsilon(epsilon_pe: float) -> float:
    if not (0.0 < epsilon_pe < 1.0):
        raise ParameterError(f"epsilon_pe out of (0,1): {epsilon_pe}")
    # erfinv(1 - eps) loses precision near 1; erfcinv(eps) does not.
    return float(math.sqrt(2.0) * erfcinv(epsilon_pe))


def _check_count(name: str, value: float) -> None:
    if not value >= 1:
        raise ParameterError(f"{name} must be >= 1, got {value}")


def worst_case(point: PointEstimates, va: float, m: float, epsilon_pe: float) -> tuple[float, float]:
    """(t_min, sigma2_max) at confidence 1 - epsilon_pe over m PE symbols."""
    _check_count("m", m)
    if not va > 0:
        raise ParameterError(f"va must be > 0 for the transmittance bound, got {va}")
    z = z_of_epsilon(epsilon_pe)
    t_min = point.t_hat - z * math.sqrt(point.sigma2_hat / (m * va))
    sigma2_max = point.sigma2_hat + z * point.sigma2_hat * math.sqrt(2.0) / math.sqrt(m)
    return t_min, sigma2_max


def calibration_bound(sigma2_0_hat: float, m_calib: float, epsilon_pe: float) -> float:
    _check_count("m_calib", m_calib)
    return z_of_epsilon(epsilon_pe) * sigma2_0_hat * math.sqrt(2.0) / math.sqrt(m_calib)


def xi_finite_size(sigma2_max: float, sigma2_0_hat: float, delta_sigma2_0: float) -> float:
    return sigma2_max - (sigma2_0_hat - delta_sigma2_0)


def finite_size_estimates(
    point: PointEstimates,
    va: float,
    eta: float,
    m: float,
    m_calib: float,
    epsilon_pe: float,
    sigma2_0_hat: float,
) -> WorstCaseEstimates:
    """Chains the worst-case transmittance, noise and calibration bounds."""
    z = z_of_epsilon(epsilon_pe)
    t_min, sigma2_max = worst_case(point, va, m, epsilon_pe)
    delta_sigma2_0 = calibration_bound(sigma2_0_hat, m_calib, epsilon_pe)
    xi_fs = xi_finite_size(sigma2_max, sigma2_0_hat, delta_sigma2_0)
    t_clamped = max(t_min, 0.0)
    if t_min < 0:
        logger.warning(f"[PE] t_min={t_min:.4e} < 0 at m={m:.3g}; clamped, T_min = 0")
    return WorstCaseEstimates(
        t_min=t_min,
        sigma2_max=sigma2_max,
        xi_bq_fs=xi_fs,
        t_channel_min=2.0 * t_clamped ** 2 / eta,
        z_eps=z,
        delta_sigma2=sigma2_max - point.sigma2_hat,
        delta_sigma2_0=delta_sigma2_0,
        sigma2_0_hat=sigma2_0_hat,
        m=float(m),
        m_calib=float(m_calib),
    )


def worst_case_curve(params: SystemParams, m_grid: Sequence[float]) -> list[WorstCaseRow]:
    """
    Worst-case xi_B = 2 xi_Bq^FS and T_min against m when N = m = m'.

    Uses the noiseless expectation of the estimators at the configured
    point and sigma2_0_hat = 1 + v_elec. The row with m equal to n_total is
    flagged.
    """
    if len(m_grid) == 0:
        raise ParameterError("m grid is empty")
    point = model_point_estimates(params)
    sigma2_0 = 1.0 + params.v_elec
    rows = []
    for m in m_grid:
        fs = finite_size_estimates(point, params.va, params.eta, m, m, params.epsilon_pe, sigma2_0)
        rows.append(WorstCaseRow(
            m=float(m),
            xi_b_fs=2.0 * fs.xi_bq_fs,
            t_min=fs.t_channel_min,
            xi_b_asym=params.xi_b,
            t_asym=params.t_channel,
            at_n_total=float(m) == float(params.n_total),
        ))
    logger.info(f"[PE] worst-case curve over {len(rows)} m values")
    return rows
