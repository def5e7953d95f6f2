"""
Devetak-Winter secret key rate with reverse reconciliation.

    SKR = ratio * (beta I_AB - chi_BE) * R_eff,   ratio = (N - m) / N

The privacy-amplification penalty is zero. Negative excess-noise estimates
are clamped at zero here and nowhere earlier; transmittance bounds above 1
are clamped to 1.
"""
import math

from src.errors import ParameterError
from src.estimation.finite_size import finite_size_estimates
from src.estimation.point import model_point_estimates
from src.schemas.reports import PointEstimates, SecurityReport
from src.schemas.system_params import SystemParams
from src.security.gaussian import holevo_bound, mutual_information
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


def _check_ratio(ratio: float) -> None:
    if not (0.0 <= ratio <= 1.0):
        raise ParameterError(f"ratio out of [0,1]: {ratio}")


def evaluate_key_rate(
    va: float,
    t_channel: float,
    xi_bq: float,
    v_elec: float,
    eta: float,
    beta: float,
    r_eff: float,
    ratio: float,
    regime: str = "asymptotic",
    **echo,
) -> SecurityReport:
    """Key rate at explicit channel parameters; `echo` fields are copied into the report."""
    _check_ratio(ratio)
    xi_bq = max(xi_bq, 0.0)
    if t_channel <= 0.0:
        logger.warning(f"[SKR] {regime}: transmittance bound is zero, no key")
        i_ab = chi_be = skr_raw = 0.0
    else:
        i_ab = mutual_information(va, t_channel, xi_bq, v_elec, eta)
        chi_be = holevo_bound(va, t_channel, xi_bq, v_elec, eta)
        skr_raw = ratio * (beta * i_ab - chi_be) * r_eff
    return SecurityReport(
        regime=regime,
        i_ab=i_ab,
        chi_be=chi_be,
        skr_raw=skr_raw,
        skr=max(0.0, skr_raw),
        ratio=ratio,
        va=va,
        t_channel=t_channel,
        xi_bq=xi_bq,
        v_elec=v_elec,
        eta=eta,
        beta=beta,
        r_eff=r_eff,
        **echo,
    )


def skr_asymptotic(params: SystemParams, ratio: float = 1.0) -> SecurityReport:
    report = evaluate_key_rate(
        params.va, params.t_channel, params.xi_bq, params.v_elec, params.eta,
        params.beta, params.r_eff, ratio,
    )
    logger.debug(f"[SKR] asymptotic ratio={ratio}: {report.skr:.1f} bps")
    return report


def skr_finite(
    params: SystemParams,
    point: PointEstimates | None = None,
    n_total: float | None = None,
    m: float | None = None,
    m_calib: float | None = None,
    epsilon_pe: float | None = None,
    sigma2_0_hat: float | None = None,
    ratio: float | None = None,
    va: float | None = None,
    v_elec: float | None = None,
) -> SecurityReport:
    """
    Finite-size key rate at the worst-case T_min and xi_Bq^FS.

    Unset arguments fall back to params (point estimates default to their
    noiseless expectation, sigma2_0_hat to 1 + v_elec). With `ratio` given
    the key fraction is held fixed and N is not needed; otherwise
    ratio = (N - m) / N and m < N is required.
    """
    n_total = params.n_total if n_total is None else n_total
    m = params.m_pe if m is None else m
    m_calib = params.m_calib if m_calib is None else m_calib
    epsilon_pe = params.epsilon_pe if epsilon_pe is None else epsilon_pe
    va = params.va if va is None else va
    v_elec = params.v_elec if v_elec is None else v_elec
    sigma2_0_hat = 1.0 + v_elec if sigma2_0_hat is None else sigma2_0_hat
    point = model_point_estimates(params) if point is None else point

    if ratio is None:
        if not m < n_total:
            raise ParameterError(f"m must be < N, got m={m}, N={n_total}")
        ratio = (n_total - m) / n_total

    worst = finite_size_estimates(point, va, params.eta, m, m_calib, epsilon_pe, sigma2_0_hat)
    t_channel_min = worst.t_channel_min
    if t_channel_min > 1.0:
        logger.warning(f"[SKR] finite-size T_min={t_channel_min:.5f} > 1 at m={m:.3g}; clamped to 1")
        t_channel_min = 1.0
    report = evaluate_key_rate(
        va, t_channel_min, worst.xi_bq_fs, v_elec, params.eta,
        params.beta, params.r_eff, ratio, regime="finite-size",
        n_total=None if math.isinf(n_total) else float(n_total),
        m_pe=float(m),
        m_calib=float(m_calib),
        epsilon_pe=epsilon_pe,
    )
    logger.debug(f"[SKR] finite-size m={m:.3g}: T_min={t_channel_min:.5f}, {report.skr:.1f} bps")
    return report
