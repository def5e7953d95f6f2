from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.schemas.system_params import SystemParams


class PointEstimates(BaseModel):
    """Asymptotic estimators of the linear model y = t x + z."""
    model_config = ConfigDict(frozen=True)

    t_hat: float
    sigma2_hat: float
    xi_bq_hat: float        # unclamped; can be negative on finite samples
    t_channel_hat: float
    v_b_hat: float
    m: float                # number of pairs (per quadrature) behind the estimate


class WorstCaseEstimates(BaseModel):
    """Finite-size worst-case estimators at confidence 1 - epsilon_pe."""
    model_config = ConfigDict(frozen=True)

    t_min: float
    sigma2_max: float
    xi_bq_fs: float
    t_channel_min: float
    z_eps: float
    delta_sigma2: float
    delta_sigma2_0: float
    sigma2_0_hat: float
    m: float
    m_calib: float


class SecurityReport(BaseModel):
    """Devetak-Winter rate with the inputs it was evaluated at."""
    model_config = ConfigDict(frozen=True)

    regime: Literal["asymptotic", "finite-size"]
    i_ab: float             # bits/symbol
    chi_be: float           # bits/symbol
    skr_raw: float          # bits/s, unclamped
    skr: float              # bits/s, clamped at zero
    ratio: float            # (N - m) / N
    va: float
    t_channel: float
    xi_bq: float
    v_elec: float
    eta: float
    beta: float
    r_eff: float
    n_total: Optional[float] = None
    m_pe: Optional[float] = None
    m_calib: Optional[float] = None
    epsilon_pe: Optional[float] = None


class SweepRow(BaseModel):
    """One row of the attenuation sweep CSV."""
    model_config = ConfigDict(frozen=True)

    atten_db: float
    regime: Literal["asym", "fs"]
    m: Optional[float] = None
    i_ab_bits: float
    chi_be_bits: float
    skr_bps: float


class WorstCaseRow(BaseModel):
    """Worst-case excess noise and transmittance when N = m."""
    model_config = ConfigDict(frozen=True)

    m: float
    xi_b_fs: float
    t_min: float
    xi_b_asym: float
    t_asym: float
    at_n_total: bool = False


class SimulationReport(BaseModel):
    """Outcome of one end-to-end Monte-Carlo run."""
    model_config = ConfigDict(frozen=True)

    n_symbols: int
    n_pe: int
    level: Literal["trace", "symbol"]
    offset: int
    offset_true: int
    sampling_phase: Optional[int] = None
    va_hat: float
    sigma2_0_hat: float
    v_elec_hat: float
    xi_bq_stderr: float
    dsp_excess_noise: float
    xi_a_hat: float
    point: PointEstimates
    worst_case: WorstCaseEstimates
    asymptotic: SecurityReport
    finite_size: SecurityReport


class RunManifest(BaseModel):
    """What produced a set of output files; wall-clock data lives only here."""
    manifest_id: str
    command: str
    seed: int
    tool_version: str
    params: SystemParams
    flags: Dict[str, Any] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None
