"""
Shot-noise-unit normalization from calibration records.

The shot record (LO on, signal off) carries vacuum plus electronic noise,
the electronic record (LO off) only the latter. Scaling by
1/sqrt(var_shot - var_elec) maps vacuum to variance 1, and the normalized
shot-record variance is sigma2_0_hat = v_elec_hat + 1.
"""
from dataclasses import dataclass

import numpy as np

from src.errors import CalibrationError
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class NormalizedSymbols:
    values: np.ndarray
    scale: float
    sigma2_0_hat: float
    v_elec_hat: float
    m_calib: int


def quadrature_variance(record) -> float:
    """Per-quadrature variance, averaged over x and p."""
    record = np.asarray(record)
    if record.size == 0:
        raise CalibrationError("calibration record is empty")
    if np.iscomplexobj(record):
        return float(0.5 * (np.var(record.real) + np.var(record.imag)))
    return float(np.var(record))


def normalize_snu(raw, shot_record, elec_record=None) -> NormalizedSymbols:
    if isinstance(raw, NormalizedSymbols):
        raise CalibrationError("symbols are already in SNU; normalization applied twice")

    var_shot = quadrature_variance(shot_record)
    var_elec = 0.0 if elec_record is None else quadrature_variance(elec_record)
    vacuum = var_shot - var_elec
    if not vacuum > 0:
        raise CalibrationError(
            f"degenerate calibration: shot variance {var_shot:.4e} <= electronic variance {var_elec:.4e}"
        )

    scale = 1.0 / np.sqrt(vacuum)
    result = NormalizedSymbols(
        values=np.asarray(raw) * scale,
        scale=float(scale),
        sigma2_0_hat=var_shot * scale ** 2,
        v_elec_hat=var_elec * scale ** 2,
        m_calib=int(np.asarray(shot_record).size),
    )
    logger.info(f"[DSP] SNU scale {result.scale:.5f}, sigma2_0_hat={result.sigma2_0_hat:.5f}")
    return result
