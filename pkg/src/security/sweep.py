"""
Key rate against channel attenuation.

For each attenuation the transmittance is recomputed while xi_Bq stays at
its configured value. Each grid point yields one asymptotic row and one
finite-size row per m (with m' = m), all at the same key fraction.
Grid points are evaluated in a process pool; rows come back in grid order.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from src.config import db_to_transmittance
from src.errors import SweepError
from src.schemas.reports import SweepRow
from src.schemas.system_params import SystemParams
from src.security.keyrate import evaluate_key_rate, skr_finite
from src.estimation.point import model_point_estimates
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


def attenuation_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid start, start+step, ..., stop (rounded to kill float drift)."""
    if not step > 0:
        raise SweepError(f"grid step must be > 0, got {step}")
    if stop < start:
        raise SweepError(f"grid stop {stop} below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _grid_point(params: SystemParams, atten_db: float, m_list: Sequence[float], ratio: float) -> list[SweepRow]:
    t_channel = db_to_transmittance(atten_db)
    asym = evaluate_key_rate(
        params.va, t_channel, params.xi_bq, params.v_elec, params.eta,
        params.beta, params.r_eff, ratio,
    )
    rows = [SweepRow(atten_db=atten_db, regime="asym", m=None,
                     i_ab_bits=asym.i_ab, chi_be_bits=asym.chi_be, skr_bps=asym.skr)]
    point = model_point_estimates(params, t_channel)
    for m in m_list:
        fs = skr_finite(params, point=point, m=m, m_calib=m, ratio=ratio)
        rows.append(SweepRow(atten_db=atten_db, regime="fs", m=float(m),
                             i_ab_bits=fs.i_ab, chi_be_bits=fs.chi_be, skr_bps=fs.skr))
    return rows


def sweep_attenuation(
    params: SystemParams,
    atten_grid: Sequence[float],
    m_list: Sequence[float],
    ratio: float | None = None,
    workers: int | None = 1,
) -> list[SweepRow]:
    """
    Asymptotic and finite-size key-rate rows over the attenuation grid.

    `ratio` defaults to (N - m_pe) / N of params. `workers` > 1 (or None for
    the CPU count) evaluates grid points in parallel.
    """
    grid = [float(a) for a in atten_grid]
    if not grid:
        raise SweepError("attenuation grid is empty")
    if any(a < 0 or math.isnan(a) for a in grid):
        raise SweepError("attenuations must be >= 0 dB")
    if any(not m >= 1 for m in m_list):
        raise SweepError("every m must be >= 1")
    ratio = params.key_ratio if ratio is None else ratio

    n = len(grid)
    args = ([params] * n, grid, [list(m_list)] * n, [ratio] * n)
    if workers == 1:
        chunks = list(map(_grid_point, *args))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_grid_point, *args))

    rows = [row for chunk in chunks for row in chunk]
    logger.info(f"[Sweep] {n} attenuations x {1 + len(m_list)} regimes -> {len(rows)} rows")
    return rows


def zero_crossing(rows: Sequence[SweepRow], regime: str, m: float | None = None) -> float | None:
    """First attenuation at which the selected curve's SKR reaches zero, if any."""
    picked = [r for r in rows if r.regime == regime and (m is None or r.m == m)]
    for row in sorted(picked, key=lambda r: r.atten_db):
        if row.skr_bps <= 0.0:
            return row.atten_db
    return None


def log_m_grid(start: float, stop: float, points_per_decade: int) -> np.ndarray:
    """Logarithmic grid of m values, both ends included."""
    if not (start >= 1 and stop >= start):
        raise SweepError(f"invalid m range [{start}, {stop}]")
    if points_per_decade < 1:
        raise SweepError("points_per_decade must be >= 1")
    decades = math.log10(stop) - math.log10(start)
    count = int(round(decades * points_per_decade)) + 1
    return np.logspace(math.log10(start), math.log10(stop), count)
