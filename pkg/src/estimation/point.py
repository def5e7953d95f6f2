"""
Asymptotic parameter estimation from aligned symbol pairs.

Linear model y = t x + z with both quadratures pooled into one regression:
t_hat = sum(x y) / sum(x^2), sigma2_hat = mean((y - t_hat x)^2) per
quadrature, xi_bq_hat = sigma2_hat - v_elec - 1 (unclamped) and
T_hat = 2 t_hat^2 / eta.
"""
import math

import numpy as np

from src.errors import EstimationError, ParameterError
from src.schemas.reports import PointEstimates
from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


def _pooled(symbols) -> np.ndarray:
    symbols = np.asarray(symbols)
    if np.iscomplexobj(symbols):
        return np.concatenate([symbols.real, symbols.imag])
    return symbols.astype(float)


def fit_point(
    alice,
    bob,
    eta: float,
    v_elec: float,
    va: float | None = None,
) -> PointEstimates:
    """
    Point estimates from aligned (alice, bob) pairs.

    Complex inputs contribute both quadratures; real inputs are taken as
    already pooled. v_b_hat is the model reconstruction t_hat^2 va + sigma2_hat
    when Alice's nominal va is given, else Bob's empirical variance.
    """
    x = _pooled(alice)
    y = _pooled(bob)
    if x.shape != y.shape:
        raise EstimationError(f"alice and bob lengths differ: {x.size} vs {y.size}")
    pairs = len(alice)
    if pairs < 2:
        raise EstimationError(f"need at least 2 aligned pairs, got {pairs}")
    sxx = float(np.dot(x, x))
    if sxx == 0.0:
        raise EstimationError("Alice's data has zero variance")

    t_hat = float(np.dot(x, y)) / sxx
    residual = y - t_hat * x
    sigma2_hat = float(np.dot(residual, residual)) / residual.size
    v_b_hat = t_hat ** 2 * va + sigma2_hat if va is not None else float(np.mean(y ** 2))

    point = PointEstimates(
        t_hat=t_hat,
        sigma2_hat=sigma2_hat,
        xi_bq_hat=sigma2_hat - v_elec - 1.0,
        t_channel_hat=2.0 * t_hat ** 2 / eta,
        v_b_hat=v_b_hat,
        m=float(pairs),
    )
    logger.debug(f"[PE] t_hat={t_hat:.6f}, sigma2_hat={sigma2_hat:.6f}, m={pairs}")
    return point


def model_point_estimates(params: SystemParams, t_channel: float | None = None) -> PointEstimates:
    """Noiseless expectation of the estimators at the configured operating point."""
    t_channel = params.t_channel if t_channel is None else t_channel
    t = math.sqrt(params.eta * t_channel / 2.0)
    sigma2 = params.xi_bq + params.v_elec + 1.0
    return PointEstimates(
        t_hat=t,
        sigma2_hat=sigma2,
        xi_bq_hat=params.xi_bq,
        t_channel_hat=t_channel,
        v_b_hat=t ** 2 * params.va + sigma2,
        m=math.inf,
    )


def alice_referred(xi_bq: float, eta: float, t_channel: float) -> float:
    """Excess noise at Alice's output, xi_A = 2 xi_Bq / (eta T)."""
    denominator = eta * t_channel
    if not denominator > 0:
        raise ParameterError(f"eta * t_channel must be > 0, got {denominator}")
    return 2.0 * xi_bq / denominator


def select_pe_subset(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices of the m symbols disclosed for parameter estimation."""
    if not (0 < m <= n):
        raise ParameterError(f"m out of (0, n]: m={m}, n={n}")
    return np.sort(rng.choice(n, size=m, replace=False))


def xi_standard_error(point: PointEstimates) -> float:
    """Standard error of xi_bq_hat, sigma2_hat * sqrt(2 / (2m)) for pooled quadratures."""
    return point.sigma2_hat / math.sqrt(point.m)
