"""
Power-meter estimate of the modulation variance on the 90:10 tap arm.

The meter averages the optical power over the whole frame. Each slot is
sampled with a relative Gaussian error, so the reading error shrinks as
1/sqrt(n_slots). Reference pulses have a known amplitude, so their
contribution is removed before converting the remaining mean photon number
to V_A = 2<n>. That removal leaves the reading error scaled up by the
reference share of the power.
"""
from typing import Optional

import numpy as np

from src.errors import EmptyFrameError, ParameterError
from src.transmitter.symbols import SymbolFrame
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


def tap_power(
    frame: SymbolFrame,
    tap_fraction: float,
    rel_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    Mean photons per slot reported by the meter.

    `rel_std` is the relative error of one slot sample; the frame average
    carries rel_std / sqrt(n_slots), drawn from `rng`.
    """
    if frame.n_slots == 0:
        raise EmptyFrameError("frame has no slots")
    if not (0.0 <= rel_std < 1.0):
        raise ParameterError(f"rel_std out of [0,1): {rel_std}")
    reading = tap_fraction * frame.total_photon_number() / frame.n_slots
    if rel_std > 0.0:
        if rng is None:
            raise ParameterError("a noisy power meter needs an rng")
        reading *= 1.0 + rel_std / np.sqrt(frame.n_slots) * rng.standard_normal()
    return reading


def estimate_va_powermeter(
    frame: SymbolFrame,
    tap_fraction: float,
    rel_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """V_A estimate from the tapped average power with the reference contribution removed."""
    if not (0.0 < tap_fraction < 1.0):
        raise ParameterError(f"tap_fraction out of (0,1): {tap_fraction}")
    if frame.n_quantum == 0:
        raise EmptyFrameError("frame has no quantum slots")

    photons_total = tap_power(frame, tap_fraction, rel_std, rng) / tap_fraction * frame.n_slots
    photons_refs = len(frame.ref_signs) * frame.ref_amplitude ** 2 / 4.0
    mean_photons = (photons_total - photons_refs) / frame.n_quantum
    va_hat = max(0.0, 2.0 * mean_photons)
    logger.debug(f"[PowerMeter] <n> = {mean_photons:.5f}, V_A = {va_hat:.5f} SNU (reading std {rel_std:g})")
    return va_hat
