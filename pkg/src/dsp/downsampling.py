"""
Energy-maximizing downsampler.

The sampling phase is k* = argmax_k sum_n |s[k + n sps]|^2 with ties going
to the smallest k. Block sources (e.g. TraceSynthesizer) are read twice:
once to accumulate the per-phase energy, once to pick the samples.
"""
from typing import Iterable

import numpy as np

from src.errors import TraceError
from src.link.receiver import AcquiredTrace
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)

TraceSource = AcquiredTrace | Iterable[AcquiredTrace]


def _blocks(source: TraceSource) -> Iterable[AcquiredTrace]:
    return [source] if isinstance(source, AcquiredTrace) else source


def _as_slots(block: AcquiredTrace, sps: int) -> np.ndarray:
    samples = block.complex_samples()
    if samples.size % sps:
        raise TraceError(f"block length {samples.size} is not a multiple of {sps}")
    return samples.reshape(-1, sps)


def phase_energy(source: TraceSource, sps: int) -> np.ndarray:
    """Total energy collected at each of the sps sampling phases."""
    energy = np.zeros(sps)
    seen = 0
    for block in _blocks(source):
        slots = _as_slots(block, sps)
        energy += np.sum(slots.real ** 2 + slots.imag ** 2, axis=0)
        seen += slots.shape[0]
    if seen == 0:
        raise TraceError("trace is empty")
    return energy


def sample_at(source: TraceSource, sps: int, phase: int) -> np.ndarray:
    """One complex sample per slot at a fixed sampling phase."""
    if not (0 <= phase < sps):
        raise TraceError(f"sampling phase {phase} outside [0, {sps})")
    parts = [_as_slots(block, sps)[:, phase] for block in _blocks(source)]
    if not parts or sum(p.size for p in parts) == 0:
        raise TraceError("trace is empty")
    return np.concatenate(parts)


def downsample(trace: AcquiredTrace, samples_per_symbol: int) -> tuple[np.ndarray, int]:
    """Returns (one complex value per slot, selected sampling phase)."""
    return downsample_blocks(trace, samples_per_symbol)


def downsample_blocks(source: TraceSource, samples_per_symbol: int) -> tuple[np.ndarray, int]:
    """Two-pass downsampling over a re-iterable block source."""
    if samples_per_symbol < 1:
        raise TraceError(f"samples_per_symbol must be >= 1, got {samples_per_symbol}")
    energy = phase_energy(source, samples_per_symbol)
    phase = int(np.argmax(energy))
    values = sample_at(source, samples_per_symbol, phase)
    logger.info(f"[DSP] sampling phase {phase} selected over {values.size} slots")
    return values, phase
