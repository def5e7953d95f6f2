"""
The offline DSP chain, end to end.

    downsample -> SNU normalization -> separate -> phase recovery
      -> correction -> synchronization -> polarity fix

Inputs are either oversampled traces (AcquiredTrace or a block source) or
per-slot complex readouts, in which case downsampling is skipped.
"""
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

from src.constants import REF_FLOOR, SYNC_THRESHOLD
from src.dsp.downsampling import downsample_blocks, sample_at
from src.dsp.normalization import normalize_snu
from src.dsp.phase_recovery import PhaseTrack, correct_and_strip, recover_phase, separate
from src.dsp.synchronization import align, resolve_reference_sign, synchronize
from src.estimation.point import fit_point
from src.transmitter.symbols import QUANTUM_TAG, REFERENCE_TAG, reference_signs
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


@dataclass
class DspResult:
    alice_symbols: np.ndarray
    bob_symbols: np.ndarray
    offset: int
    phase_track: PhaseTrack
    sign: int
    start: int
    sigma2_0_hat: float
    v_elec_hat: float
    m_calib: int
    slots: np.ndarray | None = None
    sampling_phase: int | None = None
    stages: dict[str, pd.DataFrame] = field(default_factory=dict)


def _readouts(source, sps: int, phase: int | None):
    if isinstance(source, np.ndarray):
        return source, None
    if phase is None:
        return downsample_blocks(source, sps)
    return sample_at(source, sps, phase), phase


def run_dsp(
    data,
    shot_record,
    elec_record,
    alice_pattern: np.ndarray,
    samples_per_symbol: int,
    ref_floor: float = REF_FLOOR,
    sync_threshold: float = SYNC_THRESHOLD,
    interpolation: Literal["linear", "hold"] = "linear",
    dump_stages: bool = False,
) -> DspResult:
    """
    Runs the chain and returns aligned (alice, bob) quantum symbols in SNU.

    Calibration records are sampled at the sampling phase chosen on the data.
    """
    raw, phase = _readouts(data, samples_per_symbol, None)
    shot, _ = _readouts(shot_record, samples_per_symbol, phase)
    elec = None if elec_record is None else _readouts(elec_record, samples_per_symbol, phase)[0]

    normalized = normalize_snu(raw, shot, elec)
    quantum, refs, start = separate(normalized.values)
    slots = normalized.values[start:start + 2 * quantum.size]

    track = recover_phase(refs, reference_signs(refs.size), ref_floor, interpolation, quantum.size)
    corrected = correct_and_strip(slots, track.slot_phases)
    offset = synchronize(alice_pattern, corrected, sync_threshold)
    alice, bob = align(alice_pattern, corrected, offset)

    stages: dict[str, pd.DataFrame] = {}
    if dump_stages:
        tags = np.where(np.arange(normalized.values.size) % 2 == start, QUANTUM_TAG, REFERENCE_TAG)
        stages["post_downsample"] = pd.DataFrame({
            "slot_index": np.arange(normalized.values.size),
            "tag": tags,
            "x": normalized.values.real,
            "p": normalized.values.imag,
        })
        stages["post_correction"] = pd.DataFrame({
            "index": np.arange(corrected.size),
            "x": corrected.real,
            "p": corrected.imag,
            "phase": track.quantum_phases,
        })
        stages["aligned"] = pd.DataFrame({
            "index": np.arange(bob.size),
            "x_a": alice.real,
            "p_a": alice.imag,
            "x_b": bob.real,
            "p_b": bob.imag,
        })

    logger.info(f"[DSP] {bob.size} symbols aligned at offset {offset} (start slot {start})")
    return DspResult(
        alice_symbols=alice,
        bob_symbols=bob,
        offset=offset,
        phase_track=track,
        sign=resolve_reference_sign(offset),
        start=start,
        sigma2_0_hat=normalized.sigma2_0_hat,
        v_elec_hat=normalized.v_elec_hat,
        m_calib=normalized.m_calib,
        slots=normalized.values,
        sampling_phase=phase,
        stages=stages,
    )


def dsp_excess_noise(alice, bob_estimated, bob_reference, eta: float, v_elec: float) -> float:
    """
    Excess noise added by the DSP: xi_hat with estimated phases minus xi_hat
    with the true phases, on the same records.
    """
    estimated = fit_point(alice, bob_estimated, eta, v_elec)
    reference = fit_point(alice, bob_reference, eta, v_elec)
    return estimated.xi_bq_hat - reference.xi_bq_hat
