"""
Reference-aided phase recovery.

Slots are interleaved Q, R, Q, R: quantum symbol k sits at slot 2k and
reference k at slot 2k+1. Each reference gives arg(measured * sign); the
estimates are unwrapped and carried to the quantum slots either linearly
(with linear extrapolation at the edges) or by holding the nearest
preceding reference.
"""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.constants import REF_FLOOR
from src.errors import EmptyFrameError, ParameterError, ReferenceFloorError
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)

Interpolation = Literal["linear", "hold"]


@dataclass(frozen=True)
class PhaseTrack:
    ref_phases: np.ndarray
    quantum_phases: np.ndarray
    flagged: np.ndarray

    @property
    def slot_phases(self) -> np.ndarray:
        """Per-slot phase in transmission order (Q, R, Q, R, ...)."""
        n = len(self.quantum_phases) + len(self.ref_phases)
        out = np.empty(n)
        out[0::2] = self.quantum_phases
        out[1::2] = self.ref_phases
        return out


def separate(slots: np.ndarray, quantum_first: bool | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    """
    Splits interleaved slots into (quantum, references, start).

    When `quantum_first` is None the weaker parity is taken as quantum,
    since references are rho times brighter. `start` is the index of the
    first quantum slot; a trailing unpaired slot is dropped.
    """
    slots = np.asarray(slots)
    if slots.size < 2:
        raise EmptyFrameError("need at least one quantum/reference pair")
    if quantum_first is None:
        even = np.mean(np.abs(slots[0::2]) ** 2)
        odd = np.mean(np.abs(slots[1::2]) ** 2)
        quantum_first = bool(even <= odd)
    start = 0 if quantum_first else 1
    usable = slots[start:]
    usable = usable[: 2 * (len(usable) // 2)]
    return usable[0::2], usable[1::2], start


def _linear(positions: np.ndarray, known_pos: np.ndarray, known: np.ndarray) -> np.ndarray:
    if known.size == 1:
        return np.full(positions.shape, known[0])
    out = np.interp(positions, known_pos, known)
    lo = positions < known_pos[0]
    hi = positions > known_pos[-1]
    slope_lo = (known[1] - known[0]) / (known_pos[1] - known_pos[0])
    slope_hi = (known[-1] - known[-2]) / (known_pos[-1] - known_pos[-2])
    out[lo] = known[0] + slope_lo * (positions[lo] - known_pos[0])
    out[hi] = known[-1] + slope_hi * (positions[hi] - known_pos[-1])
    return out


def _hold(positions: np.ndarray, known_pos: np.ndarray, known: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(known_pos, positions, side="right") - 1
    return known[np.clip(idx, 0, known.size - 1)]


def recover_phase(
    refs: np.ndarray,
    signs: np.ndarray,
    floor: float = REF_FLOOR,
    interpolation: Interpolation = "linear",
    n_quantum: int | None = None,
) -> PhaseTrack:
    """
    Phase per reference, unwrapped, and its interpolation to the quantum slots.

    References below `floor` times the median reference magnitude are
    flagged and excluded; their phase is interpolated like a quantum slot.
    """
    refs = np.asarray(refs, dtype=complex)
    signs = np.asarray(signs, dtype=float)
    if refs.size == 0:
        raise EmptyFrameError("no reference pulses")
    if refs.shape != signs.shape:
        raise ParameterError(f"{refs.size} references but {signs.size} signs")
    if interpolation not in ("linear", "hold"):
        raise ParameterError(f"unknown interpolation '{interpolation}'")
    n_quantum = refs.size if n_quantum is None else n_quantum

    magnitude = np.abs(refs)
    flagged = magnitude < floor * np.median(magnitude)
    flagged |= magnitude == 0
    if np.all(flagged):
        raise ReferenceFloorError(f"all {refs.size} references fell below the amplitude floor")
    if np.any(flagged):
        logger.warning(f"[DSP] {int(np.sum(flagged))} reference(s) below floor, interpolated over")

    ref_pos = 2 * np.arange(refs.size) + 1
    good_pos = ref_pos[~flagged]
    good = np.unwrap(np.angle(refs[~flagged] * signs[~flagged]))
    if good.size > 1 and np.max(np.abs(np.diff(good))) > np.pi / 2:
        logger.warning("[DSP] phase step between references approaches pi; unwrapping may slip")

    carry = _linear if interpolation == "linear" else _hold
    ref_phases = np.empty(refs.size)
    ref_phases[~flagged] = good
    if np.any(flagged):
        ref_phases[flagged] = carry(ref_pos[flagged], good_pos, good)
    quantum_phases = carry(2 * np.arange(n_quantum), good_pos, good)
    return PhaseTrack(ref_phases=ref_phases, quantum_phases=quantum_phases, flagged=flagged)


def correct_and_strip(slots: np.ndarray, slot_phases: np.ndarray) -> np.ndarray:
    """Rotates every slot by -phase and keeps the quantum (even) slots."""
    slots = np.asarray(slots, dtype=complex)
    slot_phases = np.asarray(slot_phases, dtype=float)
    if slot_phases.size < slots.size:
        raise ParameterError(f"phase track covers {slot_phases.size} of {slots.size} slots")
    corrected = slots * np.exp(-1j * slot_phases[: slots.size])
    return corrected[0::2]
