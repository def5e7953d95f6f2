"""
Gaussian symbol generation and the interleaved quantum/reference frame.

Amplitudes are SNU quadratures packed as one complex value x + i p, with
photon number |alpha|^2 = (x^2 + p^2) / 4 so that V_A = 2<n>.
Slots alternate Q, R, Q, R; reference pulses sit on the I axis with signs
alternating +, -, +, - in reference order.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from src.errors import EmptyFrameError, ParameterError
from src.utils.logging_config import setup_logger
from src.utils.tabular import write_csv

logger = setup_logger(__name__)

QUANTUM_TAG = "Q"
REFERENCE_TAG = "R"


def draw_symbols(n: int, va: float, rng: np.random.Generator) -> np.ndarray:
    """Draws n i.i.d. complex symbols, each quadrature N(0, va)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if va < 0:
        raise ParameterError(f"va must be >= 0 SNU, got {va}")
    scale = np.sqrt(va)
    x = rng.normal(0.0, 1.0, n) * scale
    p = rng.normal(0.0, 1.0, n) * scale
    return x + 1j * p


def reference_signs(n: int, first_index: int = 0) -> np.ndarray:
    """Signs of n consecutive references; reference k of the pattern carries (-1)^k."""
    k = np.arange(first_index, first_index + n)
    return np.where(k % 2 == 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class SymbolFrame:
    quantum: np.ndarray
    ref_signs: np.ndarray
    ref_amplitude: float
    pattern_period: int
    va: float
    rho: float
    first_index: int = 0

    @property
    def n_quantum(self) -> int:
        return len(self.quantum)

    @property
    def n_slots(self) -> int:
        return 2 * len(self.quantum)

    @property
    def references(self) -> np.ndarray:
        return self.ref_amplitude * self.ref_signs.astype(float) + 0j

    @property
    def slots(self) -> np.ndarray:
        """Complex amplitude of every slot in transmission order."""
        out = np.empty(self.n_slots, dtype=complex)
        out[0::2] = self.quantum
        out[1::2] = self.references
        return out

    @property
    def tags(self) -> np.ndarray:
        tags = np.empty(self.n_slots, dtype="<U1")
        tags[0::2] = QUANTUM_TAG
        tags[1::2] = REFERENCE_TAG
        return tags

    def total_photon_number(self) -> float:
        """Direct sum of |alpha|^2 over all slots."""
        return float(np.sum(np.abs(self.slots) ** 2) / 4.0)

    def expected_photon_number(self) -> float:
        """n_q <n> (1 + rho) for the nominal modulation variance."""
        return self.n_quantum * (self.va / 2.0) * (1.0 + self.rho)


def build_frame(
    symbols: np.ndarray,
    rho: float,
    pattern_period: int,
    va: float | None = None,
    first_index: int = 0,
) -> SymbolFrame:
    """
    Interleaves quantum symbols with sign-alternating references.

    The reference mean photon number is rho times the quantum one. With
    `va` given the nominal ensemble intensity 2*va is used; otherwise the
    empirical mean intensity of `symbols` sets the scale.
    `first_index` is the pattern position of the first symbol, which fixes
    the sign of the first reference.
    """
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.size == 0:
        raise EmptyFrameError("cannot build a frame from an empty symbol list")
    if not rho > 0:
        raise ParameterError(f"rho must be > 0, got {rho}")

    if va is None:
        mean_intensity = float(np.mean(np.abs(symbols) ** 2))
        va = mean_intensity / 2.0
    else:
        mean_intensity = 2.0 * va

    ref_amplitude = float(np.sqrt(rho * mean_intensity))
    return SymbolFrame(
        quantum=symbols,
        ref_signs=reference_signs(len(symbols), first_index),
        ref_amplitude=ref_amplitude,
        pattern_period=pattern_period,
        va=va,
        rho=rho,
        first_index=first_index,
    )


def cycle_pattern(pattern: np.ndarray, n: int, offset: int) -> np.ndarray:
    """n symbols of the cyclic pattern starting at position `offset`."""
    period = len(pattern)
    if period == 0:
        raise EmptyFrameError("pattern is empty")
    return pattern[(offset + np.arange(n)) % period]


def cycled_frame(
    pattern: np.ndarray,
    n: int,
    offset: int,
    rho: float,
    va: float,
) -> SymbolFrame:
    """Frame carrying n symbols of the repeating pattern from `offset` on."""
    symbols = cycle_pattern(pattern, n, offset)
    logger.debug(f"[TX] frame of {n} symbols from pattern offset {offset}")
    return build_frame(symbols, rho, len(pattern), va=va, first_index=offset)


def frame_table(frame: SymbolFrame) -> pd.DataFrame:
    slots = frame.slots
    return pd.DataFrame({
        "slot_index": np.arange(frame.n_slots),
        "tag": frame.tags,
        "x": slots.real,
        "p": slots.imag,
    })


def export_frame_csv(frame: SymbolFrame, path: str | Path, header: Sequence[str] = ()) -> Path:
    """Writes (slot_index, tag, x, p) rows for cross-checking against the DSP output."""
    return write_csv(frame_table(frame), path, header)
