"""
Pattern synchronization by circular cross-correlation.

Bob's symbol n carries Alice's pattern entry (n + offset) mod P. Bob's
sequence is folded modulo P and correlated against the pattern with FFTs;
the magnitude peak gives the offset. Magnitude is used because the phase
recovery leaves a pi ambiguity until the offset fixes the reference signs.
"""
import numpy as np

from src.constants import SYNC_THRESHOLD
from src.errors import SyncError
from src.transmitter.symbols import cycle_pattern
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


def fold(symbols: np.ndarray, period: int) -> np.ndarray:
    """Sum of symbols sharing the same index modulo `period`."""
    symbols = np.asarray(symbols, dtype=complex)
    padded = np.zeros(-(-symbols.size // period) * period, dtype=complex)
    padded[: symbols.size] = symbols
    return padded.reshape(-1, period).sum(axis=0)


def pattern_correlation(alice_pattern: np.ndarray, bob_symbols: np.ndarray) -> np.ndarray:
    """|sum_n conj(B[n]) A[(n + d) mod P]| for every candidate offset d."""
    pattern = np.asarray(alice_pattern, dtype=complex)
    folded = fold(bob_symbols, pattern.size)
    return np.abs(np.fft.ifft(np.conj(np.fft.fft(folded)) * np.fft.fft(pattern)))


def synchronize(
    alice_pattern: np.ndarray,
    bob_symbols: np.ndarray,
    threshold: float = SYNC_THRESHOLD,
) -> int:
    """
    Offset of Bob's sequence within Alice's cyclic pattern.

    Raises SyncError when Bob has fewer symbols than one period or when the
    peak over the RMS of the remaining lags is below `threshold`.
    """
    period = len(alice_pattern)
    if len(bob_symbols) < period:
        raise SyncError(f"need at least one pattern period ({period}) of symbols, got {len(bob_symbols)}")

    correlation = pattern_correlation(alice_pattern, bob_symbols)
    offset = int(np.argmax(correlation))
    side = np.delete(correlation, offset)
    rms = float(np.sqrt(np.mean(side ** 2))) if side.size else 0.0
    ratio = float(correlation[offset] / rms) if rms > 0 else float("inf")
    if ratio < threshold:
        raise SyncError(f"correlation peak/side-lobe ratio {ratio:.2f} below threshold {threshold}")
    logger.info(f"[DSP] pattern offset {offset}, peak/side-lobe {ratio:.1f}")
    return offset


def resolve_reference_sign(offset: int) -> int:
    """
    Polarity of Bob's corrected symbols.

    Bob assumes his first reference is positive; the reference after
    pattern entry `offset` actually carries (-1)^offset.
    """
    return 1 if offset % 2 == 0 else -1


def align(alice_pattern: np.ndarray, bob_symbols: np.ndarray, offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Alice's symbols matching Bob's sequence, and Bob's symbols with polarity fixed."""
    bob = np.asarray(bob_symbols) * resolve_reference_sign(offset)
    return cycle_pattern(np.asarray(alice_pattern), len(bob), offset), bob
