"""
Heterodyne receiver at symbol level and as an oversampled oscilloscope trace.

Symbol level: each slot is read out as sqrt(eta/2) * mean plus shot noise
(variance 1) and electronic noise (variance v_elec) per quadrature.

Trace level: the slot readout (signal plus shot noise) rides on the carved
pulse envelope, white electronic noise is added, and everything passes a
single-pole IIR low-pass at filter_bw. The filter is normalized to unit
gain at the pulse peak and the electronic noise is pre-scaled so that the
per-slot sample at the peak carries exactly v_elec of electronic noise.
The pulse is placed early by the filter lag so the filtered peak lands on
the requested sample.

Traces are produced block-wise by `TraceSynthesizer`; every block draws from
its own child seed and the filter state is carried across blocks, so the
full record can be regenerated bit-identically without holding it in memory.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.signal import lfilter

from src.constants import BLOCK_SLOTS
from src.errors import PulseWidthError, TraceError
from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger
from src.utils.path_utils import ensure_output_dir
from src.utils.tabular import write_csv

logger = setup_logger(__name__)


class DetectorModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: float
    v_elec: float
    samples_per_symbol: int
    filter_bw: float
    sample_rate: float

    @field_validator("eta")
    @classmethod
    def _efficiency(cls, v: float) -> float:
        if not (0.0 < v <= 1.0):
            raise ValueError("eta out of (0,1]")
        return v

    @field_validator("v_elec")
    @classmethod
    def _noise(cls, v: float) -> float:
        if v < 0:
            raise ValueError("v_elec must be >= 0 SNU")
        return v

    @field_validator("samples_per_symbol")
    @classmethod
    def _oversampling(cls, v: int) -> int:
        if v < 4:
            raise ValueError("samples_per_symbol must be >= 4")
        return v

    @classmethod
    def from_params(cls, params: SystemParams) -> "DetectorModel":
        return cls(
            eta=params.eta,
            v_elec=params.v_elec,
            samples_per_symbol=params.samples_per_symbol,
            filter_bw=params.filter_bw,
            sample_rate=params.sample_rate,
        )

    @property
    def filter_pole(self) -> float:
        """Pole a = exp(-2 pi f_c / f_s) of the single-pole low-pass (0 means no filtering)."""
        if np.isinf(self.filter_bw):
            return 0.0
        return float(np.exp(-2.0 * np.pi * self.filter_bw / self.sample_rate))


@dataclass(frozen=True)
class AcquiredTrace:
    x_samples: np.ndarray
    p_samples: np.ndarray
    sample_rate: float
    samples_per_symbol: int

    def __post_init__(self):
        if len(self.x_samples) != len(self.p_samples):
            raise TraceError(f"quadrature lengths differ: {len(self.x_samples)} vs {len(self.p_samples)}")
        if len(self.x_samples) % self.samples_per_symbol:
            raise TraceError(
                f"trace length {len(self.x_samples)} is not a multiple of {self.samples_per_symbol} samples per symbol"
            )

    @property
    def n_slots(self) -> int:
        return len(self.x_samples) // self.samples_per_symbol

    def complex_samples(self) -> np.ndarray:
        return self.x_samples + 1j * self.p_samples

    @classmethod
    def concatenate(cls, blocks: Sequence["AcquiredTrace"]) -> "AcquiredTrace":
        if not blocks:
            raise TraceError("no trace blocks to concatenate")
        return cls(
            x_samples=np.concatenate([b.x_samples for b in blocks]),
            p_samples=np.concatenate([b.p_samples for b in blocks]),
            sample_rate=blocks[0].sample_rate,
            samples_per_symbol=blocks[0].samples_per_symbol,
        )


def heterodyne_measure(
    means: np.ndarray,
    detector: DetectorModel,
    rng: np.random.Generator,
    include_electronic: bool = True,
) -> np.ndarray:
    """
    Heterodyne readout of slot means, in SNU.

    Output mean is sqrt(eta/2) times the incoming mean; per-quadrature noise
    is N(0, 1 + v_elec), or N(0, 1) when the electronic part is left to the
    trace synthesizer.
    """
    means = np.asarray(means, dtype=complex)
    variance = 1.0 + (detector.v_elec if include_electronic else 0.0)
    noise = np.sqrt(variance) * (rng.standard_normal(means.shape) + 1j * rng.standard_normal(means.shape))
    return np.sqrt(detector.eta / 2.0) * means + noise


def carve_envelope(t, pulse_width: float, er_carver: float = float("inf")) -> np.ndarray:
    """
    Raised-cosine field envelope with FWHM `pulse_width`, peak 1 at t = 0.

    Outside |t| <= pulse_width the carver leaks 10^(-er/20) in field.
    """
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) <= pulse_width
    envelope = np.where(inside, 0.5 * (1.0 + np.cos(np.pi * t / pulse_width)), 0.0)
    floor = 0.0 if np.isinf(er_carver) else 10.0 ** (-er_carver / 20.0)
    return np.maximum(envelope, floor)


class TraceSynthesizer:
    """
    Deterministic block-wise source of the oversampled receiver trace.

    `slot_values` are per-slot readouts (signal plus shot noise, no
    electronic noise). Iterating twice yields identical blocks.
    """

    def __init__(
        self,
        slot_values: np.ndarray,
        detector: DetectorModel,
        pulse_width: float,
        seed: int | np.random.SeedSequence,
        er_carver: float = float("inf"),
        center: int | None = None,
        block_slots: int = BLOCK_SLOTS,
    ):
        sps = detector.samples_per_symbol
        slot_duration = sps / detector.sample_rate
        if 2.0 * pulse_width > slot_duration:
            raise PulseWidthError(
                f"pulse support 2 x {pulse_width:.3e} s does not fit in a {slot_duration:.3e} s slot"
            )
        if block_slots < 1:
            raise TraceError("block_slots must be >= 1")
        center = sps // 2 if center is None else center
        if not (0 <= center < sps):
            raise TraceError(f"pulse center {center} outside [0, {sps})")

        self.slot_values = np.asarray(slot_values, dtype=complex)
        self.detector = detector
        self.block_slots = block_slots
        self.center = center

        a = detector.filter_pole
        self._den = np.array([1.0, -a])
        raw = self._envelope(center, pulse_width, er_carver)
        lag = int(np.argmax(lfilter([1.0 - a], self._den, raw))) - int(np.argmax(raw))
        self.envelope = self._envelope(center - lag, pulse_width, er_carver)
        filtered = lfilter([1.0 - a], self._den, self.envelope)
        self.peak_gain = float(np.max(filtered))
        self.peak_index = int(np.argmax(filtered))
        self._num = np.array([(1.0 - a) / self.peak_gain])
        self.noise_std = float(np.sqrt(detector.v_elec * self.peak_gain ** 2 * (1.0 + a) / (1.0 - a)))

        seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        n_blocks = max(1, -(-len(self.slot_values) // block_slots))
        self._block_seeds = seed_seq.spawn(n_blocks)
        logger.debug(
            f"[Trace] {len(self.slot_values)} slots in {n_blocks} blocks, peak gain {self.peak_gain:.4f}, "
            f"peak sample {self.peak_index}"
        )

    def _envelope(self, center: int, pulse_width: float, er_carver: float) -> np.ndarray:
        sps = self.detector.samples_per_symbol
        t = (np.arange(sps) - center) / self.detector.sample_rate
        return carve_envelope(t, pulse_width, er_carver)

    @property
    def n_slots(self) -> int:
        return len(self.slot_values)

    def __iter__(self) -> Iterator[AcquiredTrace]:
        state = np.zeros(1, dtype=complex)
        for index, child in enumerate(self._block_seeds):
            rng = np.random.default_rng(child)
            values = self.slot_values[index * self.block_slots:(index + 1) * self.block_slots]
            signal = (values[:, None] * self.envelope[None, :]).ravel()
            if self.noise_std > 0:
                signal = signal + self.noise_std * (
                    rng.standard_normal(signal.size) + 1j * rng.standard_normal(signal.size)
                )
            out, state = lfilter(self._num, self._den, signal, zi=state)
            yield AcquiredTrace(out.real.copy(), out.imag.copy(), self.detector.sample_rate,
                                self.detector.samples_per_symbol)

    def collect(self) -> AcquiredTrace:
        return AcquiredTrace.concatenate(list(self))


def _child_seed(rng: np.random.Generator) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(rng.integers(0, 2**63)))


def synthesize_trace(
    slot_values: np.ndarray,
    detector: DetectorModel,
    pulse_width: float,
    rng: np.random.Generator,
    er_carver: float = float("inf"),
    center: int | None = None,
) -> AcquiredTrace:
    """Full oversampled trace for `slot_values` (see TraceSynthesizer)."""
    return TraceSynthesizer(slot_values, detector, pulse_width, _child_seed(rng), er_carver, center).collect()


def shot_calibration_trace(
    detector: DetectorModel,
    n_slots: int,
    rng: np.random.Generator,
    pulse_width: float,
    er_carver: float = float("inf"),
    center: int | None = None,
    as_source: bool = False,
) -> AcquiredTrace | TraceSynthesizer:
    """Signal off, LO on: per-slot readout variance 1 + v_elec."""
    shot = heterodyne_measure(np.zeros(n_slots, dtype=complex), detector, rng, include_electronic=False)
    source = TraceSynthesizer(shot, detector, pulse_width, _child_seed(rng), er_carver, center)
    return source if as_source else source.collect()


def electronic_calibration_trace(
    detector: DetectorModel,
    n_slots: int,
    rng: np.random.Generator,
    pulse_width: float,
    er_carver: float = float("inf"),
    center: int | None = None,
    as_source: bool = False,
) -> AcquiredTrace | TraceSynthesizer:
    """Signal and LO off: per-slot readout variance v_elec."""
    source = TraceSynthesizer(np.zeros(n_slots, dtype=complex), detector, pulse_width,
                              _child_seed(rng), er_carver, center)
    return source if as_source else source.collect()


def export_trace(
    trace: AcquiredTrace,
    path: str | Path,
    header: Sequence[str] = (),
    calibration: dict[str, float] | None = None,
) -> Path:
    """
    Writes the trace as `.npz` (by suffix) or CSV (sample_index, x, p).

    The CSV header documents the sample rate and calibration constants.
    """
    path = Path(path)
    calibration = calibration or {}
    if path.suffix == ".npz":
        ensure_output_dir(path.parent)
        np.savez(path, x=trace.x_samples, p=trace.p_samples, sample_rate=trace.sample_rate,
                 samples_per_symbol=trace.samples_per_symbol, **calibration)
        return path

    lines = list(header) + [f"sample_rate: {trace.sample_rate!r}",
                            f"samples_per_symbol: {trace.samples_per_symbol}"]
    lines += [f"{key}: {value!r}" for key, value in calibration.items()]
    frame = pd.DataFrame({
        "sample_index": np.arange(len(trace.x_samples)),
        "x": trace.x_samples,
        "p": trace.p_samples,
    })
    return write_csv(frame, path, lines)
