"""
Fiber channel: loss, Wiener phase walk and excess noise injected at Alice's output.
"""
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)


class ChannelModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_channel: float
    linewidth_total: float = 0.0
    xi_alice: float = 0.0
    slot_duration: float

    @field_validator("t_channel")
    @classmethod
    def _transmittance(cls, v: float) -> float:
        if not (0.0 < v <= 1.0):
            raise ValueError("t_channel out of (0,1]")
        return v

    @field_validator("xi_alice", "linewidth_total")
    @classmethod
    def _non_negative(cls, v: float, info) -> float:
        if v < 0:
            raise ValueError(f"{info.field_name} must be >= 0")
        return v

    @field_validator("slot_duration")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("slot_duration must be > 0")
        return v

    @classmethod
    def from_params(cls, params: SystemParams, excess_noise: bool = True) -> "ChannelModel":
        return cls(
            t_channel=params.t_channel,
            linewidth_total=params.linewidth_total,
            xi_alice=params.xi_a if excess_noise else 0.0,
            slot_duration=params.slot_duration,
        )

    @property
    def phase_step_std(self) -> float:
        """Per-slot phase increment std, sqrt(2 pi linewidth slot_duration)."""
        return float(np.sqrt(2.0 * np.pi * self.linewidth_total * self.slot_duration))


def wiener_phase_walk(
    n_slots: int,
    linewidth: float,
    slot_duration: float,
    rng: np.random.Generator,
    initial_phase: float = 0.0,
    trials: int | None = None,
) -> np.ndarray:
    """
    Random-walk phase, one value per slot, starting at `initial_phase`.

    Increments are N(0, 2 pi linewidth slot_duration). With `trials` the
    result has shape (trials, n_slots), one independent walk per row.
    """
    shape = (n_slots,) if trials is None else (trials, n_slots)
    std = np.sqrt(2.0 * np.pi * linewidth * slot_duration)
    steps = rng.normal(0.0, std, shape)
    steps[..., 0] = 0.0
    return initial_phase + np.cumsum(steps, axis=-1)


def propagate(
    slots: np.ndarray,
    channel: ChannelModel,
    rng: np.random.Generator,
    initial_phase: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Sends slot amplitudes through the channel.

    Means scale by sqrt(T) and rotate by the phase walk; Gaussian noise of
    variance T * xi_alice per quadrature is added. Returns (received slots,
    per-slot phase).
    """
    slots = np.asarray(slots, dtype=complex)
    phases = wiener_phase_walk(len(slots), channel.linewidth_total, channel.slot_duration, rng, initial_phase)
    received = np.sqrt(channel.t_channel) * slots * np.exp(1j * phases)
    if channel.xi_alice > 0:
        sigma = np.sqrt(channel.t_channel * channel.xi_alice)
        received = received + sigma * (rng.standard_normal(len(slots)) + 1j * rng.standard_normal(len(slots)))
    logger.debug(
        f"[Channel] {len(slots)} slots, T={channel.t_channel:.4f}, "
        f"phase step std {channel.phase_step_std:.3e} rad"
    )
    return received, phases
