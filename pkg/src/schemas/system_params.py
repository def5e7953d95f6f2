import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src import constants as C


def _unit_interval(name: str, value: float) -> float:
    if not (0.0 < value <= 1.0):  # also rejects nan
        raise ValueError(f"{name} out of (0,1]")
    return value


class SystemParams(BaseModel):
    """
    Every static and dynamic parameter of the operating point plus simulation knobs.

    Immutable after construction. Quantities are SI (Hz, s) or shot-noise
    units (SNU, vacuum quadrature variance = 1). Excess noise is stored per
    quadrature at Bob (xi_bq); xi_b and xi_a are derived views.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    # Static parameters
    v_elec: float = C.V_ELEC
    beta: float = C.BETA
    eta: float = C.ETA
    rho: float = C.RHO
    rep_rate: float = C.REP_RATE
    quantum_fraction: float = C.QUANTUM_FRACTION
    epsilon_pe: float = C.EPSILON_PE

    # Dynamic parameters
    va: float = C.VA
    xi_bq: float = C.XI_BQ
    t_channel: float = C.T_CHANNEL

    # Finite-size record sizes
    n_total: int = C.N_TOTAL
    m_pe: int = C.M_PE
    m_calib: int = C.M_CALIB

    # Acquisition
    pulse_width: float = C.PULSE_WIDTH
    samples_per_symbol: int = C.SAMPLES_PER_SYMBOL
    filter_bw: float = C.FILTER_BW
    linewidth_total: float = C.LINEWIDTH_TOTAL
    seed: int = C.SEED

    # Transmitter
    pattern_period: int = C.PATTERN_PERIOD
    tap_fraction: float = C.POWER_METER_TAP
    power_meter_rel_std: float = C.POWER_METER_REL_STD
    er_top: float = C.ER_TOP_DB
    er_bottom: float = C.ER_BOTTOM_DB
    phase_bias_error: float = 0.0
    er_carver: float = C.ER_CARVER_DB
    er_voa_max: float = C.ER_VOA_MAX_DB
    iq_full_scale: float = C.IQ_FULL_SCALE
    iq_output_photons: float = C.IQ_OUTPUT_PHOTONS
    predistortion: bool = True

    # Monte-Carlo / DSP knobs
    n_symbols: int = C.N_SYMBOLS
    block_slots: int = C.BLOCK_SLOTS
    ref_floor: float = C.REF_FLOOR
    sync_threshold: float = C.SYNC_THRESHOLD
    phase_interpolation: Literal["linear", "hold"] = "linear"
    acquisition_offset: Optional[int] = None

    @field_validator("v_elec", "va", "xi_bq")
    @classmethod
    def _non_negative_variance(cls, v: float, info) -> float:
        if not math.isfinite(v):
            raise ValueError(f"{info.field_name} must be finite, got {v}")
        if v < 0:
            raise ValueError(f"{info.field_name} must be >= 0 SNU")
        return v

    @field_validator("eta", "beta", "t_channel", "quantum_fraction")
    @classmethod
    def _in_unit_interval(cls, v: float, info) -> float:
        return _unit_interval(info.field_name, v)

    @field_validator("epsilon_pe", "tap_fraction")
    @classmethod
    def _open_unit_interval(cls, v: float, info) -> float:
        if not (0.0 < v < 1.0):
            raise ValueError(f"{info.field_name} out of (0,1)")
        return v

    @field_validator("rho", "rep_rate", "pulse_width", "filter_bw", "iq_full_scale",
                     "iq_output_photons", "sync_threshold")
    @classmethod
    def _positive(cls, v: float, info) -> float:
        if not math.isfinite(v):
            raise ValueError(f"{info.field_name} must be finite, got {v}")
        if not v > 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return v

    @field_validator("linewidth_total", "phase_bias_error")
    @classmethod
    def _finite(cls, v: float, info) -> float:
        if not math.isfinite(v):
            raise ValueError(f"{info.field_name} must be finite, got {v}")
        if info.field_name == "linewidth_total" and v < 0:
            raise ValueError("linewidth_total must be >= 0")
        return v

    @field_validator("er_top", "er_bottom", "er_carver", "er_voa_max")
    @classmethod
    def _extinction_ratio(cls, v: float, info) -> float:
        # inf is the ideal interferometer
        if math.isnan(v) or v < 0:
            raise ValueError(f"{info.field_name} must be >= 0 dB, got {v}")
        return v

    @field_validator("n_total", "m_pe", "m_calib")
    @classmethod
    def _positive_count(cls, v: int, info) -> int:
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1")
        return v

    @field_validator("samples_per_symbol")
    @classmethod
    def _enough_samples(cls, v: int) -> int:
        if v < 4:
            raise ValueError("samples_per_symbol must be >= 4")
        return v

    @field_validator("seed")
    @classmethod
    def _seed_64bit(cls, v: int) -> int:
        if not (0 <= v < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @field_validator("pattern_period", "block_slots")
    @classmethod
    def _even_count(cls, v: int, info) -> int:
        # Reference signs alternate, so an odd cycle would flip them every period.
        if v < 2 or v % 2:
            raise ValueError(f"{info.field_name} must be an even integer >= 2")
        return v

    @field_validator("power_meter_rel_std")
    @classmethod
    def _relative_std(cls, v: float) -> float:
        if not (0.0 <= v < 1.0):
            raise ValueError(f"power_meter_rel_std out of [0,1): {v}")
        return v

    @field_validator("ref_floor")
    @classmethod
    def _floor_fraction(cls, v: float) -> float:
        if not (0.0 <= v < 1.0):
            raise ValueError("ref_floor out of [0,1)")
        return v

    @field_validator("acquisition_offset")
    @classmethod
    def _offset_non_negative(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError("acquisition_offset must be >= 0")
        return v

    @model_validator(mode="after")
    def _cross_field(self) -> "SystemParams":
        if not (0 < self.m_pe <= self.n_total):
            raise ValueError("m_pe out of (0, n_total]")
        if self.n_symbols < self.pattern_period:
            raise ValueError("n_symbols must be >= pattern_period")
        headroom = C.MODULATOR_HEADROOM * math.sqrt(self.va)
        if headroom > self.iq_full_scale:
            raise ValueError(
                f"iq_full_scale {self.iq_full_scale} SNU is below "
                f"{C.MODULATOR_HEADROOM:g} sqrt(va) = {headroom:.3f} SNU; Gaussian tails would clip"
            )
        return self

    # --- Derived quantities ---
    @property
    def r_eff(self) -> float:
        """Effective quantum symbol rate, symbols/s."""
        return self.rep_rate * self.quantum_fraction

    @property
    def sample_rate(self) -> float:
        return self.rep_rate * self.samples_per_symbol

    @property
    def slot_duration(self) -> float:
        return 1.0 / self.rep_rate

    @property
    def xi_b(self) -> float:
        return 2.0 * self.xi_bq

    @property
    def xi_a(self) -> float:
        """Excess noise referred to Alice's output, xi_A = 2 xi_Bq / (eta T)."""
        return 2.0 * self.xi_bq / (self.eta * self.t_channel)

    @property
    def mean_photon_number(self) -> float:
        return self.va / 2.0

    @property
    def key_ratio(self) -> float:
        """(N - m) / N, fraction of symbols left for the key."""
        return (self.n_total - self.m_pe) / self.n_total
