"""
Nested Mach-Zehnder IQ modulator with finite extinction ratio.

Each arm is a push-pull MZI. With drive u (radians from the null point)
its field transmittance is

    t(pi - u) = sin(u/2) - i * eps * cos(u/2),   eps = 10^(-ER/20)

so an ideal arm (ER = inf) is the odd function sin(u/2) and a finite ER
leaks a quadrature term. The two arms are combined with a pi/2 (+ bias
error) phase shift. Outputs are expressed in units of the full-scale
amplitude: drives u_I = u_Q = pi produce 1 + i.
"""
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.errors import ModulatorRangeError, ParameterError, PredistortionError, VoaRangeError
from src.schemas.system_params import SystemParams
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13


class IQModulatorModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    er_top: float = float("inf")
    er_bottom: float = float("inf")
    phase_bias_error: float = 0.0
    er_carver: float = float("inf")
    er_voa_max: float = float("inf")
    full_scale: float = 10.0

    @field_validator("er_top", "er_bottom", "er_carver", "er_voa_max")
    @classmethod
    def _er_non_negative(cls, v: float, info) -> float:
        if not v >= 0:
            raise ValueError(f"{info.field_name} must be >= 0 dB")
        return v

    @field_validator("full_scale")
    @classmethod
    def _positive_scale(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("full_scale must be > 0")
        return v

    @classmethod
    def from_params(cls, params: SystemParams) -> "IQModulatorModel":
        return cls(
            er_top=params.er_top,
            er_bottom=params.er_bottom,
            phase_bias_error=params.phase_bias_error,
            er_carver=params.er_carver,
            er_voa_max=params.er_voa_max,
            full_scale=params.iq_full_scale,
        )

    @property
    def is_ideal(self) -> bool:
        return np.isinf(self.er_top) and np.isinf(self.er_bottom) and self.phase_bias_error == 0.0

    @property
    def bottom_phasor(self) -> complex:
        return complex(np.exp(1j * (np.pi / 2 + self.phase_bias_error)))


def field_imbalance(er: float) -> float:
    """Arm field imbalance r in [0,1) (1 when ideal) from ER = 20 log10((1+r)/(1-r))."""
    if er < 0:
        raise ParameterError(f"extinction ratio must be >= 0 dB, got {er}")
    if np.isinf(er):
        return 1.0
    q = 10.0 ** (er / 20.0)
    return (q - 1.0) / (q + 1.0)


def leakage(er: float) -> float:
    """Residual field at the null point, (1-r)/(1+r) = 10^(-ER/20)."""
    return 0.0 if np.isinf(er) else 10.0 ** (-er / 20.0)


def mzi_transfer(phi, er: float, push_pull: bool = False):
    """
    Field transmittance of a single MZI, (1 + r e^{i phi}) / (1 + r).

    Maximum power transmission is 1 at phi = 0 and the min/max power ratio
    is 10^(-er/10). A push-pull drive removes the common phase e^{i phi/2}.
    """
    r = field_imbalance(er)
    phi = np.asarray(phi, dtype=float)
    t = (1.0 + r * np.exp(1j * phi)) / (1.0 + r)
    if push_pull:
        t = t * np.exp(-0.5j * phi)
    return t


def _arm(u: np.ndarray, er: float) -> np.ndarray:
    """Push-pull arm at drive u from the null point, t(pi - u)."""
    return mzi_transfer(np.pi - u, er, push_pull=True)


def _arm_derivative(u: np.ndarray, eps: float) -> np.ndarray:
    # d/du of sin(u/2) - i eps cos(u/2)
    return 0.5 * np.cos(u / 2.0) + 0.5j * eps * np.sin(u / 2.0)


def modulator_output(drive_i, drive_q, model: IQModulatorModel) -> np.ndarray:
    """Normalized output [t_top + e^{i(pi/2+d)} t_bottom], full-scale units."""
    drive_i = np.asarray(drive_i, dtype=float)
    drive_q = np.asarray(drive_q, dtype=float)
    return _arm(drive_i, model.er_top) + model.bottom_phasor * _arm(drive_q, model.er_bottom)


def _normalized_targets(targets, model: IQModulatorModel) -> np.ndarray:
    z = np.asarray(targets, dtype=complex) / model.full_scale
    over = (np.abs(z.real) > 1.0) | (np.abs(z.imag) > 1.0)
    if np.any(over):
        worst = float(np.max(np.maximum(np.abs(z.real), np.abs(z.imag)))) * model.full_scale
        raise ModulatorRangeError(
            f"{int(np.sum(over))} target(s) exceed the modulator full scale "
            f"{model.full_scale} SNU (largest quadrature {worst:.3f})"
        )
    return z


def ideal_drives(targets, model: IQModulatorModel) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form arcsine drives of the ideal modulator."""
    z = _normalized_targets(targets, model)
    return 2.0 * np.arcsin(z.real), 2.0 * np.arcsin(z.imag)


def predistort(targets, model: IQModulatorModel) -> tuple[np.ndarray, np.ndarray]:
    """
    Drives (u_I, u_Q) that make the modulator reproduce `targets` exactly.

    Vectorized Newton iteration on the 2x2 real system, started from the
    ideal arcsine inversion. Targets the distorted modulator cannot reach
    within one interferometer period raise PredistortionError.
    """
    z = _normalized_targets(targets, model)
    u_i, u_q = 2.0 * np.arcsin(z.real), 2.0 * np.arcsin(z.imag)
    if model.is_ideal:
        return u_i, u_q

    eps_t, eps_b = leakage(model.er_top), leakage(model.er_bottom)
    phasor = model.bottom_phasor
    for iteration in range(NEWTON_MAX_ITER):
        residual = modulator_output(u_i, u_q, model) - z
        if np.max(np.abs(residual), initial=0.0) < NEWTON_TOL:
            break
        d_i = _arm_derivative(u_i, eps_t)
        d_q = phasor * _arm_derivative(u_q, eps_b)
        det = d_i.real * d_q.imag - d_q.real * d_i.imag
        det = np.where(np.abs(det) < 1e-15, 1e-15, det)
        step_i = (residual.real * d_q.imag - d_q.real * residual.imag) / det
        step_q = (d_i.real * residual.imag - residual.real * d_i.imag) / det
        u_i = u_i - step_i
        u_q = u_q - step_q

    residual = np.abs(modulator_output(u_i, u_q, model) - z)
    bad = (residual > 1e-9) | (np.abs(u_i) > np.pi) | (np.abs(u_q) > np.pi)
    if np.any(bad):
        raise PredistortionError(
            f"{int(np.sum(bad))} target(s) lie outside the distorted constellation hull "
            f"(ER {model.er_top}/{model.er_bottom} dB)"
        )
    logger.debug(f"[IQ] predistortion converged after {iteration + 1} Newton steps")
    return u_i, u_q


def iq_modulate(targets, model: IQModulatorModel, predistorted: bool = True) -> np.ndarray:
    """
    Emitted SNU symbols for `targets`.

    With `predistorted` the drives come from `predistort`; otherwise the
    ideal arcsine drives are applied to the (possibly non-ideal) model.
    """
    drives = predistort(targets, model) if predistorted else ideal_drives(targets, model)
    return model.full_scale * modulator_output(*drives, model)


def voa_attenuation(required_db: float, er_voa_max: float) -> float:
    """MZI phase that attenuates by `required_db`; beyond the VOA ER raises VoaRangeError."""
    if required_db < 0:
        raise ParameterError(f"attenuation must be >= 0 dB, got {required_db}")
    if required_db > er_voa_max:
        raise VoaRangeError(
            f"required attenuation {required_db:.2f} dB exceeds VOA extinction ratio {er_voa_max} dB"
        )
    r = field_imbalance(er_voa_max)
    if r == 0.0:
        return 0.0
    power = 10.0 ** (-required_db / 10.0)
    cos_phi = (power * (1.0 + r) ** 2 - 1.0 - r ** 2) / (2.0 * r)
    return float(np.arccos(np.clip(cos_phi, -1.0, 1.0)))


def attenuate_to_va(va: float, output_photons: float, er_voa_max: float) -> tuple[float, float]:
    """
    VOA setting taking the modulator output down to <n> = va/2 per quantum pulse.

    Returns (attenuation in dB, VOA drive phase).
    """
    target_photons = va / 2.0
    if target_photons <= 0:
        # Zero modulation: the VOA sits at its extinction point.
        return er_voa_max, voa_attenuation(er_voa_max, er_voa_max)
    required_db = 10.0 * np.log10(output_photons / target_photons)
    if required_db < 0:
        raise VoaRangeError(
            f"modulator delivers {output_photons} photons, fewer than the required {target_photons:.3f}"
        )
    return float(required_db), voa_attenuation(float(required_db), er_voa_max)


def transmit(targets, params: SystemParams) -> np.ndarray:
    """
    Emitted quantum symbols for Alice's targets under the configured impairments.

    Runs predistortion (or ideal drives when disabled), the IQ transfer and
    the VOA range check.
    """
    model = IQModulatorModel.from_params(params)
    emitted = iq_modulate(targets, model, predistorted=params.predistortion)
    required_db, _ = attenuate_to_va(params.va, params.iq_output_photons, params.er_voa_max)

    targets = np.asarray(targets, dtype=complex)
    distortion = float(np.mean(np.abs(emitted - targets) ** 2) / 2.0) if targets.size else 0.0
    logger.info(
        f"[TX] {targets.size} symbols modulated (predistortion={params.predistortion}), "
        f"VOA {required_db:.2f} dB, residual distortion {distortion:.3e} SNU"
    )
    return emitted
