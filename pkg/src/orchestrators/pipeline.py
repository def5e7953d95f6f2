from src.utils.logging_config import setup_logger
logger = setup_logger(__name__)
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.dsp.chain import DspResult, dsp_excess_noise, run_dsp
from src.dsp.phase_recovery import correct_and_strip
from src.estimation.finite_size import finite_size_estimates
from src.estimation.point import alice_referred, fit_point, select_pe_subset, xi_standard_error
from src.link.channel import ChannelModel, propagate
from src.link.receiver import (
    DetectorModel,
    TraceSynthesizer,
    electronic_calibration_trace,
    heterodyne_measure,
    shot_calibration_trace,
)
from src.schemas.reports import SimulationReport
from src.schemas.system_params import SystemParams
from src.security.keyrate import evaluate_key_rate, skr_finite
from src.transmitter.iq_modulator import transmit
from src.transmitter.power_meter import estimate_va_powermeter
from src.transmitter.symbols import SymbolFrame, cycled_frame, draw_symbols

Level = Literal["trace", "symbol"]

# One independent stream per stage, so toggling a stage never reshuffles the others.
_STREAMS = ("pattern", "offset", "channel", "detector", "trace", "shot", "elec", "pe", "meter")


@dataclass
class SimulationOutcome:
    report: SimulationReport
    dsp: DspResult
    frame: SymbolFrame
    true_phases: np.ndarray


def _streams(seed: int) -> dict[str, np.random.SeedSequence]:
    return dict(zip(_STREAMS, np.random.SeedSequence(seed).spawn(len(_STREAMS))))


def _acquire(params: SystemParams, received: np.ndarray, level: Level, seeds: dict):
    """Bob's data and calibration records, oversampled or per slot."""
    detector = DetectorModel.from_params(params)
    n_slots = received.size
    rng_det = np.random.default_rng(seeds["detector"])
    rng_shot = np.random.default_rng(seeds["shot"])
    rng_elec = np.random.default_rng(seeds["elec"])

    if level == "symbol":
        data = heterodyne_measure(received, detector, rng_det)
        shot = heterodyne_measure(np.zeros(n_slots, dtype=complex), detector, rng_shot)
        elec = np.sqrt(detector.v_elec) * (
            rng_elec.standard_normal(n_slots) + 1j * rng_elec.standard_normal(n_slots)
        )
        return data, shot, elec

    readouts = heterodyne_measure(received, detector, rng_det, include_electronic=False)
    data = TraceSynthesizer(readouts, detector, params.pulse_width, seeds["trace"],
                            params.er_carver, block_slots=params.block_slots)
    shot = shot_calibration_trace(detector, n_slots, rng_shot, params.pulse_width,
                                  params.er_carver, as_source=True)
    elec = electronic_calibration_trace(detector, n_slots, rng_elec, params.pulse_width,
                                        params.er_carver, as_source=True)
    return data, shot, elec


def run_simulation(
    params: SystemParams,
    level: Level = "trace",
    excess_noise: bool = True,
    phase_noise: bool = True,
    dump_stages: bool = False,
) -> SimulationOutcome:
    """
    One Monte-Carlo run: transmitter -> channel -> receiver -> DSP -> estimation -> key rates.

    `level="symbol"` skips trace synthesis and downsampling. Disabling
    `excess_noise` or `phase_noise` removes that part of the channel; shot
    and electronic noise always stay. Deterministic for a given params.seed.
    """
    seeds = _streams(params.seed)
    n = params.n_symbols
    period = params.pattern_period
    logger.info(f"[Pipeline] {level}-level run, {n} symbols, seed {params.seed}")

    # 1. Alice: pattern, modulator, frame
    targets = draw_symbols(period, params.va, np.random.default_rng(seeds["pattern"]))
    emitted = transmit(targets, params)
    if params.acquisition_offset is not None:
        offset_true = params.acquisition_offset % period
    else:
        offset_true = int(np.random.default_rng(seeds["offset"]).integers(period))
    frame = cycled_frame(emitted, n, offset_true, params.rho, params.va)
    va_hat = estimate_va_powermeter(frame, params.tap_fraction, params.power_meter_rel_std,
                                    np.random.default_rng(seeds["meter"]))

    # 2. Channel and detection
    channel = ChannelModel.from_params(params, excess_noise=excess_noise)
    if not phase_noise:
        channel = channel.model_copy(update={"linewidth_total": 0.0})
    received, true_phases = propagate(frame.slots, channel, np.random.default_rng(seeds["channel"]))
    data, shot, elec = _acquire(params, received, level, seeds)

    # 3. Bob's DSP
    dsp = run_dsp(
        data, shot, elec, targets, params.samples_per_symbol,
        ref_floor=params.ref_floor,
        sync_threshold=params.sync_threshold,
        interpolation=params.phase_interpolation,
        dump_stages=dump_stages,
    )
    if dsp.offset != offset_true:
        logger.warning(f"[Pipeline] recovered offset {dsp.offset} differs from true offset {offset_true}")

    # Same records corrected with the simulator's phases, polarity known
    usable = dsp.slots[dsp.start:dsp.start + 2 * dsp.bob_symbols.size]
    bob_reference = correct_and_strip(usable, true_phases[dsp.start:dsp.start + usable.size])
    penalty = dsp_excess_noise(dsp.alice_symbols, dsp.bob_symbols, bob_reference, params.eta, dsp.v_elec_hat)

    # 4. Parameter estimation on the disclosed subset
    n_aligned = dsp.bob_symbols.size
    m_sim = min(n_aligned, max(2, round(n_aligned * params.m_pe / params.n_total)))
    pe = select_pe_subset(n_aligned, m_sim, np.random.default_rng(seeds["pe"]))
    point = fit_point(dsp.alice_symbols[pe], dsp.bob_symbols[pe], params.eta, dsp.v_elec_hat, va=va_hat)
    worst = finite_size_estimates(point, va_hat, params.eta, m_sim, dsp.m_calib,
                                  params.epsilon_pe, dsp.sigma2_0_hat)

    # 5. Key rates at the estimates
    t_channel_hat = min(point.t_channel_hat, 1.0)
    asymptotic = evaluate_key_rate(
        va_hat, t_channel_hat, point.xi_bq_hat, dsp.v_elec_hat, params.eta,
        params.beta, params.r_eff, params.key_ratio,
    )
    finite = skr_finite(
        params, point=point, m=m_sim, m_calib=dsp.m_calib, sigma2_0_hat=dsp.sigma2_0_hat,
        ratio=params.key_ratio, va=va_hat, v_elec=dsp.v_elec_hat,
    )

    report = SimulationReport(
        n_symbols=n_aligned,
        n_pe=m_sim,
        level=level,
        offset=dsp.offset,
        offset_true=offset_true,
        sampling_phase=dsp.sampling_phase,
        va_hat=va_hat,
        sigma2_0_hat=dsp.sigma2_0_hat,
        v_elec_hat=dsp.v_elec_hat,
        xi_bq_stderr=xi_standard_error(point),
        dsp_excess_noise=penalty,
        xi_a_hat=alice_referred(point.xi_bq_hat, params.eta, t_channel_hat),
        point=point,
        worst_case=worst,
        asymptotic=asymptotic,
        finite_size=finite,
    )
    logger.info(
        f"[Pipeline] xi_bq_hat={point.xi_bq_hat:.5f} +- {report.xi_bq_stderr:.5f}, "
        f"T_hat={point.t_channel_hat:.4f}, SKR asym {asymptotic.skr:.0f} bps, fs {finite.skr:.0f} bps"
    )
    return SimulationOutcome(report=report, dsp=dsp, frame=frame, true_phases=true_phases)
