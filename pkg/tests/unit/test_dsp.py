"""
Tests for the DSP chain: downsampling, normalization, phase recovery and synchronization.
"""
import numpy as np
import pytest

from src.dsp.chain import dsp_excess_noise, run_dsp
from src.dsp.downsampling import downsample, downsample_blocks, phase_energy, sample_at
from src.dsp.normalization import normalize_snu, quadrature_variance
from src.dsp.phase_recovery import correct_and_strip, recover_phase, separate
from src.dsp.synchronization import (
    align,
    fold,
    pattern_correlation,
    resolve_reference_sign,
    synchronize,
)
from src.errors import (
    CalibrationError,
    EmptyFrameError,
    ParameterError,
    ReferenceFloorError,
    SyncError,
    TraceError,
)
from src.link.channel import ChannelModel, propagate
from src.link.receiver import AcquiredTrace, DetectorModel, TraceSynthesizer, heterodyne_measure
from src.transmitter.symbols import cycle_pattern, cycled_frame, draw_symbols, reference_signs

pytestmark = pytest.mark.unit


def _trace(samples: np.ndarray, sps: int) -> AcquiredTrace:
    return AcquiredTrace(samples.real.copy(), samples.imag.copy(), 1e9, sps)


def _received_frame(rng, period=256, n=1024, offset=0, linewidth=20e3, t_channel=0.624, xi=0.146):
    """Pattern plus heterodyne readouts of a cycled frame at a reference-link point."""
    pattern = draw_symbols(period, 2.778, rng)
    frame = cycled_frame(pattern, n, offset, rho=342.6, va=2.778)
    channel = ChannelModel(t_channel=t_channel, linewidth_total=linewidth, xi_alice=xi, slot_duration=62.5e-9)
    received, phases = propagate(frame.slots, channel, rng)
    detector = DetectorModel(eta=0.296, v_elec=0.013, samples_per_symbol=125, filter_bw=50e6, sample_rate=2e9)
    return pattern, received, phases, detector


class TestDownsampling:

    @pytest.mark.parametrize("planted", range(8))
    def test_recovers_planted_phase(self, planted, rng):
        """Energy sits at one phase only; every phase is found."""
        slots = rng.normal(size=50) + 1j * rng.normal(size=50)
        samples = np.zeros((50, 8), dtype=complex)
        samples[:, planted] = slots
        values, phase = downsample(_trace(samples.ravel(), 8), 8)
        assert phase == planted
        np.testing.assert_array_equal(values, slots)

    def test_ties_go_to_smallest_phase(self):
        values, phase = downsample(_trace(np.zeros(32, dtype=complex), 8), 8)
        assert phase == 0
        assert values.size == 4

    def test_block_source_matches_concatenated_trace(self, rng):
        detector = DetectorModel(eta=0.3, v_elec=0.01, samples_per_symbol=125, filter_bw=50e6, sample_rate=2e9)
        source = TraceSynthesizer(rng.normal(size=300) + 0j, detector, 11.7e-9, seed=11, block_slots=64)
        blocks_values, blocks_phase = downsample_blocks(source, 125)
        whole_values, whole_phase = downsample(source.collect(), 125)
        assert blocks_phase == whole_phase
        np.testing.assert_array_equal(blocks_values, whole_values)

    def test_synthesized_pulse_sampled_at_peak(self, rng):
        detector = DetectorModel(eta=0.3, v_elec=0.0, samples_per_symbol=125, filter_bw=50e6, sample_rate=2e9)
        source = TraceSynthesizer(rng.normal(size=100) + 0j, detector, 11.7e-9, seed=12)
        _, phase = downsample_blocks(source, 125)
        assert phase == source.peak_index

    def test_energy_per_phase(self):
        samples = np.tile(np.array([1, 2, 0, 0], dtype=complex), 3)
        np.testing.assert_allclose(phase_energy(_trace(samples, 4), 4), [3, 12, 0, 0])

    def test_phase_out_of_range(self):
        with pytest.raises(TraceError):
            sample_at(_trace(np.zeros(8, dtype=complex), 4), 4, 4)

    def test_empty_trace(self):
        with pytest.raises(TraceError):
            downsample(_trace(np.zeros(0, dtype=complex), 4), 4)


class TestNormalization:

    def _record(self, std: float) -> np.ndarray:
        return std * np.array([1, -1, 1, -1]) * (1 + 1j)

    def test_scale_and_calibration_constants(self):
        """sigma2_0_hat - v_elec_hat = 1 after normalization."""
        result = normalize_snu(np.array([3.0 + 0j]), self._record(np.sqrt(2.0)), self._record(np.sqrt(0.5)))
        assert result.scale == pytest.approx(1 / np.sqrt(1.5))
        assert result.sigma2_0_hat == pytest.approx(4.0 / 3.0)
        assert result.v_elec_hat == pytest.approx(1.0 / 3.0)
        assert result.sigma2_0_hat - result.v_elec_hat == pytest.approx(1.0)
        assert result.values[0] == pytest.approx(3.0 / np.sqrt(1.5))
        assert result.m_calib == 4

    def test_without_electronic_record(self):
        result = normalize_snu(np.ones(2, dtype=complex), self._record(2.0))
        assert result.scale == pytest.approx(0.5)
        assert result.v_elec_hat == 0.0

    def test_twice_is_rejected(self):
        once = normalize_snu(np.ones(2, dtype=complex), self._record(1.0))
        with pytest.raises(CalibrationError, match="twice"):
            normalize_snu(once, self._record(1.0))

    def test_degenerate_record(self):
        with pytest.raises(CalibrationError, match="degenerate"):
            normalize_snu(np.ones(2, dtype=complex), self._record(1.0), self._record(1.0))

    def test_empty_record(self):
        with pytest.raises(CalibrationError):
            quadrature_variance(np.array([], dtype=complex))


class TestSeparate:

    def test_quantum_first(self):
        slots = np.array([0.1, 10, -0.2, -10, 0.3, 10])
        quantum, refs, start = separate(slots)
        assert start == 0
        np.testing.assert_array_equal(quantum, [0.1, -0.2, 0.3])
        np.testing.assert_array_equal(refs, [10, -10, 10])

    def test_reference_first_and_trailing_slot(self):
        slots = np.array([10, 0.1, -10, 0.2, 10])
        quantum, refs, start = separate(slots)
        assert start == 1
        np.testing.assert_array_equal(quantum, [0.1, 0.2])
        np.testing.assert_array_equal(refs, [-10, 10])

    def test_too_short(self):
        with pytest.raises(EmptyFrameError):
            separate(np.array([1.0]))


class TestPhaseRecovery:

    def test_constant_phase(self):
        signs = reference_signs(10)
        refs = 20.0 * signs * np.exp(0.3j)
        track = recover_phase(refs, signs, n_quantum=10)
        np.testing.assert_allclose(track.ref_phases, 0.3)
        np.testing.assert_allclose(track.quantum_phases, 0.3)

    def test_linear_ramp_interpolated_exactly(self):
        """Quantum k sits between references k-1 and k; a ramp is reproduced, edges extrapolated."""
        slope = 0.01
        signs = reference_signs(20)
        positions = 2 * np.arange(20) + 1
        refs = 5.0 * signs * np.exp(1j * slope * positions)
        track = recover_phase(refs, signs, interpolation="linear", n_quantum=20)
        np.testing.assert_allclose(track.quantum_phases, slope * 2 * np.arange(20), atol=1e-12)

    def test_hold(self):
        signs = reference_signs(3)
        refs = signs * np.exp(1j * np.array([0.1, 0.2, 0.3]))
        track = recover_phase(refs, signs, interpolation="hold", n_quantum=3)
        # quantum 0 precedes every reference and takes the first one
        np.testing.assert_allclose(track.quantum_phases, [0.1, 0.1, 0.2])

    def test_unwrapping_across_pi(self):
        signs = reference_signs(50)
        phases = 0.2 * np.arange(50)
        track = recover_phase(10 * signs * np.exp(1j * phases), signs, n_quantum=50)
        np.testing.assert_allclose(track.ref_phases, phases, atol=1e-12)

    def test_weak_reference_flagged(self):
        signs = reference_signs(5)
        refs = 10.0 * signs * np.exp(0.4j)
        refs[2] = 1e-3
        track = recover_phase(refs, signs, floor=0.1, n_quantum=5)
        assert track.flagged.tolist() == [False, False, True, False, False]
        assert track.ref_phases[2] == pytest.approx(0.4)

    def test_all_references_below_floor(self):
        with pytest.raises(ReferenceFloorError):
            recover_phase(np.zeros(4, dtype=complex), reference_signs(4))

    def test_sign_count_mismatch(self):
        with pytest.raises(ParameterError):
            recover_phase(np.ones(4, dtype=complex), reference_signs(3))

    def test_error_variance_halves_when_rho_doubles(self):
        """Phase error variance scales as 1/|reference|^2, i.e. 1/rho."""
        rng = np.random.default_rng(21)
        n = 20_000
        signs = reference_signs(n)

        def error_variance(amplitude: float) -> float:
            noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            track = recover_phase(amplitude * signs + noise, signs, n_quantum=n)
            return float(np.var(track.ref_phases))

        ratio = error_variance(10.0) / error_variance(10.0 * np.sqrt(2.0))
        assert ratio == pytest.approx(2.0, rel=0.2)

    def test_slot_phases_order(self):
        signs = reference_signs(2)
        track = recover_phase(signs * np.exp(1j * np.array([0.1, 0.3])), signs, n_quantum=2)
        assert track.slot_phases.size == 4
        assert track.slot_phases[1] == pytest.approx(0.1)
        assert track.slot_phases[3] == pytest.approx(0.3)

    def test_correct_and_strip(self):
        slots = np.array([1j, 5j, 2j, 6j])
        corrected = correct_and_strip(slots, np.full(4, np.pi / 2))
        np.testing.assert_allclose(corrected, [1.0, 2.0], atol=1e-12)

    def test_correct_needs_full_track(self):
        with pytest.raises(ParameterError):
            correct_and_strip(np.ones(4, dtype=complex), np.zeros(2))


class TestSynchronization:

    def test_fold(self):
        np.testing.assert_array_equal(fold(np.arange(5) + 0j, 2), [0 + 2 + 4, 1 + 3])

    @pytest.mark.parametrize("offset", [0, 1, 17, 1000, 2039])
    def test_shift_equivariance(self, offset, rng):
        """Bob's symbol n carries pattern entry (n + offset) mod P."""
        pattern = draw_symbols(2040, 2.778, rng)
        bob = 0.304 * cycle_pattern(pattern, 4080, offset)
        bob = bob + np.sqrt(1.04) * (rng.standard_normal(4080) + 1j * rng.standard_normal(4080))
        assert synchronize(pattern, bob) == offset

    def test_polarity_does_not_matter(self, rng):
        pattern = draw_symbols(512, 2.778, rng)
        bob = -cycle_pattern(pattern, 1024, 33)
        assert synchronize(pattern, bob) == 33

    def test_success_rate_at_reference_point(self):
        """At the reference-link SNR at least 999 of 1000 independent trials synchronize."""
        rng = np.random.default_rng(31)
        hits = 0
        for _ in range(1000):
            pattern = draw_symbols(2040, 2.778, rng)
            offset = int(rng.integers(2040))
            bob = 0.304 * cycle_pattern(pattern, 2040, offset)
            bob = bob + np.sqrt(1.04) * (rng.standard_normal(2040) + 1j * rng.standard_normal(2040))
            hits += synchronize(pattern, bob) == offset
        assert hits >= 999

    def test_peak_location(self, rng):
        pattern = draw_symbols(64, 1.0, rng)
        correlation = pattern_correlation(pattern, cycle_pattern(pattern, 128, 5))
        assert int(np.argmax(correlation)) == 5

    def test_noise_only_fails(self, rng):
        pattern = draw_symbols(2040, 2.778, rng)
        noise = rng.standard_normal(4080) + 1j * rng.standard_normal(4080)
        with pytest.raises(SyncError) as info:
            synchronize(pattern, noise)
        assert info.value.exit_code == 3

    def test_too_few_symbols(self, rng):
        with pytest.raises(SyncError, match="period"):
            synchronize(draw_symbols(100, 1.0, rng), np.ones(99, dtype=complex))

    def test_reference_sign(self):
        assert resolve_reference_sign(0) == 1
        assert resolve_reference_sign(7) == -1

    def test_align(self, rng):
        pattern = draw_symbols(10, 1.0, rng)
        alice, bob = align(pattern, np.ones(4, dtype=complex), 3)
        np.testing.assert_array_equal(alice, pattern[[3, 4, 5, 6]])
        np.testing.assert_array_equal(bob, -np.ones(4))


class TestRunDsp:

    @pytest.mark.parametrize("offset", [0, 5])
    def test_symbol_level_chain(self, offset, rng):
        """Aligned Bob symbols are t * Alice + noise with the right polarity."""
        pattern, received, _, detector = _received_frame(rng, offset=offset)
        data = heterodyne_measure(received, detector, rng)
        shot = heterodyne_measure(np.zeros(4096, dtype=complex), detector, rng)
        elec = np.sqrt(0.013) * (rng.standard_normal(4096) + 1j * rng.standard_normal(4096))

        result = run_dsp(data, shot, elec, pattern, 125)
        assert result.offset == offset
        assert result.sign == (1 if offset % 2 == 0 else -1)
        assert result.start == 0
        assert result.sampling_phase is None
        gain = np.real(np.vdot(result.alice_symbols, result.bob_symbols)) / np.vdot(
            result.alice_symbols, result.alice_symbols).real
        assert gain == pytest.approx(np.sqrt(0.296 * 0.624 / 2), rel=0.1)

    def test_trace_level_chain(self, rng):
        pattern, received, _, detector = _received_frame(rng, period=128, n=512, offset=9)
        readouts = heterodyne_measure(received, detector, rng, include_electronic=False)
        data = TraceSynthesizer(readouts, detector, 11.7e-9, seed=1, block_slots=256)
        shot_values = heterodyne_measure(np.zeros(1024, dtype=complex), detector, rng, include_electronic=False)
        shot = TraceSynthesizer(shot_values, detector, 11.7e-9, seed=2)
        elec = TraceSynthesizer(np.zeros(1024, dtype=complex), detector, 11.7e-9, seed=3)

        result = run_dsp(data, shot, elec, pattern, 125, dump_stages=True)
        assert result.offset == 9
        assert result.sampling_phase == data.peak_index
        assert result.sigma2_0_hat - result.v_elec_hat == pytest.approx(1.0)
        assert set(result.stages) == {"post_downsample", "post_correction", "aligned"}
        assert list(result.stages["aligned"].columns) == ["index", "x_a", "p_a", "x_b", "p_b"]
        assert len(result.stages["post_downsample"]) == 1024

    def test_no_stages_by_default(self, rng):
        pattern, received, _, detector = _received_frame(rng)
        data = heterodyne_measure(received, detector, rng)
        shot = heterodyne_measure(np.zeros(2048, dtype=complex), detector, rng)
        assert run_dsp(data, shot, None, pattern, 125).stages == {}

    def test_excess_noise_of_identical_records_is_zero(self, rng):
        alice = draw_symbols(1000, 2.778, rng)
        bob = 0.3 * alice + rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
        assert dsp_excess_noise(alice, bob, bob, 0.296, 0.013) == 0.0
