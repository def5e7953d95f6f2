"""
Tests for the channel and the heterodyne receiver / trace synthesizer.
"""
import numpy as np
import pytest

from src.errors import PulseWidthError, TraceError
from src.link.channel import ChannelModel, propagate, wiener_phase_walk
from src.link.receiver import (
    AcquiredTrace,
    DetectorModel,
    TraceSynthesizer,
    carve_envelope,
    electronic_calibration_trace,
    export_trace,
    heterodyne_measure,
    shot_calibration_trace,
    synthesize_trace,
)
from src.utils.tabular import read_csv

pytestmark = pytest.mark.unit


def _detector(**overrides) -> DetectorModel:
    values = dict(eta=0.296, v_elec=0.013, samples_per_symbol=125, filter_bw=50e6, sample_rate=2e9)
    values.update(overrides)
    return DetectorModel(**values)


class TestChannel:

    def test_identity_channel(self, rng):
        """T = 1, no linewidth, no excess noise leaves the means untouched."""
        channel = ChannelModel(t_channel=1.0, slot_duration=62.5e-9)
        slots = rng.normal(size=50) + 1j * rng.normal(size=50)
        received, phases = propagate(slots, channel, rng)
        np.testing.assert_allclose(received, slots)
        assert np.all(phases == 0)

    def test_amplitude_scaling(self, rng):
        """Means scale by sqrt(0.624) = 0.7899."""
        channel = ChannelModel(t_channel=0.624, slot_duration=62.5e-9)
        received, _ = propagate(np.full(10, 2.0 + 0j), channel, rng)
        np.testing.assert_allclose(np.abs(received), 2.0 * 0.78994, rtol=1e-4)

    def test_phase_increment_statistics(self, rng):
        """Increments are N(0, 2 pi linewidth slot_duration)."""
        walk = wiener_phase_walk(200_001, 20e3, 62.5e-9, rng)
        assert walk[0] == 0.0
        expected = 2 * np.pi * 20e3 * 62.5e-9
        assert np.var(np.diff(walk)) == pytest.approx(expected, rel=0.02)

    def test_trials_shape(self, rng):
        walks = wiener_phase_walk(100, 1e6, 1e-7, rng, initial_phase=0.5, trials=8)
        assert walks.shape == (8, 100)
        assert np.all(walks[:, 0] == 0.5)

    def test_excess_noise_variance(self, rng):
        """Added noise has variance T * xi_alice per quadrature."""
        channel = ChannelModel(t_channel=0.5, xi_alice=0.2, slot_duration=62.5e-9)
        received, _ = propagate(np.zeros(200_000, dtype=complex), channel, rng)
        assert np.var(received.real) == pytest.approx(0.1, rel=0.03)
        assert np.var(received.imag) == pytest.approx(0.1, rel=0.03)

    def test_deterministic_per_seed(self):
        channel = ChannelModel(t_channel=0.6, linewidth_total=20e3, xi_alice=0.1, slot_duration=62.5e-9)
        slots = np.ones(100, dtype=complex)
        a, _ = propagate(slots, channel, np.random.default_rng(3))
        b, _ = propagate(slots, channel, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)

    def test_from_params_refers_noise_to_alice(self, params):
        channel = ChannelModel.from_params(params)
        assert channel.xi_alice == pytest.approx(0.14618, abs=1e-5)
        assert ChannelModel.from_params(params, excess_noise=False).xi_alice == 0.0

    def test_invalid_transmittance(self):
        with pytest.raises(ValueError):
            ChannelModel(t_channel=0.0, slot_duration=1e-9)


class TestHeterodyne:

    def test_mean_scaling(self, rng):
        """Output mean is sqrt(eta/2) times the input mean."""
        detector = _detector()
        out = heterodyne_measure(np.full(100_000, 4.0 + 0j), detector, rng)
        assert np.mean(out.real) == pytest.approx(4.0 * np.sqrt(0.148), abs=0.02)

    def test_noise_variance(self, rng):
        detector = _detector()
        out = heterodyne_measure(np.zeros(200_000, dtype=complex), detector, rng)
        assert np.var(out.real) == pytest.approx(1.013, rel=0.02)
        shot_only = heterodyne_measure(np.zeros(200_000, dtype=complex), detector, rng, include_electronic=False)
        assert np.var(shot_only.imag) == pytest.approx(1.0, rel=0.02)

    def test_detector_from_params(self, params):
        detector = DetectorModel.from_params(params)
        assert detector.sample_rate == 2e9
        assert 0 < detector.filter_pole < 1


class TestEnvelope:

    def test_peak_and_support(self):
        t = np.array([0.0, 5e-9, 11.7e-9, 20e-9])
        env = carve_envelope(t, 11.7e-9)
        assert env[0] == 1.0
        assert env[2] == pytest.approx(0.0, abs=1e-15)
        assert env[3] == 0.0

    def test_half_maximum(self):
        """The raised cosine falls to 1/2 at t = w/2."""
        assert carve_envelope(np.array([5.85e-9]), 11.7e-9)[0] == pytest.approx(0.5)

    def test_extinction_floor(self):
        env = carve_envelope(np.array([30e-9]), 11.7e-9, er_carver=28.5)
        assert env[0] == pytest.approx(10 ** (-28.5 / 20))


class TestAcquiredTrace:

    def test_length_must_match_slots(self):
        with pytest.raises(TraceError):
            AcquiredTrace(np.zeros(10), np.zeros(10), 1e9, 4)

    def test_quadrature_lengths(self):
        with pytest.raises(TraceError):
            AcquiredTrace(np.zeros(8), np.zeros(4), 1e9, 4)

    def test_concatenate(self):
        a = AcquiredTrace(np.ones(4), np.zeros(4), 1e9, 4)
        b = AcquiredTrace(np.zeros(8), np.ones(8), 1e9, 4)
        joined = AcquiredTrace.concatenate([a, b])
        assert joined.n_slots == 3


class TestTraceSynthesizer:

    def test_pulse_too_wide(self, rng):
        with pytest.raises(PulseWidthError):
            TraceSynthesizer(np.zeros(4, dtype=complex), _detector(), 40e-9, seed=1)

    def test_noiseless_peak_recovers_slot_values(self, rng):
        """Without electronic noise the filtered pulse peaks at the slot value."""
        values = rng.normal(size=64) + 1j * rng.normal(size=64)
        source = TraceSynthesizer(values, _detector(v_elec=0.0), 11.7e-9, seed=2)
        samples = source.collect().complex_samples().reshape(-1, 125)
        np.testing.assert_allclose(samples[:, source.peak_index], values, rtol=1e-6, atol=1e-6)

    def test_peak_near_requested_center(self):
        source = TraceSynthesizer(np.ones(4, dtype=complex), _detector(v_elec=0.0), 11.7e-9, seed=3, center=40)
        assert abs(source.peak_index - 40) <= 1

    def test_iteration_is_repeatable(self, rng):
        """Two passes over the source yield identical blocks."""
        values = rng.normal(size=300) + 0j
        source = TraceSynthesizer(values, _detector(), 11.7e-9, seed=4, block_slots=64)
        first = [block.x_samples for block in source]
        second = [block.x_samples for block in source]
        assert len(first) == 5
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)

    def test_block_size_does_not_change_signal(self, rng):
        """Filter state is carried across blocks."""
        values = rng.normal(size=200) + 1j * rng.normal(size=200)
        whole = TraceSynthesizer(values, _detector(v_elec=0.0), 11.7e-9, seed=5, block_slots=200).collect()
        split = TraceSynthesizer(values, _detector(v_elec=0.0), 11.7e-9, seed=5, block_slots=33).collect()
        np.testing.assert_allclose(whole.x_samples, split.x_samples, atol=1e-12)

    def test_electronic_noise_at_peak(self):
        """Sampled at the peak, the electronic record has variance v_elec per quadrature."""
        detector = _detector()
        trace = electronic_calibration_trace(detector, 20_000, np.random.default_rng(6), 11.7e-9)
        source_peak = TraceSynthesizer(np.zeros(1, dtype=complex), detector, 11.7e-9, seed=0).peak_index
        samples = trace.complex_samples().reshape(-1, 125)[:, source_peak]
        assert np.var(samples.real) == pytest.approx(0.013, rel=0.05)

    def test_shot_calibration_variance(self):
        detector = _detector()
        trace = shot_calibration_trace(detector, 20_000, np.random.default_rng(7), 11.7e-9)
        peak = TraceSynthesizer(np.zeros(1, dtype=complex), detector, 11.7e-9, seed=0).peak_index
        samples = trace.complex_samples().reshape(-1, 125)[:, peak]
        assert 0.5 * (np.var(samples.real) + np.var(samples.imag)) == pytest.approx(1.013, rel=0.03)

    def test_calibration_as_source(self, rng):
        source = shot_calibration_trace(_detector(), 10, rng, 11.7e-9, as_source=True)
        assert isinstance(source, TraceSynthesizer)
        assert source.n_slots == 10

    def test_synthesize_trace_shape(self, rng):
        trace = synthesize_trace(np.ones(12, dtype=complex), _detector(), 11.7e-9, rng)
        assert trace.n_slots == 12
        assert trace.x_samples.size == 12 * 125


class TestExportTrace:

    def test_csv(self, rng, tmp_path):
        trace = synthesize_trace(np.ones(3, dtype=complex), _detector(samples_per_symbol=8, sample_rate=128e6,
                                                                    filter_bw=float("inf")),
                                 pulse_width=5e-9, rng=rng)
        path = export_trace(trace, tmp_path / "trace.csv", header=["manifest: t"],
                            calibration={"sigma2_0_hat": 1.013})
        text = path.read_text(encoding="utf-8")
        assert "# sample_rate: 128000000.0" in text
        assert "# sigma2_0_hat: 1.013" in text
        assert len(read_csv(path)) == 24

    def test_npz(self, rng, tmp_path):
        trace = synthesize_trace(np.ones(3, dtype=complex), _detector(), 11.7e-9, rng)
        path = export_trace(trace, tmp_path / "trace.npz")
        with np.load(path) as data:
            np.testing.assert_array_equal(data["x"], trace.x_samples)
            assert int(data["samples_per_symbol"]) == 125
