"""
Tests for the Gaussian-state formalism, key rates and attenuation sweeps.
"""
import math

import numpy as np
import pytest

from src.config import db_to_transmittance
from src.constants import FIBER_LOSS_DB, SKR_ASYMPTOTIC_FULL, SKR_ASYMPTOTIC_HALF
from src.errors import ParameterError, SweepError, TrustedDetectorError, UnphysicalStateError
from src.schemas.reports import PointEstimates, SweepRow
from src.schemas.system_params import SystemParams
from src.security.gaussian import (
    TwoModeCov,
    cov_channel_output,
    cov_measured,
    detector_model_variance,
    g_entropy,
    heterodyne_condition,
    holevo_bound,
    mutual_information,
    numeric_symplectic_eigenvalues,
    symplectic_eigenvalues,
    tmsv,
    trusted_noise_variance,
    xform_symplectic_eigenvalues,
)
from src.security.keyrate import evaluate_key_rate, skr_asymptotic, skr_finite
from src.security.sweep import attenuation_grid, log_m_grid, sweep_attenuation, zero_crossing

pytestmark = pytest.mark.unit

REFERENCE_POINT = dict(va=2.778, t=0.624, xi_bq=0.0135, v_elec=0.013, eta=0.296)


class TestEntropy:

    def test_vacuum_has_no_entropy(self):
        assert g_entropy(1.0) == pytest.approx(0.0, abs=1e-15)

    def test_known_value(self):
        """g(3) = 2 log2(2) - log2(1) = 2 bits."""
        assert g_entropy(3.0) == pytest.approx(2.0)

    def test_vectorized(self):
        values = g_entropy(np.array([1.0, 3.0]))
        np.testing.assert_allclose(values, [0.0, 2.0], atol=1e-15)

    def test_below_vacuum_rejected(self):
        with pytest.raises(UnphysicalStateError):
            g_entropy(0.5)


class TestSymplecticSpectrum:

    def test_channel_output_matrix(self):
        cov = cov_channel_output(2.778, 0.624, 0.14618)
        assert cov.a == pytest.approx(3.778)
        assert cov.b == pytest.approx(2.82469, abs=1e-4)
        assert cov.c == pytest.approx(2.87794, abs=1e-4)

    def test_channel_output_eigenvalues(self):
        nu = symplectic_eigenvalues(cov_channel_output(2.778, 0.624, 0.14618))
        np.testing.assert_allclose(nu, [2.0942, 1.1409], atol=1e-3)

    def test_closed_form_matches_numeric(self):
        """X-form closed form agrees with the eigenvalues of i Omega Sigma on 1000 random physical states."""
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 1000:
            a, b = rng.uniform(1.0, 10.0, 2)
            c = rng.uniform(-math.sqrt(a * b), math.sqrt(a * b))
            cov = TwoModeCov(a=a, b=b, c=c)
            if np.linalg.eigvalsh(cov.matrix()).min() <= 0 or not cov.is_physical():
                continue
            closed = xform_symplectic_eigenvalues(cov)
            assert closed.min() >= 1.0 - 1e-9
            np.testing.assert_allclose(closed, numeric_symplectic_eigenvalues(cov.matrix()), rtol=0, atol=1e-9)
            checked += 1

    def test_channel_family_matches_numeric(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            cov = cov_channel_output(rng.uniform(0.1, 20.0), rng.uniform(0.01, 1.0), rng.uniform(0.0, 0.5))
            np.testing.assert_allclose(
                xform_symplectic_eigenvalues(cov),
                numeric_symplectic_eigenvalues(cov.matrix()),
                atol=1e-9,
            )

    def test_degenerate_spectrum(self):
        """a = b gives a double eigenvalue sqrt(a^2 - c^2)."""
        cov = TwoModeCov(a=3.0, b=3.0, c=1.0)
        np.testing.assert_allclose(xform_symplectic_eigenvalues(cov), [math.sqrt(8.0)] * 2, rtol=1e-14)

    def test_tmsv_is_pure(self):
        np.testing.assert_allclose(symplectic_eigenvalues(tmsv(5.0)), [1.0, 1.0], atol=1e-8)

    def test_unphysical_state(self):
        cov = TwoModeCov(a=1.0, b=1.0, c=0.5)
        assert not cov.is_physical()
        with pytest.raises(UnphysicalStateError) as info:
            symplectic_eigenvalues(cov)
        assert info.value.exit_code == 4

    def test_odd_dimension_rejected(self):
        with pytest.raises(ParameterError):
            numeric_symplectic_eigenvalues(np.eye(3))

    def test_heterodyne_on_tmsv_leaves_vacuum(self):
        """Heterodyning one half of a TMSV projects the other onto a coherent state."""
        conditioned = heterodyne_condition(tmsv(4.0), mode=1)
        np.testing.assert_allclose(conditioned, np.eye(2), atol=1e-12)


class TestTrustedDetector:

    def test_ancilla_variance(self):
        assert trusted_noise_variance(0.296, 0.013) == pytest.approx(1.0 + 0.026 / 0.704)

    def test_ideal_detector(self):
        assert trusted_noise_variance(1.0, 0.0) == 1.0

    def test_perfect_efficiency_with_noise(self):
        with pytest.raises(TrustedDetectorError) as info:
            trusted_noise_variance(1.0, 0.01)
        assert info.value.exit_code == 4

    def test_measured_variance(self):
        cov = cov_measured(2.778, 0.624, 0.0135, 0.013, 0.296)
        assert cov.b == pytest.approx(1.28305, abs=1e-5)

    def test_beam_splitter_model_reproduces_vb(self):
        """The ancilla model gives V_B within 0.5 %."""
        variance = detector_model_variance(n=500_000, rng=np.random.default_rng(23), **REFERENCE_POINT)
        assert variance == pytest.approx(1.28305, rel=0.005)


class TestKeyRate:

    def test_mutual_information(self):
        assert mutual_information(**REFERENCE_POINT) == pytest.approx(0.32185, abs=1e-4)

    def test_holevo_bound(self):
        assert holevo_bound(**REFERENCE_POINT) == pytest.approx(0.28626, abs=0.002)

    def test_holevo_below_mutual_information(self):
        assert 0.95 * mutual_information(**REFERENCE_POINT) > holevo_bound(**REFERENCE_POINT)

    def test_holevo_rejects_bad_transmittance(self):
        with pytest.raises(ParameterError):
            holevo_bound(2.778, 1.5, 0.0135, 0.013, 0.296)

    def test_reference_rate(self, params):
        """About 156 kbps at (N - m) / N = 1."""
        report = skr_asymptotic(params, 1.0)
        assert report.skr == pytest.approx(SKR_ASYMPTOTIC_FULL, rel=0.15)
        assert report.regime == "asymptotic"

    def test_half_ratio_halves_rate(self, params):
        full = skr_asymptotic(params, 1.0)
        half = skr_asymptotic(params, 0.5)
        assert half.skr == pytest.approx(full.skr / 2.0, rel=1e-12)
        assert half.i_ab == full.i_ab
        assert half.skr == pytest.approx(SKR_ASYMPTOTIC_HALF, rel=0.15)

    def test_ratio_out_of_range(self, params):
        with pytest.raises(ParameterError):
            skr_asymptotic(params, 1.5)

    def test_negative_noise_clamped(self):
        report = evaluate_key_rate(2.778, 0.624, -0.01, 0.013, 0.296, 0.95, 8e6, 1.0)
        assert report.xi_bq == 0.0
        assert report.skr > 0

    def test_zero_transmittance_gives_no_key(self):
        report = evaluate_key_rate(2.778, 0.0, 0.0135, 0.013, 0.296, 0.95, 8e6, 1.0, regime="finite-size")
        assert report.skr == 0.0
        assert report.skr_raw == 0.0

    def test_finite_size_below_asymptotic(self, params):
        asym = skr_asymptotic(params, 1.0)
        for m in (1e6, 1e8, 1e10):
            fs = skr_finite(params, m=m, m_calib=m, ratio=1.0)
            assert fs.skr <= asym.skr
            assert fs.regime == "finite-size"

    def test_finite_size_converges(self, params):
        """At m = 1e12 the finite-size rate is within 1 % of the asymptotic one."""
        asym = skr_asymptotic(params, 1.0)
        fs = skr_finite(params, m=1e12, m_calib=1e12, ratio=1.0)
        assert fs.skr == pytest.approx(asym.skr, rel=0.01)

    def test_default_key_fraction(self, params):
        """Without an explicit ratio, (N - m) / N is used."""
        fs = skr_finite(params)
        assert fs.ratio == pytest.approx(0.5)
        assert fs.n_total == params.n_total
        assert fs.m_pe == params.m_pe
        assert fs.skr < skr_asymptotic(params, 0.5).skr

    def test_transmittance_bound_above_one_clamped(self, params):
        """A point estimate with T_hat > 1 yields T_min clamped to 1 rather than an error."""
        t_hat = 0.45
        point = PointEstimates(
            t_hat=t_hat, sigma2_hat=1.0265, xi_bq_hat=0.0135,
            t_channel_hat=2.0 * t_hat ** 2 / params.eta, v_b_hat=1.3, m=1e6,
        )
        assert point.t_channel_hat > 1.0
        report = skr_finite(params, point=point, m=1e6, m_calib=1e6, ratio=1.0, epsilon_pe=0.4)
        assert report.t_channel == 1.0
        assert math.isfinite(report.chi_be)
        assert report.skr > 0

    def test_m_not_below_n(self, params):
        with pytest.raises(ParameterError):
            skr_finite(params, n_total=100, m=100)


class TestSweep:

    def test_grid_is_inclusive(self):
        grid = attenuation_grid(0.0, 14.0, 0.25)
        assert len(grid) == 57
        assert grid[0] == 0.0
        assert grid[-1] == 14.0
        assert grid[9] == 2.25

    @pytest.mark.parametrize("start,stop,step", [(0.0, 1.0, 0.0), (2.0, 1.0, 0.5)])
    def test_bad_grid(self, start, stop, step):
        with pytest.raises(SweepError):
            attenuation_grid(start, stop, step)

    def test_log_grid(self):
        grid = log_m_grid(1e4, 1e14, 1)
        assert grid.size == 11
        assert grid[0] == pytest.approx(1e4)
        assert grid[-1] == pytest.approx(1e14)

    def test_log_grid_invalid(self):
        with pytest.raises(SweepError):
            log_m_grid(0.0, 1e6, 1)

    def test_row_count(self, params):
        """Each attenuation yields one asymptotic row and one row per m."""
        rows = sweep_attenuation(params, attenuation_grid(0.0, 14.0, 0.25), [1e6, 1e8, 1e10])
        assert len(rows) == 57 * 4
        assert [r.regime for r in rows[:4]] == ["asym", "fs", "fs", "fs"]
        assert [r.m for r in rows[:4]] == [None, 1e6, 1e8, 1e10]

    def test_fiber_loss_point_matches_direct_rate(self):
        params = SystemParams(t_channel=db_to_transmittance(FIBER_LOSS_DB))
        row = sweep_attenuation(params, [FIBER_LOSS_DB], [], ratio=1.0)[0]
        assert row.skr_bps == pytest.approx(skr_asymptotic(params, 1.0).skr, rel=1e-12)
        assert row.skr_bps == pytest.approx(SKR_ASYMPTOTIC_FULL, rel=0.15)

    def test_zero_crossings_ordered(self, params):
        """Larger m reaches zero key at a larger attenuation."""
        rows = sweep_attenuation(params, attenuation_grid(0.0, 14.0, 0.25), [1e6, 1e8, 1e10])

        def crossing(regime, m=None):
            value = zero_crossing(rows, regime, m)
            return math.inf if value is None else value

        assert crossing("fs", 1e6) <= crossing("fs", 1e8) <= crossing("fs", 1e10) <= crossing("asym")

    def test_finite_rows_never_exceed_asymptotic(self, params):
        rows = sweep_attenuation(params, [0.0, 3.0, 6.0], [1e6, 1e10])
        for k in range(0, len(rows), 3):
            asym = rows[k]
            assert all(r.skr_bps <= asym.skr_bps for r in rows[k + 1:k + 3])

    def test_parallel_matches_serial(self, params):
        grid = [0.0, 1.0, 2.0]
        serial = sweep_attenuation(params, grid, [1e8], workers=1)
        parallel = sweep_attenuation(params, grid, [1e8], workers=2)
        assert serial == parallel

    def test_zero_crossing_picks_first_non_positive(self):
        rows = [
            SweepRow(atten_db=a, regime="asym", i_ab_bits=0.1, chi_be_bits=0.1, skr_bps=s)
            for a, s in [(2.0, 0.0), (0.0, 5.0), (1.0, 1.0), (3.0, 0.0)]
        ]
        assert zero_crossing(rows, "asym") == 2.0
        assert zero_crossing(rows, "fs") is None

    @pytest.mark.parametrize("grid,m_list", [([], [1e6]), ([-1.0], [1e6]), ([1.0], [0.5])])
    def test_invalid_inputs(self, params, grid, m_list):
        with pytest.raises(SweepError):
            sweep_attenuation(params, grid, m_list)
