"""
Gaussian-state formalism in SNU (vacuum covariance = identity).

Quadrature ordering is (x1, p1, x2, p2, ...) with the symplectic form
Omega = diag([[0, 1], [-1, 0]], ...). Two-mode states of the protocol
are kept in X-form [[a I, c Z], [c Z, b I]].
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag
from scipy.special import xlogy

from src.errors import ParameterError, TrustedDetectorError, UnphysicalStateError
from src.estimation.point import alice_referred
from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)

PHYSICALITY_TOL = 1e-9
_Z = np.diag([1.0, -1.0])
_I = np.eye(2)


@dataclass(frozen=True)
class TwoModeCov:
    a: float
    b: float
    c: float

    def matrix(self) -> np.ndarray:
        return np.block([[self.a * _I, self.c * _Z], [self.c * _Z, self.b * _I]])

    def is_physical(self) -> bool:
        try:
            symplectic_eigenvalues(self)
        except UnphysicalStateError:
            return False
        return True


def symplectic_form(n_modes: int) -> np.ndarray:
    return block_diag(*[np.array([[0.0, 1.0], [-1.0, 0.0]])] * n_modes)


def _check_physical(nu: np.ndarray) -> np.ndarray:
    if nu.size and nu.min() < 1.0 - PHYSICALITY_TOL:
        raise UnphysicalStateError(f"symplectic eigenvalue {nu.min():.12f} < 1 violates the uncertainty principle")
    return nu


def xform_symplectic_eigenvalues(cov: TwoModeCov) -> np.ndarray:
    """Closed form nu^2 = (Delta +- sqrt(Delta^2 - 4 D^2)) / 2, descending, unchecked."""
    delta = cov.a ** 2 + cov.b ** 2 - 2.0 * cov.c ** 2
    # Delta^2 - 4 D^2 factored to avoid cancellation near degenerate spectra
    root = abs(cov.a - cov.b) * np.sqrt(max((cov.a + cov.b) ** 2 - 4.0 * cov.c ** 2, 0.0))
    return np.sqrt(np.maximum([(delta + root) / 2.0, (delta - root) / 2.0], 0.0))


def numeric_symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of i Omega Sigma, one per mode, descending, unchecked."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise ParameterError(f"covariance must be a 2n x 2n matrix, got shape {sigma.shape}")
    n_modes = sigma.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n_modes) @ sigma)))[::-1]
    # eigenvalues come in +-nu pairs
    return 0.5 * (moduli[0::2] + moduli[1::2])


def symplectic_eigenvalues(cov: TwoModeCov | np.ndarray) -> np.ndarray:
    """Symplectic spectrum, descending; values below 1 - 1e-9 raise UnphysicalStateError."""
    if isinstance(cov, TwoModeCov):
        return _check_physical(xform_symplectic_eigenvalues(cov))
    return _check_physical(numeric_symplectic_eigenvalues(cov))


def g_entropy(nu):
    """Bosonic entropy g(nu) in bits; g(1) = 0."""
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 1.0 - PHYSICALITY_TOL):
        raise UnphysicalStateError(f"g(nu) needs nu >= 1, got {float(np.min(nu))}")
    nu = np.maximum(nu, 1.0)
    plus, minus = (nu + 1.0) / 2.0, (nu - 1.0) / 2.0
    value = (xlogy(plus, plus) - xlogy(minus, minus)) / np.log(2.0)
    return float(value) if value.ndim == 0 else value


def von_neumann_entropy(cov: TwoModeCov | np.ndarray) -> float:
    return float(np.sum(g_entropy(symplectic_eigenvalues(cov))))


def cov_measured(va: float, t: float, xi_bq: float, v_elec: float, eta: float) -> TwoModeCov:
    """Alice-Bob covariance seen at Bob's heterodyne outputs (one of his two modes)."""
    return TwoModeCov(
        a=va + 1.0,
        b=0.5 * eta * t * va + xi_bq + v_elec + 1.0,
        c=float(np.sqrt(0.5 * eta * t * (va ** 2 + 2.0 * va))),
    )


def cov_channel_output(va: float, t: float, xi_a: float) -> TwoModeCov:
    """Alice-Bob covariance at the channel output, before the trusted detector."""
    return TwoModeCov(
        a=va + 1.0,
        b=t * (va + xi_a) + 1.0,
        c=float(np.sqrt(t * (va ** 2 + 2.0 * va))),
    )


def tmsv(v: float) -> np.ndarray:
    """Two-mode squeezed vacuum of variance v."""
    return TwoModeCov(v, v, float(np.sqrt(max(v ** 2 - 1.0, 0.0)))).matrix()


def trusted_noise_variance(eta: float, v_elec: float) -> float:
    """Ancilla variance v_d = 1 + 2 v_elec / (1 - eta) of the trusted-detector model."""
    if not (0.0 < eta <= 1.0):
        raise ParameterError(f"eta out of (0,1]: {eta}")
    if eta == 1.0:
        if v_elec > 0:
            raise TrustedDetectorError(
                "eta = 1 with v_elec > 0 has no beam-splitter purification; use eta < 1 or v_elec = 0"
            )
        return 1.0
    return 1.0 + 2.0 * v_elec / (1.0 - eta)


def beam_splitter(eta: float) -> np.ndarray:
    """Symplectic matrix of a beam splitter of transmittance eta on two modes."""
    s, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    return np.block([[s * _I, r * _I], [-r * _I, s * _I]])


def heterodyne_condition(sigma: np.ndarray, mode: int) -> np.ndarray:
    """Covariance of the other modes after heterodyning `mode`: rest - C (B + I)^-1 C^T."""
    idx = np.array([2 * mode, 2 * mode + 1])
    rest = np.setdiff1d(np.arange(sigma.shape[0]), idx)
    sigma_b = sigma[np.ix_(idx, idx)]
    coupling = sigma[np.ix_(rest, idx)]
    return sigma[np.ix_(rest, rest)] - coupling @ np.linalg.inv(sigma_b + _I) @ coupling.T


def trusted_detector_state(va: float, t: float, xi_a: float, v_elec: float, eta: float) -> np.ndarray:
    """
    8x8 covariance of (A, B, F, G) after the trusted detector.

    B is the detected mode, F the beam-splitter loss port and G the other
    half of the EPR ancilla of variance v_d injected into F.
    """
    v_d = trusted_noise_variance(eta, v_elec)
    sigma = block_diag(cov_channel_output(va, t, xi_a).matrix(), tmsv(v_d))
    bs = np.eye(8)
    bs[2:6, 2:6] = beam_splitter(eta)
    return bs @ sigma @ bs.T


def mutual_information(va: float, t: float, xi_bq: float, v_elec: float, eta: float) -> float:
    """I_AB = log2(V_B / V_B|A) in bits per symbol (two quadratures)."""
    v_b = cov_measured(va, t, xi_bq, v_elec, eta).b
    v_b_given_a = xi_bq + v_elec + 1.0
    return float(np.log2(v_b / v_b_given_a))


def holevo_bound(va: float, t: float, xi_bq: float, v_elec: float, eta: float) -> float:
    """
    chi_BE = S(E) - S(E|B) with a trusted detector, bits per symbol.

    S(E) is the entropy of the channel-output state Eve purifies; S(E|B)
    that of (A, F, G) after heterodyning Bob's detected mode.
    """
    if not (0.0 < t <= 1.0):
        raise ParameterError(f"t_channel out of (0,1]: {t}")
    xi_a = alice_referred(xi_bq, eta, t)
    s_e = von_neumann_entropy(cov_channel_output(va, t, xi_a))
    conditioned = heterodyne_condition(trusted_detector_state(va, t, xi_a, v_elec, eta), mode=1)
    s_e_given_b = von_neumann_entropy(conditioned)
    return max(0.0, s_e - s_e_given_b)


def detector_model_variance(
    va: float,
    t: float,
    xi_bq: float,
    v_elec: float,
    eta: float,
    n: int,
    rng: np.random.Generator,
) -> float:
    """
    Monte-Carlo of the beam-splitter + ancilla detector; returns the measured
    per-quadrature variance (should match V_B = eta t va / 2 + xi_Bq + v_elec + 1).
    """
    xi_a = alice_referred(xi_bq, eta, t)
    v_d = trusted_noise_variance(eta, v_elec)
    alice = np.sqrt(va) * rng.standard_normal((2, n))
    channel = np.sqrt(t) * alice + np.sqrt(1.0 + t * xi_a) * rng.standard_normal((2, n))
    ancilla = np.sqrt(v_d) * rng.standard_normal((2, n))
    detected = np.sqrt(eta) * channel + np.sqrt(1.0 - eta) * ancilla
    measured = (detected + rng.standard_normal((2, n))) / np.sqrt(2.0)
    return float(np.mean(np.var(measured, axis=1)))
