"""
Exception hierarchy for the GMCS CV-QKD toolkit.

Every error carries the process exit code the CLI reports for it, so the
mapping from failure to exit status lives next to the failure itself.

    0  success
    1  other domain error
    2  configuration error (parse, validation, missing file)
    3  synchronization failure
    4  unphysical Gaussian state
"""
from src.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_DOMAIN_ERROR,
    EXIT_SYNC_FAILURE,
    EXIT_UNPHYSICAL_STATE,
)


class GmcsError(Exception):
    """Base class for all toolkit errors."""
    exit_code: int = EXIT_DOMAIN_ERROR


class ConfigError(GmcsError):
    """Config document could not be parsed or violates a parameter invariant."""
    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigFileNotFoundError(ConfigError):
    """The config path given on the command line or in $GMCS_CONFIG does not exist."""

    def __init__(self, path):
        self.path = path
        super().__init__(f"config file not found: {path}")


class ModulatorRangeError(GmcsError):
    """Target amplitude exceeds the IQ modulator dynamic range."""


class PredistortionError(GmcsError):
    """Target lies outside the distorted constellation hull of the modulator."""


class VoaRangeError(GmcsError):
    """Requested attenuation is beyond the VOA extinction ratio."""


class EmptyFrameError(GmcsError):
    """Frame operation needs at least one quantum slot."""


class PulseWidthError(GmcsError):
    """Pulse envelope does not fit in its slot."""


class TraceError(GmcsError):
    """Malformed acquired trace (empty, length not a multiple of samples per symbol)."""


class ReferenceFloorError(GmcsError):
    """Every reference pulse fell below the amplitude floor; no phase can be recovered."""


class SyncError(GmcsError):
    """Cross-correlation peak is not significant enough to trust the pattern offset."""
    exit_code = EXIT_SYNC_FAILURE


class CalibrationError(GmcsError):
    """Shot-noise calibration record is degenerate or normalization applied twice."""


class EstimationError(GmcsError):
    """Parameter estimation precondition failed (too few pairs, zero Alice variance)."""


class UnphysicalStateError(GmcsError):
    """Covariance matrix violates the uncertainty principle (symplectic eigenvalue < 1)."""
    exit_code = EXIT_UNPHYSICAL_STATE


class TrustedDetectorError(UnphysicalStateError):
    """eta = 1 with nonzero electronic noise has no trusted beam-splitter purification."""


class SweepError(GmcsError):
    """Attenuation grid or m list is empty or invalid."""


class ParameterError(GmcsError, ValueError):
    """A numeric argument is outside the domain of the operation."""
