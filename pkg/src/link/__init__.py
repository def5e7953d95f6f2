from .channel import ChannelModel, propagate, wiener_phase_walk
from .receiver import (
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

__all__ = [
    'ChannelModel',
    'propagate',
    'wiener_phase_walk',
    'AcquiredTrace',
    'DetectorModel',
    'TraceSynthesizer',
    'carve_envelope',
    'electronic_calibration_trace',
    'export_trace',
    'heterodyne_measure',
    'shot_calibration_trace',
    'synthesize_trace',
]
