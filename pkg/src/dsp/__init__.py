from .downsampling import downsample, downsample_blocks, phase_energy, sample_at
from .normalization import NormalizedSymbols, normalize_snu, quadrature_variance
from .phase_recovery import PhaseTrack, correct_and_strip, recover_phase, separate
from .synchronization import align, fold, pattern_correlation, resolve_reference_sign, synchronize
from .chain import DspResult, dsp_excess_noise, run_dsp

__all__ = [
    'downsample',
    'downsample_blocks',
    'phase_energy',
    'sample_at',
    'NormalizedSymbols',
    'normalize_snu',
    'quadrature_variance',
    'PhaseTrack',
    'correct_and_strip',
    'recover_phase',
    'separate',
    'align',
    'fold',
    'pattern_correlation',
    'resolve_reference_sign',
    'synchronize',
    'DspResult',
    'dsp_excess_noise',
    'run_dsp',
]
