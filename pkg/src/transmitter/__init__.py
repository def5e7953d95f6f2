from .symbols import (
    SymbolFrame,
    build_frame,
    cycle_pattern,
    cycled_frame,
    draw_symbols,
    export_frame_csv,
    reference_signs,
)
from .iq_modulator import (
    IQModulatorModel,
    attenuate_to_va,
    field_imbalance,
    ideal_drives,
    iq_modulate,
    modulator_output,
    mzi_transfer,
    predistort,
    transmit,
    voa_attenuation,
)
from .power_meter import estimate_va_powermeter

__all__ = [
    'SymbolFrame',
    'build_frame',
    'cycle_pattern',
    'cycled_frame',
    'draw_symbols',
    'export_frame_csv',
    'reference_signs',
    'IQModulatorModel',
    'attenuate_to_va',
    'field_imbalance',
    'ideal_drives',
    'iq_modulate',
    'modulator_output',
    'mzi_transfer',
    'predistort',
    'transmit',
    'voa_attenuation',
    'estimate_va_powermeter',
]
