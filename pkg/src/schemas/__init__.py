from .system_params import SystemParams
from .reports import (
    PointEstimates,
    RunManifest,
    SecurityReport,
    SimulationReport,
    SweepRow,
    WorstCaseEstimates,
    WorstCaseRow,
)

__all__ = [
    'SystemParams',
    'PointEstimates',
    'WorstCaseEstimates',
    'SecurityReport',
    'SimulationReport',
    'SweepRow',
    'WorstCaseRow',
    'RunManifest',
]
