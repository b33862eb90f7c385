# src/jobs/__init__.py
from .generate_recording import GenerateRecordingJob
from .measure_recording import MeasureRecordingJob
from .reconstruct_recording import ReconstructRecordingJob
from .sparsity_series import SparsitySeriesJob
from .sweep_experiment import SweepExperimentJob
from .wiring_report import WiringReportJob

__all__ = [
    'GenerateRecordingJob',
    'MeasureRecordingJob',
    'ReconstructRecordingJob',
    'SparsitySeriesJob',
    'SweepExperimentJob',
    'WiringReportJob',
]
