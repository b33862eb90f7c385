#!/usr/bin/env python3
# src/jobs/measure_recording.py

"""
Job `measure`: aplica Φ_H a cada frame de una grabación y guarda los
vectores de medición en un contenedor TXCS (record type 2).
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from pathlib import Path

# Importaciones Locales
from src.base_job import BaseJob
from src.grid import MeasurementSet, read_recording, write_measurements
from src.measure import build_sbhe, measure_recording


class MeasureRecordingJob(BaseJob):
    """Comprime una grabación con un operador SBHE sembrado."""

    def __init__(
        self,
        config_dir: Path,
        rec_path: str | Path,
        m: int,
        block_size: int,
        seed: int,
        out: str | Path,
        env_name: str = "dev",
    ):
        super().__init__(config_dir, "measure", env_name=env_name)
        self.rec_path = self.require_file(rec_path)
        self.out = self.require_parent(out)
        self.m = m
        self.block_size = block_size
        self.seed = seed

    def execute(self) -> MeasurementSet:
        rec = read_recording(self.rec_path)
        op = build_sbhe(rec.shape.n, self.m, self.block_size, self.seed)
        self.logger.info(
            f"Midiendo {rec.steps} frames {rec.shape}: M={self.m}, B={self.block_size}, "
            f"seed={self.seed}, compresión {rec.shape.n / self.m:.2f}:1"
        )
        return measure_recording(op, rec)

    def save(self, result: MeasurementSet) -> Path:
        write_measurements(result, self.out)
        return self.out
