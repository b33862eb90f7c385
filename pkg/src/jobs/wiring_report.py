#!/usr/bin/env python3
# src/jobs/wiring_report.py

"""
Job `wiring-report`: qué taxels van en serie en cada bloque de Hadamard
y cuántas filas de cada bloque se leen.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from pathlib import Path

# Importaciones Locales
from src.base_job import BaseJob
from src.measure import WiringReport, build_sbhe, wiring_report


class WiringReportJob(BaseJob):

    def __init__(
        self,
        config_dir: Path,
        n: int,
        m: int,
        block_size: int,
        seed: int,
        out: str | Path,
        env_name: str = "dev",
    ):
        super().__init__(config_dir, "wiring-report", env_name=env_name)
        self.out = self.require_parent(out)
        self.n = n
        self.m = m
        self.block_size = block_size
        self.seed = seed

    def execute(self) -> WiringReport:
        op = build_sbhe(self.n, self.m, self.block_size, self.seed)
        report = wiring_report(op)
        empty = sum(1 for c in report.rows_selected if c == 0)
        self.logger.info(f"{op.num_blocks} bloques de {self.block_size} taxels; {empty} sin filas seleccionadas")
        return report

    def save(self, result: WiringReport) -> Path:
        result.write_csv(self.out)
        return self.out
