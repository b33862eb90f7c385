#!/usr/bin/env python3
# src/jobs/sweep_experiment.py

"""
Job `sweep`: barrido de PSNR sobre escenarios × M × iteraciones.

Escribe en el directorio de salida:
- sweep.csv (columnas determinísticas, una fila por configuración),
- psnr_<clave>.csv por configuración si el archivo pide timeseries,
- timing.csv si el archivo pide timing.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from pathlib import Path
from typing import Optional

# Importaciones Locales
from src.base_job import BaseJob
from src.errors import ParameterError
from src.evaluation import SweepResult, run_sweep
from src.experiment import ExperimentConfig


class SweepExperimentJob(BaseJob):
    """Corre el harness de experimentos definido en un YAML."""

    def __init__(
        self,
        config_dir: Path,
        config_path: str | Path,
        out_dir: str | Path,
        env_name: str = "dev",
        jobs: Optional[int] = None,
    ):
        super().__init__(config_dir, "sweep", env_name=env_name)
        self.config_path = self.require_file(config_path)
        self.out_dir = Path(out_dir)
        if self.out_dir.exists() and not self.out_dir.is_dir():
            raise FileExistsError(f"La salida no es un directorio: {self.out_dir}")
        self.jobs = jobs if jobs is not None else self.config.get_int("sweep.jobs", 1)
        if self.jobs < 1:
            raise ParameterError(f"--jobs debe ser >= 1 (recibido {self.jobs})")
        self.experiment: Optional[ExperimentConfig] = None

    def execute(self) -> SweepResult:
        self.experiment = ExperimentConfig.load(self.config_path)
        runs = self.experiment.configurations()
        self.logger.info(
            f"Barrido: {len(self.experiment.scenarios)} escenarios, {len(runs)} configuraciones, "
            f"{self.jobs} worker(s)"
        )
        return run_sweep(self.experiment, jobs=self.jobs)

    def save(self, result: SweepResult) -> Path:
        written = result.write(
            self.out_dir,
            timeseries=self.experiment.timeseries,
            timing=self.experiment.timing or self.config.get_bool("sweep.timing", False),
        )
        self.logger.info(f"{len(written)} archivos escritos en {self.out_dir}")
        return written[0]
