#!/usr/bin/env python3
# src/jobs/generate_recording.py

"""
Job `generate`: escenario sintético -> grabación TXCS.

Lee un YAML con un único escenario (mismo esquema que las entradas de
`scenarios` del archivo de experimento, `name` opcional). Opcionalmente
aplica la media móvil y el modelo de ruido, y exporta una copia CSV.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from pathlib import Path
from typing import Optional

# Importaciones de Terceros
import yaml

# Importaciones Locales
from src.base_job import BaseJob
from src.errors import ConfigError
from src.experiment import parse_scenario
from src.grid import DEFAULT_SENSOR_RANGE, Recording, export_csv, write_recording
from src.scenario import NoiseModel, add_noise, generate, smooth


class GenerateRecordingJob(BaseJob):
    """Genera la grabación ground truth de un escenario."""

    def __init__(
        self,
        config_dir: Path,
        spec_path: str | Path,
        out: str | Path,
        env_name: str = "dev",
        smooth_width: int = 1,
        noise_seed: Optional[int] = None,
        csv_out: str | Path | None = None,
    ):
        super().__init__(config_dir, "generate", env_name=env_name)
        self.spec_path = self.require_file(spec_path)
        self.out = self.require_parent(out)
        self.smooth_width = smooth_width
        self.noise_seed = noise_seed
        self.csv_out = self.require_parent(csv_out) if csv_out is not None else None

    def _load_spec(self):
        with open(self.spec_path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError("", f"{self.spec_path}: YAML inválido: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("<root>", "se esperaba un mapeo con el escenario")
        data = dict(data)
        default_range = self.config.get_list("scenario.sensor_range", list(DEFAULT_SENSOR_RANGE))
        sensor_range = tuple(float(v) for v in data.pop("sensor_range", default_range))
        return parse_scenario(data, "<spec>", sensor_range, require_name=False)

    def execute(self) -> Recording:
        name, spec = self._load_spec()
        self.logger.info(f"Escenario '{name}': {spec.kind.value} {spec.shape}, {spec.steps} steps, seed={spec.seed}")
        rec = smooth(generate(spec), self.smooth_width)
        if self.noise_seed is not None:
            noise = NoiseModel.from_config(self.config, range=spec.sensor_range, seed=self.noise_seed)
            self.logger.info(f"Aplicando ruido: sigma_mid={noise.sigma_mid}, seed={noise.seed}")
            rec = add_noise(rec, noise)
        return rec

    def save(self, result: Recording) -> Path:
        write_recording(result, self.out)
        if self.csv_out is not None:
            export_csv(result, self.csv_out)
            self.logger.info(f"Copia CSV: {self.csv_out}")
        return self.out
