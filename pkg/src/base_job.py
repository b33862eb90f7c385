#!/usr/bin/env python3
# src/base_job.py

"""
Define la clase abstracta base (BaseJob) para todos los subcomandos.

Proporciona funcionalidad común para:
- Carga de configuración (a través de Config).
- Logger con el nombre del job.
- Validación de rutas antes de empezar a trabajar.
- Un método 'run' estandarizado: execute -> save.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional

# Importaciones Locales
from .config_loader import Config


class BaseJob(ABC):
    """Clase base abstracta para todos los jobs del CLI."""

    def __init__(self, config_dir: Path, job_name: str, env_name: str = "dev"):
        """
        Inicializa el job base.

        Args:
            config_dir: Ruta al directorio de configuración (ej. 'config/').
            job_name: Nombre único del job (ej. 'reconstruct').
            env_name: Entorno de ejecución (ej. 'dev', 'prod').
        """
        self.config_dir = config_dir
        self.job_name = job_name
        self.env_name = env_name
        self.config = Config(config_dir, env_name=env_name)
        self.logger = logging.getLogger(job_name)

    # Las rutas se validan en el constructor de cada job, antes de execute()
    def require_file(self, path: str | Path) -> Path:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"No existe el archivo de entrada: {path}")
        return path

    def require_parent(self, path: str | Path) -> Path:
        path = Path(path)
        if not path.parent.is_dir():
            raise FileNotFoundError(f"No existe el directorio de salida: {path.parent}")
        return path

    @abstractmethod
    def execute(self) -> Any:
        """Trabajo principal del job; devuelve lo que save() necesita."""

    @abstractmethod
    def save(self, result: Any) -> Optional[Path]:
        """Escribe las salidas y devuelve la ruta principal."""

    def run(self) -> Optional[Path]:
        """
        Ejecuta el ciclo completo: execute -> save.
        """
        try:
            self.logger.info(f"Iniciando job: {self.job_name}")
            result = self.execute()
            path = self.save(result)
            self.logger.info(f"Salida escrita: {path}")
            return path
        except Exception as e:
            self.logger.error(f"Error fatal en {self.job_name}: {e}", exc_info=True)
            raise
