#!/usr/bin/env python3
# src/jobs/sparsity_series.py

"""
Job `sparsity`: serie temporal de coeficientes no nulos (nnz) de una
grabación en la base D2 o D4.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from pathlib import Path
from typing import Optional

# Importaciones de Terceros
import numpy as np
import pandas as pd

# Importaciones Locales
from src.base_job import BaseJob
from src.grid import read_recording
from src.transform import DEFAULT_ABS_TOL, WaveletBasis, WaveletKind, sparsity_series, sparsity_stats


class SparsitySeriesJob(BaseJob):
    """Cuenta nnz por time-step y resume media / máximo."""

    def __init__(
        self,
        config_dir: Path,
        rec_path: str | Path,
        basis: str,
        out: str | Path,
        env_name: str = "dev",
        abs_tol: Optional[float] = None,
    ):
        super().__init__(config_dir, "sparsity", env_name=env_name)
        self.rec_path = self.require_file(rec_path)
        self.out = self.require_parent(out)
        self.kind = WaveletKind(basis)
        self.abs_tol = abs_tol if abs_tol is not None else self.config.get_float("sparsity.abs_tol", DEFAULT_ABS_TOL)

    def execute(self) -> np.ndarray:
        rec = read_recording(self.rec_path)
        basis = WaveletBasis(self.kind, rec.shape)
        series = sparsity_series(rec, basis, self.abs_tol)
        stats = sparsity_stats(rec, basis, self.abs_tol, series=series)
        self.logger.info(
            f"nnz {self.kind.value.upper()} (N={stats.n}, {basis.levels} niveles): media {stats.mean:.1f}, "
            f"máximo {stats.max}, media en contacto {stats.contact_mean:.1f} ({stats.contact_steps} steps)"
        )
        return series

    def save(self, result: np.ndarray) -> Path:
        pd.DataFrame({"t": np.arange(result.size), "nnz": result}).to_csv(self.out, index=False)
        return self.out
