# tests/helpers.py

"""Helpers de test que no son fixtures."""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from dataclasses import dataclass

# Importaciones de Terceros
import numpy as np

# Importaciones Locales
from src.grid import GridShape
from src.measure import SbheOperator

H4 = np.array([
    [1, 1, 1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
    [1, -1, -1, 1],
], dtype=np.float64)


@dataclass(frozen=True)
class IdentityBasis:
    """Ψ = I sobre una grilla; hashable para el cache de L."""
    shape: GridShape

    def analyze(self, values):
        return np.array(values, dtype=np.float64).reshape(-1)

    def synthesize(self, coeffs):
        return np.array(coeffs, dtype=np.float64).reshape(-1)


def plain_sbhe(n: int, block_size: int) -> SbheOperator:
    """SBHE con permutación identidad y todas las filas: W por bloques."""
    return SbheOperator(n, n, block_size, np.arange(n), np.arange(n))
