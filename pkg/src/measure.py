#!/usr/bin/env python3
# src/measure.py

"""
Operador de medición Scrambled Block Hadamard Ensemble: Φ_H = Q_M W P_N.

- P_N: permutación uniforme de los N taxels (Fisher-Yates sembrado).
- W:   diagonal por bloques con N/B matrices de Hadamard de Sylvester BxB.
- Q_M: selección uniforme de M filas sin reemplazo.

Las entradas quedan en {-1, 0, +1} (sin normalizar por 1/√B) para
modelar la suma en hardware. El generador pseudoaleatorio es PCG64 de
numpy (numpy.random.Generator(PCG64(seed))): permutation() primero,
luego choice(n, m, replace=False); las filas se guardan ordenadas.

Cada bloque de Hadamard corresponde a una cadena (daisy-chain) de B
taxels; dos mediciones comparten todos sus taxels o ninguno.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Protocol

# Importaciones de Terceros
import numpy as np
import pandas as pd
from scipy.linalg import hadamard

# Importaciones Locales
from .errors import DimensionError, ParameterError
from .grid import Frame, MeasurementSet, MeasurementVector, Recording

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 32


class LinearOperator(Protocol):
    """Interfaz mínima que consume el solver: Φx y Φᵀy sobre arrays crudos."""
    n: int
    m: int

    def forward(self, x: np.ndarray) -> np.ndarray: ...

    def adjoint(self, y: np.ndarray) -> np.ndarray: ...


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


def fwht(blocks: np.ndarray) -> np.ndarray:
    """
    Walsh-Hadamard rápida (orden de Sylvester) sobre el último eje.

    Butterfly in-place sobre una copia; O(B log B) por bloque, sin normalizar.
    """
    out = np.array(blocks, dtype=np.float64, copy=True)
    size = out.shape[-1]
    if not _is_power_of_two(size):
        raise ParameterError(f"El tamaño de bloque {size} no es potencia de 2")
    flat = out.reshape(-1, size)
    h = 1
    while h < size:
        view = flat.reshape(flat.shape[0], size // (2 * h), 2, h)
        top = view[:, :, 0, :].copy()
        bottom = view[:, :, 1, :]
        view[:, :, 0, :] += bottom
        view[:, :, 1, :] = top - bottom
        h *= 2
    return flat.reshape(out.shape)


@dataclass(frozen=True, eq=False)
class SbheOperator:
    """Φ_H en forma factorizada. Inmutable una vez construido."""
    n: int
    m: int
    block_size: int
    permutation: np.ndarray
    selected_rows: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        n, m, block = int(self.n), int(self.m), int(self.block_size)
        if not _is_power_of_two(block):
            raise ParameterError(f"block_size={block} no es potencia de 2")
        if n % block != 0:
            raise ParameterError(f"block_size={block} no divide n={n}")
        if not 1 <= m <= n:
            raise ParameterError(f"m={m} fuera de rango (1..{n})")

        perm = np.array(self.permutation, dtype=np.int64, copy=True)
        if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
            raise ParameterError("permutation no es una biyección sobre {0..n-1}")
        rows = np.array(self.selected_rows, dtype=np.int64, copy=True)
        if rows.shape != (m,) or len(np.unique(rows)) != m or rows.min() < 0 or rows.max() >= n:
            raise ParameterError(f"selected_rows debe tener {m} índices distintos en 0..{n - 1}")

        perm.setflags(write=False)
        rows.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "block_size", block)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "selected_rows", rows)

    @property
    def num_blocks(self) -> int:
        return self.n // self.block_size

    def forward(self, x: np.ndarray) -> np.ndarray:
        """y = Φ_H x. Acepta un vector (n,) o un lote (T, n)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n:
            raise DimensionError(f"Se esperaban vectores de longitud {self.n}, recibió {x.shape[-1]}")
        lead = x.shape[:-1]
        scrambled = x[..., self.permutation].reshape(*lead, self.num_blocks, self.block_size)
        mixed = fwht(scrambled).reshape(*lead, self.n)
        return mixed[..., self.selected_rows]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Φ_Hᵀ y. H de Sylvester es simétrica, así que se reutiliza la misma FWHT."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape[-1] != self.m:
            raise DimensionError(f"Se esperaban vectores de longitud {self.m}, recibió {y.shape[-1]}")
        lead = y.shape[:-1]
        spread = np.zeros((*lead, self.n))
        spread[..., self.selected_rows] = y
        mixed = fwht(spread.reshape(*lead, self.num_blocks, self.block_size)).reshape(*lead, self.n)
        out = np.empty_like(mixed)
        out[..., self.permutation] = mixed
        return out

    def to_dense(self) -> np.ndarray:
        """Materializa Φ_H (m x n). Solo para instancias chicas / oráculos de test."""
        w = np.kron(np.eye(self.num_blocks), hadamard(self.block_size))
        dense = np.zeros((self.m, self.n))
        dense[:, self.permutation] = w[self.selected_rows]
        return dense


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Operador explícito (identidad, escalados, oráculos chicos)."""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2:
            raise DimensionError(f"DenseOperator requiere una matriz 2D, recibió {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, n: int) -> "DenseOperator":
        return cls(np.eye(n))

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n(self) -> int:
        return int(self.matrix.shape[1])

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n:
            raise DimensionError(f"Se esperaban vectores de longitud {self.n}, recibió {x.shape[-1]}")
        return x @ self.matrix.T

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if y.shape[-1] != self.m:
            raise DimensionError(f"Se esperaban vectores de longitud {self.m}, recibió {y.shape[-1]}")
        return y @ self.matrix


def build_sbhe(n: int, m: int, block_size: int = DEFAULT_BLOCK_SIZE, seed: int = 0) -> SbheOperator:
    """
    Construye Φ_H determinísticamente a partir de (n, m, B, seed).

    Raises:
        ParameterError: B no es potencia de 2, B no divide n, o m > n.
    """
    if not _is_power_of_two(int(block_size)):
        raise ParameterError(f"block_size={block_size} no es potencia de 2")
    if n % block_size != 0:
        raise ParameterError(f"block_size={block_size} no divide n={n}")
    if not 1 <= m <= n:
        raise ParameterError(f"m={m} fuera de rango (1..{n})")

    rng = np.random.Generator(np.random.PCG64(seed))
    permutation = rng.permutation(n)
    rows = np.sort(rng.choice(n, size=m, replace=False))
    logger.debug(f"SBHE construido: n={n} m={m} B={block_size} seed={seed}")
    return SbheOperator(n, m, block_size, permutation, rows, seed)


def apply(op: LinearOperator, frame: Frame) -> MeasurementVector:
    """y = Φx para un frame."""
    if frame.values.size != op.n:
        raise DimensionError(f"Frame de {frame.values.size} taxels, el operador espera n={op.n}")
    return MeasurementVector(op.forward(frame.values))


def apply_adjoint(op: LinearOperator, y: MeasurementVector) -> np.ndarray:
    """Φᵀy, vector de longitud n."""
    if y.m != op.m:
        raise DimensionError(f"MeasurementVector de longitud {y.m}, el operador espera m={op.m}")
    return op.adjoint(y.values)


def measure_recording(op: LinearOperator, rec: Recording) -> MeasurementSet:
    """Mide todos los frames de una grabación en un solo lote."""
    if rec.shape.n != op.n:
        raise DimensionError(f"Grabación de {rec.shape.n} taxels, el operador espera n={op.n}")
    data = op.forward(rec.data) if rec.steps else np.zeros((0, op.m))
    return MeasurementSet(rec.shape, rec.dt, data, rec.sensor_range)


# ---------------------------
# Reporte de cableado
# ---------------------------

@dataclass(frozen=True)
class WiringReport:
    """Una cadena de B taxels por bloque de Hadamard y las filas medidas en cada una."""
    block_size: int
    chains: List[np.ndarray]
    rows_selected: List[int]

    def to_frame(self) -> pd.DataFrame:
        table = pd.DataFrame(
            np.vstack(self.chains),
            columns=[f"taxel_{k}" for k in range(self.block_size)],
        )
        table.insert(0, "block_id", np.arange(len(self.chains)))
        table["rows_selected"] = self.rows_selected
        return table

    def write_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)


def wiring_report(op: SbheOperator) -> WiringReport:
    """
    Taxels conectados en serie por cada bloque, en el orden en que P_N los
    entrega al bloque, y cantidad de filas de Q_M que caen en él.
    """
    block = op.block_size
    chains = [op.permutation[b * block:(b + 1) * block].copy() for b in range(op.num_blocks)]
    counts = np.bincount(op.selected_rows // block, minlength=op.num_blocks)
    return WiringReport(block, chains, [int(c) for c in counts])
