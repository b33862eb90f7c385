#!/usr/bin/env python3
# src/transform.py

"""
Bases wavelet ortonormales 2D (Ψ) sobre la grilla de taxels.

- D2 (Haar): forward e inverse multinivel, O(N).
- D4 (Daubechies de 4 taps): solo forward, para comparar esparsidad.

Ambas usan PyWavelets en modo 'periodization' (ortonormal, borde
periódico), nivel por nivel con pywt.dwt2 / pywt.idwt2.

Layout del vector de coeficientes (longitud N):
    [LL más grueso | detalles del nivel más grueso | ... | detalles del más fino]
Cada nivel guarda sus tres bandas en orden (V, H, D), cada una row-major:
V = pasa-bajos en filas y detalle en columnas, H = detalle en filas,
D = detalle en ambas. En 2x2 queda [(a+b+c+d), (a−b+c−d), (a+b−c−d), (a−b−c+d)] / 2.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

# Importaciones de Terceros
import numpy as np
import pywt

# Importaciones Locales
from .errors import DimensionError, ParameterError
from .grid import Frame, GridShape, Recording

# θ = Ψᵀx, longitud N
CoefficientVector = np.ndarray

DEFAULT_ABS_TOL = 1e-9
_MODE = "periodization"


class WaveletKind(str, Enum):
    D2 = "d2"
    D4 = "d4"

    @property
    def pywt_name(self) -> str:
        return {"d2": "haar", "d4": "db2"}[self.value]


def max_levels(shape: GridShape) -> int:
    """Cantidad de divisiones por 2 que comparten rows y cols."""
    levels = 0
    rows, cols = shape.rows, shape.cols
    while rows % 2 == 0 and cols % 2 == 0:
        rows //= 2
        cols //= 2
        levels += 1
    return levels


@dataclass(frozen=True)
class WaveletBasis:
    """Base Ψ sobre una grilla. levels=None usa la descomposición máxima."""
    kind: WaveletKind
    shape: GridShape
    levels: int | None = None
    _wavelet: pywt.Wavelet = field(init=False, repr=False, compare=False)
    # forma de las bandas de detalle, del nivel más fino al más grueso
    _band_shapes: Tuple[Tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = WaveletKind(self.kind)
        object.__setattr__(self, "kind", kind)

        limit = max_levels(self.shape)
        if limit < 1:
            raise ParameterError(f"La grilla {self.shape} no admite ni un nivel diádico")
        levels = limit if self.levels is None else int(self.levels)
        if not 1 <= levels <= limit:
            raise ParameterError(f"levels={levels} fuera de rango para {self.shape} (1..{limit})")
        object.__setattr__(self, "levels", levels)

        # db2 no puede bajar de un bloque de 4 muestras sin solapar el filtro consigo mismo
        pywt_levels = levels
        if kind is WaveletKind.D4:
            cap = pywt.dwt_max_level(min(self.shape.rows, self.shape.cols), kind.pywt_name)
            pywt_levels = max(1, min(levels, cap))

        rows, cols = self.shape.rows, self.shape.cols
        bands = []
        for _ in range(pywt_levels):
            rows, cols = rows // 2, cols // 2
            bands.append((rows, cols))
        object.__setattr__(self, "_wavelet", pywt.Wavelet(kind.pywt_name))
        object.__setattr__(self, "_band_shapes", tuple(bands))

    @classmethod
    def haar(cls, shape: GridShape, levels: int | None = None) -> "WaveletBasis":
        return cls(WaveletKind.D2, shape, levels)

    @property
    def approximation_size(self) -> int:
        """Cantidad de coeficientes del bloque LL más grueso (al principio del vector)."""
        rows, cols = self._band_shapes[-1]
        return rows * cols

    def analyze(self, values: np.ndarray) -> CoefficientVector:
        """θ = Ψᵀx sobre un vector row-major crudo de longitud N."""
        values = np.asarray(values, dtype=np.float64)
        if values.size != self.shape.n:
            raise DimensionError(f"Se esperaban {self.shape.n} valores para {self.shape}, recibió {values.size}")
        out = np.empty(self.shape.n)
        approx = values.reshape(self.shape.rows, self.shape.cols)
        end = self.shape.n
        for rows, cols in self._band_shapes:
            approx, (horizontal, vertical, diagonal) = pywt.dwt2(approx, self._wavelet, mode=_MODE)
            size = rows * cols
            start = end - 3 * size
            out[start:start + size] = vertical.reshape(-1)
            out[start + size:start + 2 * size] = horizontal.reshape(-1)
            out[start + 2 * size:end] = diagonal.reshape(-1)
            end = start
        out[:end] = approx.reshape(-1)
        return out

    def synthesize(self, coeffs: CoefficientVector) -> np.ndarray:
        """x = Ψθ, devuelve el vector row-major de longitud N."""
        if self.kind is not WaveletKind.D2:
            raise ParameterError("La base D4 es solo de análisis (sin reconstrucción)")
        coeffs = np.asarray(coeffs, dtype=np.float64).reshape(-1)
        if coeffs.size != self.shape.n:
            raise DimensionError(f"Se esperaban {self.shape.n} coeficientes para {self.shape}, recibió {coeffs.size}")
        start = self.approximation_size
        approx = coeffs[:start].reshape(self._band_shapes[-1])
        for rows, cols in reversed(self._band_shapes):
            size = rows * cols
            vertical = coeffs[start:start + size].reshape(rows, cols)
            horizontal = coeffs[start + size:start + 2 * size].reshape(rows, cols)
            diagonal = coeffs[start + 2 * size:start + 3 * size].reshape(rows, cols)
            approx = pywt.idwt2((approx, (horizontal, vertical, diagonal)), self._wavelet, mode=_MODE)
            start += 3 * size
        return approx.reshape(-1)


def forward(basis: WaveletBasis, frame: Frame) -> CoefficientVector:
    """Transformada de análisis θ = Ψᵀx de un frame."""
    if frame.shape != basis.shape:
        raise DimensionError(f"Frame {frame.shape} no coincide con la base {basis.shape}")
    return basis.analyze(frame.values)


def inverse(basis: WaveletBasis, coeffs: CoefficientVector) -> Frame:
    """Síntesis ortonormal x = Ψθ (solo D2)."""
    return Frame(basis.shape, basis.synthesize(coeffs))


def nnz(coeffs: CoefficientVector, abs_tol: float = DEFAULT_ABS_TOL) -> int:
    """Cantidad de coeficientes con |θ_j| > abs_tol."""
    if abs_tol < 0:
        raise ParameterError(f"abs_tol debe ser >= 0 (recibido {abs_tol})")
    return int(np.count_nonzero(np.abs(np.asarray(coeffs)) > abs_tol))


@dataclass(frozen=True)
class SparsityStats:
    """Resumen de nnz a lo largo de una grabación."""
    kind: WaveletKind
    n: int
    mean: float
    max: int
    contact_mean: float
    contact_steps: int


def sparsity_series(rec: Recording, basis: WaveletBasis, abs_tol: float = DEFAULT_ABS_TOL) -> np.ndarray:
    """nnz por time-step."""
    if rec.shape != basis.shape:
        raise DimensionError(f"Grabación {rec.shape} no coincide con la base {basis.shape}")
    return np.array([nnz(basis.analyze(row), abs_tol) for row in rec.data], dtype=np.int64)


def sparsity_stats(
    rec: Recording,
    basis: WaveletBasis,
    abs_tol: float = DEFAULT_ABS_TOL,
    series: np.ndarray | None = None,
) -> SparsityStats:
    """
    Media y máximo de nnz; `contact_mean` promedia solo los time-steps con
    algún taxel en contacto (|x| > abs_tol).
    """
    if series is None:
        series = sparsity_series(rec, basis, abs_tol)
    contact = np.any(np.abs(rec.data) > abs_tol, axis=1) if rec.steps else np.zeros(0, dtype=bool)
    return SparsityStats(
        kind=basis.kind,
        n=rec.shape.n,
        mean=float(series.mean()) if series.size else 0.0,
        max=int(series.max()) if series.size else 0,
        contact_mean=float(series[contact].mean()) if contact.any() else 0.0,
        contact_steps=int(contact.sum()),
    )
