#!/usr/bin/env python3
# src/grid.py

"""
Tipos de dominio compartidos: grilla de taxels, frames, grabaciones y
vectores de medición, junto con el contenedor binario "TXCS" y la
exportación a CSV.

Convención de indexado (común a todos los módulos): values[r * cols + c]
es el taxel de la fila r, columna c (row-major).

Formato TXCS v1 (little-endian):
    magic "TXCS" | version u8 | record type u8 | reservado u16 |
    rows u32 | cols u32 | T u32 | width u32 | dt f64 | f_min f64 | f_max f64
seguido de T * width valores (float32 para grabaciones, float64 para
mediciones).
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence, Tuple

# Importaciones de Terceros
import numpy as np
import pandas as pd

# Importaciones Locales
from .errors import DimensionError, FormatError, ParameterError, ValidationError

logger = logging.getLogger(__name__)

MAGIC = b"TXCS"
FORMAT_VERSION = 1
RECORD_RECORDING = 1
RECORD_MEASUREMENTS = 2
HEADER = struct.Struct("<4sBBHIIIIddd")

DEFAULT_SENSOR_RANGE: Tuple[float, float] = (0.0, 2.5)

_PAYLOAD_DTYPES = {
    RECORD_RECORDING: np.dtype("<f4"),
    RECORD_MEASUREMENTS: np.dtype("<f8"),
}


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    """Copia a un ndarray de solo lectura."""
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GridShape:
    """Grilla plana de rows x cols taxels."""
    rows: int
    cols: int

    def __post_init__(self):
        for name in ("rows", "cols"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise ParameterError(f"GridShape.{name} debe ser un entero >= 2 (recibido {value!r})")
            object.__setattr__(self, name, int(value))

    @property
    def n(self) -> int:
        return self.rows * self.cols

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True, eq=False)
class Frame:
    """Un time-step de fuerzas por taxel (Newtons), row-major."""
    shape: GridShape
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values).reshape(-1)
        if values.size != self.shape.n:
            raise DimensionError(
                f"Frame {self.shape} requiere {self.shape.n} valores, recibió {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"Frame {self.shape} contiene valores no finitos")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, shape: GridShape) -> "Frame":
        return cls(shape, np.zeros(shape.n))

    @classmethod
    def from_grid(cls, grid: np.ndarray) -> "Frame":
        """Construye un Frame desde una matriz 2D (rows, cols)."""
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 2:
            raise DimensionError(f"Se esperaba una matriz 2D, recibió ndim={grid.ndim}")
        return cls(GridShape(*grid.shape), grid.reshape(-1))

    def as_grid(self) -> np.ndarray:
        return self.values.reshape(self.shape.rows, self.shape.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Recording:
    """
    Secuencia temporal de frames con metadatos.

    Los valores se guardan como una matriz (T, N) en float64, redondeados
    a precisión float32 (la del payload TXCS) para que escribir y leer
    devuelva los mismos bits. `frames` expone la vista como objetos Frame.
    """
    shape: GridShape
    dt: float
    data: np.ndarray
    sensor_range: Tuple[float, float] = DEFAULT_SENSOR_RANGE

    def __post_init__(self):
        data = _frozen_array(self.data)
        if data.ndim == 1 and data.size == 0:
            data = data.reshape(0, self.shape.n)
        if data.ndim != 2 or data.shape[1] != self.shape.n:
            raise DimensionError(
                f"Recording {self.shape} requiere datos (T, {self.shape.n}), recibió {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            bad = int(np.argwhere(~np.isfinite(data))[0, 0])
            raise ValidationError(f"Recording contiene valores no finitos en el time-step {bad}")
        with np.errstate(over="ignore"):
            single = data.astype(np.float32)
        if not np.all(np.isfinite(single)):
            bad = int(np.argwhere(~np.isfinite(single))[0, 0])
            raise ValidationError(f"Recording excede el rango de float32 en el time-step {bad}")
        data = _frozen_array(single)
        if not self.dt > 0:
            raise ValidationError(f"dt debe ser > 0 (recibido {self.dt})")
        f_min, f_max = (float(v) for v in self.sensor_range)
        if not f_min < f_max:
            raise ValidationError(f"sensor_range inválido: f_min={f_min} >= f_max={f_max}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "sensor_range", (f_min, f_max))

    @classmethod
    def from_frames(
        cls,
        frames: Sequence[Frame],
        dt: float,
        sensor_range: Tuple[float, float] = DEFAULT_SENSOR_RANGE,
        shape: GridShape | None = None,
    ) -> "Recording":
        if not frames and shape is None:
            raise ValidationError("Una grabación vacía necesita un GridShape explícito")
        shape = shape or frames[0].shape
        for t, frame in enumerate(frames):
            if frame.shape != shape:
                raise DimensionError(f"El frame {t} tiene forma {frame.shape}, se esperaba {shape}")
        data = np.stack([f.values for f in frames]) if frames else np.zeros((0, shape.n))
        return cls(shape, dt, data, sensor_range)

    def with_data(self, data: np.ndarray) -> "Recording":
        """Misma metadata, otros valores."""
        return Recording(self.shape, self.dt, data, self.sensor_range)

    @property
    def steps(self) -> int:
        return int(self.data.shape[0])

    @property
    def frames(self) -> Tuple[Frame, ...]:
        return tuple(self.frame(t) for t in range(self.steps))

    def frame(self, t: int) -> Frame:
        return Frame(self.shape, self.data[t])

    def __len__(self) -> int:
        return self.steps

    def __iter__(self) -> Iterator[Frame]:
        for t in range(self.steps):
            yield self.frame(t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Recording):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.dt == other.dt
            and self.sensor_range == other.sensor_range
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MeasurementVector:
    """Lecturas agregadas y = Φx de un time-step (sin unidades)."""
    values: np.ndarray
    m: int = field(default=-1)

    def __post_init__(self):
        values = _frozen_array(self.values).reshape(-1)
        if self.m >= 0 and values.size != self.m:
            raise DimensionError(f"MeasurementVector declara m={self.m} pero tiene {values.size} valores")
        if values.size < 1:
            raise DimensionError("MeasurementVector requiere m >= 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "m", int(values.size))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeasurementVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Mediciones de una grabación completa, con la metadata de la grilla de origen."""
    shape: GridShape
    dt: float
    data: np.ndarray
    sensor_range: Tuple[float, float] = DEFAULT_SENSOR_RANGE

    def __post_init__(self):
        data = _frozen_array(self.data)
        if data.ndim != 2:
            raise DimensionError(f"MeasurementSet requiere datos (T, M), recibió {data.shape}")
        object.__setattr__(self, "data", data)

    @property
    def m(self) -> int:
        return int(self.data.shape[1])

    @property
    def vectors(self) -> Tuple[MeasurementVector, ...]:
        return tuple(MeasurementVector(row) for row in self.data)

    def __len__(self) -> int:
        return int(self.data.shape[0])


# ---------------------------
# Contenedor binario TXCS
# ---------------------------

def _write_container(
    path: Path,
    record_type: int,
    shape: GridShape,
    dt: float,
    sensor_range: Tuple[float, float],
    data: np.ndarray,
) -> None:
    dtype = _PAYLOAD_DTYPES[record_type]
    payload = np.ascontiguousarray(data, dtype=dtype)
    if not np.all(np.isfinite(payload)):
        raise ValidationError(f"{path}: valores no finitos (o fuera de rango float32), no se escribe el archivo")

    steps, width = data.shape
    header = HEADER.pack(
        MAGIC, FORMAT_VERSION, record_type, 0,
        shape.rows, shape.cols, steps, width,
        float(dt), float(sensor_range[0]), float(sensor_range[1]),
    )
    try:
        with open(path, "wb") as f:
            f.write(header)
            f.write(payload.tobytes())
    except OSError as e:
        raise OSError(f"No se pudo escribir {path}: {e}") from e


def _read_container(path: Path, record_type: int):
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise OSError(f"No se pudo leer {path}: {e}") from e

    if len(raw) < HEADER.size or raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic (no es un archivo TXCS)")

    magic, version, rtype, _reserved, rows, cols, steps, width, dt, f_min, f_max = HEADER.unpack_from(raw)
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: versión de formato {version} no soportada (se esperaba {FORMAT_VERSION})")
    if rtype != record_type:
        raise FormatError(f"{path}: tipo de registro {rtype}, se esperaba {record_type}")

    dtype = _PAYLOAD_DTYPES[record_type]
    expected = steps * width * dtype.itemsize
    actual = len(raw) - HEADER.size
    if actual != expected:
        raise FormatError(
            f"{path}: payload truncado o sobrante: se esperaban {expected} bytes, hay {actual}"
        )

    try:
        shape = GridShape(rows, cols)
    except ParameterError as e:
        raise FormatError(f"{path}: encabezado inválido: {e}") from e

    data = np.frombuffer(raw, dtype=dtype, offset=HEADER.size).reshape(steps, width)
    return shape, dt, (f_min, f_max), data.astype(np.float64)


def write_recording(rec: Recording, path: str | Path) -> None:
    """Escribe la grabación en formato TXCS (payload float32 row-major)."""
    path = Path(path)
    _write_container(path, RECORD_RECORDING, rec.shape, rec.dt, rec.sensor_range, rec.data)
    logger.debug(f"Grabación escrita: {path} ({rec.steps} frames {rec.shape})")


def read_recording(path: str | Path) -> Recording:
    """Inversa de write_recording."""
    shape, dt, sensor_range, data = _read_container(Path(path), RECORD_RECORDING)
    if data.shape[1] != shape.n:
        raise FormatError(f"{path}: width={data.shape[1]} no coincide con N={shape.n}")
    try:
        return Recording(shape, dt, data, sensor_range)
    except ValidationError as e:
        raise FormatError(f"{path}: {e}") from e


def write_measurements(meas: MeasurementSet, path: str | Path) -> None:
    """Escribe mediciones en el mismo contenedor, record type 2, payload float64."""
    path = Path(path)
    _write_container(path, RECORD_MEASUREMENTS, meas.shape, meas.dt, meas.sensor_range, meas.data)
    logger.debug(f"Mediciones escritas: {path} ({len(meas)} x {meas.m})")


def read_measurements(path: str | Path) -> MeasurementSet:
    shape, dt, sensor_range, data = _read_container(Path(path), RECORD_MEASUREMENTS)
    return MeasurementSet(shape, dt, data, sensor_range)


# ---------------------------
# Exportación CSV
# ---------------------------

def vectors_to_frame(rows: np.ndarray, prefix: str = "i") -> pd.DataFrame:
    """Tabla t, i0, ..., i(N-1) con una fila por time-step."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    table = pd.DataFrame(rows, columns=[f"{prefix}{j}" for j in range(rows.shape[1])])
    table.insert(0, "t", np.arange(rows.shape[0]))
    return table


def export_csv(rec: Recording, path: str | Path) -> None:
    """Exporta la grabación como CSV decimal (columna t = índice de time-step)."""
    vectors_to_frame(rec.data).to_csv(path, index=False)


def import_csv(path: str | Path, shape: GridShape, dt: float,
               sensor_range: Tuple[float, float] = DEFAULT_SENSOR_RANGE) -> Recording:
    """Lee un CSV producido por export_csv. La forma de la grilla no viaja en el CSV."""
    table = pd.read_csv(path)
    values = table.drop(columns=["t"]).to_numpy(dtype=np.float64)
    if values.shape[0] == 0:
        values = np.zeros((0, shape.n))
    return Recording(shape, dt, values, sensor_range)
