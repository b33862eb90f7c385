#!/usr/bin/env python3
# src/scenario.py

"""
Generador sintético de escenarios táctiles (ground truth), filtro de
media móvil y modelo de ruido del sensor.

Escenarios:
- SQUARE_PRESS: huella cuadrada con fuerza uniforme que sube, se mantiene y baja.
- SHAPE_PRESS:  misma curva de fuerza con una huella en L.
- SHAPE_DRAG:   huella en L trasladándose a velocidad constante.
- BLOB_PATH:    campana gaussiana (σ = 1.5 taxels, truncada a 3σ) que
                sigue una caminata aleatoria reflejada en los bordes.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

# Importaciones de Terceros
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Importaciones Locales
from .config_loader import Config
from .errors import ParameterError, ValidationError
from .grid import DEFAULT_SENSOR_RANGE, GridShape, Recording

logger = logging.getLogger(__name__)

DEFAULT_SIGMA_MID = 0.0628
DEFAULT_SMOOTHING_WIDTH = 10


class ScenarioKind(str, Enum):
    SQUARE_PRESS = "square_press"
    SHAPE_PRESS = "shape_press"
    SHAPE_DRAG = "shape_drag"
    BLOB_PATH = "blob_path"


def default_dt(shape: GridShape) -> float:
    """1 ms para grillas chicas, 0.1 ms para las de 64x64 en adelante."""
    return 1e-4 if shape.n >= 4096 else 1e-3


@dataclass(frozen=True)
class ScenarioSpec:
    """
    Parámetros de un escenario.

    Geometría (en taxels):
        footprint: (alto, ancho) del cuadrado o de la caja de la L.
        bar_width: grosor de los brazos de la L.
        position: esquina superior izquierda inicial; None la centra.
        velocity: (filas, columnas) por time-step, solo SHAPE_DRAG.
        ramp_steps: duración de la subida en los escenarios de presión (None = T/4).
        contact_ramp: subida de fuerza al inicio de los escenarios móviles (0 = inmediato).
        blob_sigma, step_length: campana y paso de la caminata de BLOB_PATH.
    """
    kind: ScenarioKind
    shape: GridShape
    steps: int
    dt: Optional[float] = None
    peak_force: float = 2.0
    seed: int = 0
    sensor_range: Tuple[float, float] = DEFAULT_SENSOR_RANGE
    footprint: Tuple[int, int] = (8, 8)
    bar_width: int = 2
    position: Optional[Tuple[int, int]] = None
    velocity: Tuple[float, float] = (0.0, 0.25)
    ramp_steps: Optional[int] = None
    contact_ramp: int = 0
    blob_sigma: float = 1.5
    step_length: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        object.__setattr__(self, "footprint", tuple(int(v) for v in self.footprint))
        if self.position is not None:
            object.__setattr__(self, "position", tuple(int(v) for v in self.position))
        object.__setattr__(self, "velocity", tuple(float(v) for v in self.velocity))
        object.__setattr__(self, "sensor_range", tuple(float(v) for v in self.sensor_range))
        if self.dt is None:
            object.__setattr__(self, "dt", default_dt(self.shape))
        self._validate()

    def _validate(self) -> None:
        f_min, f_max = self.sensor_range
        if self.steps < 1:
            raise ParameterError(f"steps debe ser >= 1 (recibido {self.steps})")
        if not f_min < f_max:
            raise ParameterError(f"sensor_range inválido: {self.sensor_range}")
        if not 0 < self.peak_force <= f_max:
            raise ParameterError(f"peak_force={self.peak_force} fuera de (0, {f_max}]")
        if self.ramp_steps is not None and self.ramp_steps < 1:
            raise ParameterError(f"ramp_steps debe ser >= 1 (recibido {self.ramp_steps})")
        if self.contact_ramp < 0:
            raise ParameterError(f"contact_ramp debe ser >= 0 (recibido {self.contact_ramp})")

        if self.kind is ScenarioKind.BLOB_PATH:
            if self.blob_sigma <= 0 or self.step_length < 0:
                raise ParameterError("blob_sigma debe ser > 0 y step_length >= 0")
            diameter = 2 * math.ceil(3 * self.blob_sigma) + 1
            if diameter > min(self.shape.rows, self.shape.cols):
                raise ParameterError(
                    f"La campana (diámetro {diameter} taxels) no entra en la grilla {self.shape}"
                )
            return

        height, width = self.footprint
        if height < 1 or width < 1:
            raise ParameterError(f"footprint inválido: {self.footprint}")
        if height > self.shape.rows or width > self.shape.cols:
            raise ParameterError(f"footprint {self.footprint} excede la grilla {self.shape}")
        if self.kind in (ScenarioKind.SHAPE_PRESS, ScenarioKind.SHAPE_DRAG):
            if not 1 <= self.bar_width <= min(height, width):
                raise ParameterError(f"bar_width={self.bar_width} no entra en la huella {self.footprint}")
        top, left = self.start_position()
        if top < 0 or left < 0 or top + height > self.shape.rows or left + width > self.shape.cols:
            raise ParameterError(
                f"footprint {self.footprint} en {(top, left)} excede la grilla {self.shape}"
            )

    def start_position(self) -> Tuple[int, int]:
        if self.position is not None:
            return self.position
        height, width = self.footprint
        return (self.shape.rows - height) // 2, (self.shape.cols - width) // 2


@dataclass(frozen=True)
class NoiseModel:
    """Ruido gaussiano con σ máximo en el punto medio del rango y 0 en los extremos."""
    sigma_mid: float = DEFAULT_SIGMA_MID
    range: Tuple[float, float] = DEFAULT_SENSOR_RANGE
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "range", tuple(float(v) for v in self.range))
        if self.sigma_mid < 0:
            raise ParameterError(f"sigma_mid debe ser >= 0 (recibido {self.sigma_mid})")
        if not self.range[0] < self.range[1]:
            raise ParameterError(f"range inválido: {self.range}")

    @classmethod
    def from_config(cls, config: Config, **overrides) -> "NoiseModel":
        values = dict(
            sigma_mid=config.get_float("noise.sigma_mid", DEFAULT_SIGMA_MID),
            range=tuple(config.get_list("scenario.sensor_range", list(DEFAULT_SENSOR_RANGE))),
            seed=config.get_int("noise.seed", 0),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def sigma(self, values) -> np.ndarray:
        """σ(v) = sigma_mid · (1 − |v − mid| / (mid − f_min)), taper lineal."""
        f_min, f_max = self.range
        mid = 0.5 * (f_min + f_max)
        taper = 1.0 - np.abs(np.asarray(values, dtype=np.float64) - mid) / (mid - f_min)
        return self.sigma_mid * np.clip(taper, 0.0, 1.0)


# ---------------------------
# Generación
# ---------------------------

def _press_profile(spec: ScenarioSpec) -> np.ndarray:
    """Sube 0→peak en ramp_steps, mantiene T/2 y baja en el resto."""
    steps = spec.steps
    ramp = spec.ramp_steps or max(1, steps // 4)
    hold = steps // 2
    down = steps - ramp - hold
    profile = np.zeros(steps)
    for t in range(steps):
        if t < ramp:
            profile[t] = spec.peak_force * t / ramp
        elif t < ramp + hold:
            profile[t] = spec.peak_force
        else:
            k = t - ramp - hold + 1
            profile[t] = spec.peak_force * max(0.0, 1.0 - k / down)
    return profile


def _contact_profile(spec: ScenarioSpec) -> np.ndarray:
    t = np.arange(spec.steps, dtype=np.float64)
    if spec.contact_ramp == 0:
        return np.full(spec.steps, spec.peak_force)
    return spec.peak_force * np.minimum(1.0, t / spec.contact_ramp)


def _l_mask(spec: ScenarioSpec) -> np.ndarray:
    height, width = spec.footprint
    mask = np.zeros((height, width), dtype=bool)
    mask[:, :spec.bar_width] = True
    mask[height - spec.bar_width:, :] = True
    return mask


def _paint(grid: np.ndarray, mask: np.ndarray, top: int, left: int, value: float) -> None:
    """Pinta la máscara en (top, left), recortando lo que cae fuera de la grilla."""
    rows, cols = grid.shape
    r0, c0 = max(top, 0), max(left, 0)
    r1, c1 = min(top + mask.shape[0], rows), min(left + mask.shape[1], cols)
    if r0 >= r1 or c0 >= c1:
        return
    sub = mask[r0 - top:r1 - top, c0 - left:c1 - left]
    grid[r0:r1, c0:c1][sub] = value


def _reflect(value: float, low: float, high: float) -> float:
    while value < low or value > high:
        value = 2 * low - value if value < low else 2 * high - value
    return value


def _generate_press(spec: ScenarioSpec, mask: np.ndarray) -> np.ndarray:
    top, left = spec.start_position()
    frames = np.zeros((spec.steps, spec.shape.rows, spec.shape.cols))
    for t, force in enumerate(_press_profile(spec)):
        _paint(frames[t], mask, top, left, force)
    return frames


def _generate_drag(spec: ScenarioSpec) -> np.ndarray:
    mask = _l_mask(spec)
    top, left = spec.start_position()
    d_row, d_col = spec.velocity
    frames = np.zeros((spec.steps, spec.shape.rows, spec.shape.cols))
    for t, force in enumerate(_contact_profile(spec)):
        _paint(frames[t], mask, top + math.floor(d_row * t), left + math.floor(d_col * t), force)
    return frames


def _generate_blob(spec: ScenarioSpec) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    rows, cols = spec.shape.rows, spec.shape.cols
    sigma = spec.blob_sigma
    cutoff = 3.0 * sigma
    margin = math.ceil(cutoff)

    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    center = np.array([
        rng.uniform(margin, rows - 1 - margin),
        rng.uniform(margin, cols - 1 - margin),
    ])
    frames = np.zeros((spec.steps, rows, cols))
    for t, force in enumerate(_contact_profile(spec)):
        dist2 = (rr - center[0]) ** 2 + (cc - center[1]) ** 2
        bump = force * np.exp(-dist2 / (2.0 * sigma * sigma))
        bump[dist2 > cutoff * cutoff] = 0.0
        frames[t] = bump

        angle = rng.uniform(0.0, 2.0 * math.pi)
        center = np.array([
            _reflect(center[0] + spec.step_length * math.cos(angle), 0.0, rows - 1.0),
            _reflect(center[1] + spec.step_length * math.sin(angle), 0.0, cols - 1.0),
        ])
    return frames


def generate(spec: ScenarioSpec) -> Recording:
    """Grabación ground truth determinística dada la spec (incluida la semilla)."""
    if spec.kind is ScenarioKind.SQUARE_PRESS:
        frames = _generate_press(spec, np.ones(spec.footprint, dtype=bool))
    elif spec.kind is ScenarioKind.SHAPE_PRESS:
        frames = _generate_press(spec, _l_mask(spec))
    elif spec.kind is ScenarioKind.SHAPE_DRAG:
        frames = _generate_drag(spec)
    else:
        frames = _generate_blob(spec)

    f_max = spec.sensor_range[1]
    data = np.clip(frames.reshape(spec.steps, spec.shape.n), 0.0, f_max)
    logger.debug(f"Escenario {spec.kind.value} {spec.shape} generado: {spec.steps} time-steps")
    return Recording(spec.shape, spec.dt, data, spec.sensor_range)


# ---------------------------
# Filtro y ruido
# ---------------------------

def smooth(rec: Recording, width: int = DEFAULT_SMOOTHING_WIDTH) -> Recording:
    """
    Media móvil causal por taxel sobre los últimos `width` frames; al
    principio promedia la historia disponible. Suma directa de ventanas,
    así los tramos en cero quedan exactamente en cero.
    """
    if width < 1:
        raise ParameterError(f"width debe ser >= 1 (recibido {width})")
    if width == 1 or rec.steps == 0:
        return rec
    padded = np.concatenate([np.zeros((width - 1, rec.shape.n)), rec.data])
    sums = sliding_window_view(padded, width, axis=0).sum(axis=-1)
    counts = np.minimum(np.arange(1, rec.steps + 1), width)[:, None]
    return rec.with_data(sums / counts)


def add_noise(rec: Recording, model: NoiseModel) -> Recording:
    """
    noisy = clip(v + g, f_min, f_max) con g ~ Normal(0, σ(v)²), una
    muestra independiente por taxel y time-step.

    Raises:
        ValidationError: si algún valor está fuera del rango del modelo.
    """
    f_min, f_max = model.range
    # tolerancia para el redondeo del filtro de media móvil
    slack = 1e-9 * (f_max - f_min)
    data = rec.data
    if data.size and (data.min() < f_min - slack or data.max() > f_max + slack):
        raise ValidationError(
            f"Valores fuera del rango del sensor [{f_min}, {f_max}]: "
            f"min={data.min():.6g}, max={data.max():.6g}"
        )
    data = np.clip(data, f_min, f_max)
    rng = np.random.default_rng(model.seed)
    draws = rng.standard_normal(data.shape)
    noisy = np.clip(data + draws * model.sigma(data), f_min, f_max)
    return rec.with_data(noisy)
