#!/usr/bin/env python3
# src/experiment.py

"""
Esquema del archivo de experimento (YAML, versión 1) que consume `sweep`.

Ejemplo mínimo:

    version: 1
    sensor_range: [0.0, 2.5]
    smoothing_width: 10
    noise: {sigma_mid: 0.0628, seed: 0}
    scenarios:
      - {name: press40, kind: square_press, rows: 40, cols: 40, steps: 700, seed: 0}
    operator: {block_size: 32, seed: 0, m: ["N/4", "N/3", "N/2"]}
    solver: {lambda: 0.1, iterations: [30]}
    output: {timeseries: true, timing: false}

Cada configuración del barrido es el producto escenario x M x iteraciones,
en el orden en que aparecen en el archivo. Los errores de validación
llevan la ruta del campo (ej. "operator.m[2]: ...").
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple

# Importaciones de Terceros
import yaml

# Importaciones Locales
from .errors import ConfigError, TactileCsError
from .grid import DEFAULT_SENSOR_RANGE, GridShape
from .scenario import DEFAULT_SIGMA_MID, DEFAULT_SMOOTHING_WIDTH, NoiseModel, ScenarioSpec

SCHEMA_VERSION = 1

_TOP_KEYS = {"version", "sensor_range", "smoothing_width", "noise", "scenarios", "operator", "solver", "output"}
_SCENARIO_KEYS = {
    "name", "kind", "rows", "cols", "steps", "dt", "peak_force", "seed", "footprint",
    "bar_width", "position", "velocity", "ramp_steps", "contact_ramp", "blob_sigma", "step_length",
}
_PAIR_KEYS = {"footprint", "position", "velocity"}


def _mapping(value: Any, path: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(path, f"se esperaba un mapeo, recibió {type(value).__name__}")
    return value


def _check_keys(data: Dict[str, Any], allowed: set, path: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else str(key), "campo desconocido")


def _require(data: Dict[str, Any], key: str, path: str) -> Any:
    if key not in data:
        raise ConfigError(f"{path}.{key}" if path else key, "campo obligatorio")
    return data[key]


def _int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"se esperaba un entero, recibió {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"debe ser >= {minimum} (recibido {value})")
    return value


def _float(value: Any, path: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(path, f"se esperaba un número, recibió {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"se esperaba un número, recibió {value!r}") from None


def _list(value: Any, path: str) -> List[Any]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "se esperaba una lista no vacía")
    return value


def _pair(value: Any, path: str) -> Tuple[Any, Any]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(path, f"se esperaba un par [a, b], recibió {value!r}")
    return value[0], value[1]


def resolve_m(entry: Any, n: int, path: str) -> int:
    """Entero literal o fracción "N/k" (piso de N/k)."""
    if isinstance(entry, str):
        text = entry.replace(" ", "")
        if not text.startswith("N/"):
            raise ConfigError(path, f"formato inválido {entry!r} (use un entero o 'N/k')")
        try:
            divisor = int(text[2:])
        except ValueError:
            raise ConfigError(path, f"divisor inválido en {entry!r}") from None
        if divisor < 1:
            raise ConfigError(path, f"divisor inválido en {entry!r}")
        m = n // divisor
    else:
        m = _int(entry, path)
    if not 1 <= m <= n:
        raise ConfigError(path, f"M={m} fuera de rango para N={n}")
    return m


@dataclass(frozen=True)
class RunKey:
    """Clave de una configuración del barrido."""
    scenario: str
    n: int
    m: int
    iterations: int

    @property
    def slug(self) -> str:
        return f"{self.scenario}_N{self.n}_M{self.m}_it{self.iterations}"


@dataclass(frozen=True)
class ExperimentConfig:
    scenarios: Tuple[Tuple[str, ScenarioSpec], ...]
    m_values: Tuple[Any, ...]
    iterations: Tuple[int, ...]
    block_size: int = 32
    operator_seed: int = 0
    lam: float = 0.1
    power_iters: int = 100
    power_tol: float = 1e-3
    sensor_range: Tuple[float, float] = DEFAULT_SENSOR_RANGE
    smoothing_width: int = DEFAULT_SMOOTHING_WIDTH
    noise: NoiseModel = field(default_factory=NoiseModel)
    timeseries: bool = True
    timing: bool = False

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError("", f"{path}: YAML inválido: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        data = _mapping(data, "<root>")
        _check_keys(data, _TOP_KEYS, "")
        version = _require(data, "version", "")
        if version != SCHEMA_VERSION:
            raise ConfigError("version", f"versión {version!r} no soportada (se esperaba {SCHEMA_VERSION})")

        low, high = _pair(data.get("sensor_range", list(DEFAULT_SENSOR_RANGE)), "sensor_range")
        sensor_range = (_float(low, "sensor_range[0]"), _float(high, "sensor_range[1]"))
        if not sensor_range[0] < sensor_range[1]:
            raise ConfigError("sensor_range", f"f_min debe ser < f_max (recibido {sensor_range})")

        smoothing_width = _int(data.get("smoothing_width", DEFAULT_SMOOTHING_WIDTH), "smoothing_width", 1)

        noise_data = _mapping(data.get("noise", {}), "noise")
        _check_keys(noise_data, {"sigma_mid", "seed"}, "noise")
        sigma_mid = _float(noise_data.get("sigma_mid", DEFAULT_SIGMA_MID), "noise.sigma_mid")
        if sigma_mid < 0:
            raise ConfigError("noise.sigma_mid", "debe ser >= 0")
        noise = NoiseModel(sigma_mid, sensor_range, _int(noise_data.get("seed", 0), "noise.seed"))

        scenarios = []
        seen = set()
        for i, entry in enumerate(_list(_require(data, "scenarios", ""), "scenarios")):
            name, spec = parse_scenario(entry, f"scenarios[{i}]", sensor_range)
            if name in seen:
                raise ConfigError(f"scenarios[{i}].name", f"nombre repetido {name!r}")
            seen.add(name)
            scenarios.append((name, spec))

        op_data = _mapping(_require(data, "operator", ""), "operator")
        _check_keys(op_data, {"block_size", "seed", "m"}, "operator")
        block_size = _int(op_data.get("block_size", 32), "operator.block_size", 1)
        m_values = tuple(_list(_require(op_data, "m", "operator"), "operator.m"))
        for name, spec in scenarios:
            for j, entry in enumerate(m_values):
                resolve_m(entry, spec.shape.n, f"operator.m[{j}]")
            if spec.shape.n % block_size != 0:
                raise ConfigError("operator.block_size", f"B={block_size} no divide N={spec.shape.n} ({name})")

        solver_data = _mapping(_require(data, "solver", ""), "solver")
        _check_keys(solver_data, {"lambda", "iterations", "power_iters", "power_tol"}, "solver")
        lam = _float(solver_data.get("lambda", 0.1), "solver.lambda")
        if lam < 0:
            raise ConfigError("solver.lambda", "debe ser >= 0")
        iterations = tuple(
            _int(v, f"solver.iterations[{j}]", 1)
            for j, v in enumerate(_list(solver_data.get("iterations", [30]), "solver.iterations"))
        )

        output = _mapping(data.get("output", {}), "output")
        _check_keys(output, {"timeseries", "timing"}, "output")

        try:
            return cls(
                scenarios=tuple(scenarios),
                m_values=m_values,
                iterations=iterations,
                block_size=block_size,
                operator_seed=_int(op_data.get("seed", 0), "operator.seed"),
                lam=lam,
                power_iters=_int(solver_data.get("power_iters", 100), "solver.power_iters", 1),
                power_tol=_float(solver_data.get("power_tol", 1e-3), "solver.power_tol"),
                sensor_range=sensor_range,
                smoothing_width=smoothing_width,
                noise=noise,
                timeseries=bool(output.get("timeseries", True)),
                timing=bool(output.get("timing", False)),
            )
        except TactileCsError as e:
            raise ConfigError("", str(e)) from e

    def configurations(self) -> List[Tuple[RunKey, ScenarioSpec]]:
        """Producto escenario x M x iteraciones, en el orden del archivo."""
        runs = []
        for name, spec in self.scenarios:
            n = spec.shape.n
            for j, entry in enumerate(self.m_values):
                m = resolve_m(entry, n, f"operator.m[{j}]")
                for iterations in self.iterations:
                    runs.append((RunKey(name, n, m, iterations), spec))
        return runs


def parse_scenario(
    entry: Any,
    path: str,
    sensor_range: Tuple[float, float],
    require_name: bool = True,
) -> Tuple[str, ScenarioSpec]:
    """Parsea un mapeo de escenario (también usado por `generate --spec`)."""
    entry = _mapping(entry, path)
    _check_keys(entry, _SCENARIO_KEYS, path)
    name = str(_require(entry, "name", path) if require_name else entry.get("name", "scenario"))
    rows = _int(_require(entry, "rows", path), f"{path}.rows", 2)
    cols = _int(_require(entry, "cols", path), f"{path}.cols", 2)
    kwargs: Dict[str, Any] = {
        "kind": _require(entry, "kind", path),
        "shape": GridShape(rows, cols),
        "steps": _int(_require(entry, "steps", path), f"{path}.steps", 1),
        "sensor_range": sensor_range,
    }
    for key in ("dt", "peak_force", "blob_sigma", "step_length"):
        if key in entry:
            kwargs[key] = _float(entry[key], f"{path}.{key}")
    for key in ("seed", "bar_width", "ramp_steps", "contact_ramp"):
        if key in entry:
            kwargs[key] = _int(entry[key], f"{path}.{key}")
    for key in _PAIR_KEYS & entry.keys():
        kwargs[key] = _pair(entry[key], f"{path}.{key}")

    try:
        return name, ScenarioSpec(**kwargs)
    except ValueError as e:
        raise ConfigError(path, str(e)) from e
