#!/usr/bin/env python3
# src/solve.py

"""
Solver BPDN: minimiza ½‖ΦΨθ − y‖₂² + λ‖θ‖₁ con FISTA.

- Paso constante 1/L, con L = λ_max((ΦΨ)ᵀ(ΦΨ)) estimado por iteración
  de potencia y cacheado por par (operador, base).
- Cantidad fija de iteraciones (sin criterios de salida temprana).
- Warm start: cada time-step arranca desde el θ̂ del anterior; el
  momento se reinicia (t = 1).
- Los valores negativos se llevan a 0 una sola vez, en el dominio de la
  señal, después de la última iteración.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Protocol, Sequence, Tuple

# Importaciones de Terceros
import numpy as np

# Importaciones Locales
from .config_loader import Config
from .errors import DegenerateError, DimensionError, ParameterError, TactileCsError, ValidationError
from .grid import Frame, GridShape, MeasurementSet, MeasurementVector
from .measure import LinearOperator

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 0.1


class Basis(Protocol):
    """Lo que el solver necesita de Ψ (WaveletBasis D2 lo cumple)."""
    shape: GridShape

    def analyze(self, values: np.ndarray) -> np.ndarray: ...

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class SolverConfig:
    """Parámetros de FISTA. `lam` es el λ de BPDN."""
    lam: float = DEFAULT_LAMBDA
    max_iters: int = 30
    lipschitz: Optional[float] = None
    power_iters: int = 100
    power_tol: float = 1e-3
    power_seed: int = 0
    record_trace: bool = True

    def __post_init__(self):
        if not self.lam >= 0:
            raise ParameterError(f"lambda debe ser >= 0 (recibido {self.lam})")
        if self.max_iters < 1:
            raise ParameterError(f"max_iters debe ser >= 1 (recibido {self.max_iters})")
        if self.power_iters < 1:
            raise ParameterError(f"power_iters debe ser >= 1 (recibido {self.power_iters})")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ParameterError(f"lipschitz debe ser > 0 (recibido {self.lipschitz})")

    @classmethod
    def from_config(cls, config: Config, **overrides) -> "SolverConfig":
        """Lee la sección `solver` de settings.yaml / .env; los overrides (flags CLI) ganan."""
        values = dict(
            lam=config.get_float("solver.lambda", DEFAULT_LAMBDA),
            max_iters=config.get_int("solver.max_iters", 30),
            power_iters=config.get_int("solver.power_iters", 100),
            power_tol=config.get_float("solver.power_tol", 1e-3),
            power_seed=config.get_int("solver.power_seed", 0),
            record_trace=config.get_bool("solver.record_trace", True),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class SolveState:
    """Estado que se arrastra entre time-steps."""
    theta: np.ndarray
    momentum_point: np.ndarray
    t: float = 1.0

    def __post_init__(self):
        if self.t < 1:
            raise ValidationError(f"El escalar de momento t debe ser >= 1 (recibido {self.t})")
        if self.theta.shape != self.momentum_point.shape:
            raise DimensionError("theta y momentum_point deben tener la misma longitud")

    @classmethod
    def restart(cls, theta: np.ndarray) -> "SolveState":
        return cls(theta=theta.copy(), momentum_point=theta.copy(), t=1.0)


@dataclass
class SolveReport:
    """Frame reconstruido y diagnósticos de una resolución."""
    frame: Frame
    theta: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    wall_time: float
    lipschitz: float = field(default=float("nan"))


def soft_threshold(v, t: float) -> np.ndarray:
    """Operador proximal de ‖·‖₁: sign(v)·max(|v| − t, 0)."""
    if t < 0:
        raise ParameterError(f"El umbral debe ser >= 0 (recibido {t})")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def clamp_nonneg(frame: Frame) -> Frame:
    """Lleva a 0 los valores negativos."""
    return Frame(frame.shape, np.maximum(frame.values, 0.0))


def objective(op: LinearOperator, basis: Basis, theta: np.ndarray, y: np.ndarray, lam: float) -> float:
    residual = op.forward(basis.synthesize(theta)) - y
    return float(0.5 * residual @ residual + lam * np.abs(theta).sum())


def estimate_lipschitz(op: LinearOperator, basis: Basis, cfg: SolverConfig) -> float:
    """
    Iteración de potencia sobre θ ↦ Ψᵀ Φᵀ Φ Ψ θ desde un punto aleatorio
    sembrado. Devuelve el cociente de Rayleigh al agotar power_iters o
    cuando el cambio relativo baja de power_tol.

    Raises:
        DegenerateError: si el operador anula el iterado (Φ nulo).
    """
    _check_dimensions(op, basis)
    rng = np.random.default_rng(cfg.power_seed)
    v = rng.standard_normal(op.n)
    v /= np.linalg.norm(v)

    estimate = 0.0
    previous = None
    for k in range(cfg.power_iters):
        w = basis.analyze(op.adjoint(op.forward(basis.synthesize(v))))
        estimate = float(v @ w)
        norm = float(np.linalg.norm(w))
        if norm == 0.0 or not np.isfinite(norm):
            raise DegenerateError("El operador ΦΨ es nulo: no se puede estimar L")
        v = w / norm
        if previous is not None and abs(estimate - previous) < cfg.power_tol * abs(estimate):
            logger.debug(f"Iteración de potencia convergió en {k + 1} pasos: L={estimate:.6g}")
            break
        previous = estimate

    if not estimate > 0:
        raise DegenerateError(f"Estimación de L no positiva ({estimate})")
    return estimate


@lru_cache(maxsize=64)
def _cached_lipschitz(op, basis, power_iters: int, power_tol: float, power_seed: int) -> float:
    cfg = SolverConfig(power_iters=power_iters, power_tol=power_tol, power_seed=power_seed)
    return estimate_lipschitz(op, basis, cfg)


def lipschitz_for(op: LinearOperator, basis: Basis, cfg: SolverConfig) -> float:
    """L de la configuración si viene dado; si no, estimado una vez por par (operador, base)."""
    if cfg.lipschitz is not None:
        return cfg.lipschitz
    return _cached_lipschitz(op, basis, cfg.power_iters, cfg.power_tol, cfg.power_seed)


def _check_dimensions(op: LinearOperator, basis: Basis) -> None:
    if basis.shape.n != op.n:
        raise DimensionError(f"La base tiene N={basis.shape.n} pero el operador n={op.n}")


def fista_solve(
    op: LinearOperator,
    basis: Basis,
    y: MeasurementVector,
    cfg: SolverConfig,
    warm: Optional[SolveState] = None,
) -> Tuple[SolveReport, SolveState]:
    """
    Corre exactamente cfg.max_iters iteraciones de FISTA.

    Arranca desde warm.theta si se provee (con momento reiniciado), o
    desde 0. El frame final es clamp_nonneg(Ψθ̂).
    """
    _check_dimensions(op, basis)
    if y.m != op.m:
        raise DimensionError(f"y tiene longitud {y.m}, el operador espera m={op.m}")
    if not np.all(np.isfinite(y.values)):
        raise ValidationError("El vector de medición contiene valores no finitos")
    if warm is not None and warm.theta.shape != (op.n,):
        raise DimensionError(f"El warm start tiene longitud {warm.theta.size}, se esperaba {op.n}")

    lipschitz = lipschitz_for(op, basis, cfg)
    step = 1.0 / lipschitz
    threshold = cfg.lam / lipschitz
    target = y.values

    started = time.perf_counter()
    theta = warm.theta.copy() if warm is not None else np.zeros(op.n)
    point = theta.copy()
    t = 1.0
    trace: List[float] = []

    for _ in range(cfg.max_iters):
        residual = op.forward(basis.synthesize(point)) - target
        gradient = basis.analyze(op.adjoint(residual))
        theta_next = soft_threshold(point - step * gradient, threshold)
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        point = theta_next + ((t - 1.0) / t_next) * (theta_next - theta)
        theta, t = theta_next, t_next
        if cfg.record_trace:
            trace.append(objective(op, basis, theta, target, cfg.lam))

    frame = clamp_nonneg(Frame(basis.shape, basis.synthesize(theta)))
    wall_time = time.perf_counter() - started

    report = SolveReport(
        frame=frame,
        theta=theta,
        objective_trace=np.asarray(trace),
        iterations=cfg.max_iters,
        wall_time=wall_time,
        lipschitz=lipschitz,
    )
    return report, SolveState.restart(theta)


def reconstruct_recording(
    op: LinearOperator,
    basis: Basis,
    measurements: Sequence[MeasurementVector] | MeasurementSet,
    cfg: SolverConfig,
    warm_start: bool = True,
) -> List[SolveReport]:
    """
    Resuelve cada time-step en orden, pasando el θ̂ de t como punto de
    partida de t+1 (el primero arranca en 0). Con warm_start=False cada
    paso arranca en frío.
    """
    if isinstance(measurements, MeasurementSet):
        measurements = measurements.vectors
    for t, y in enumerate(measurements):
        if y.m != op.m:
            raise DimensionError(f"time-step {t}: y tiene longitud {y.m}, se esperaba m={op.m}")
    if not measurements:
        return []

    cfg = dataclasses.replace(cfg, lipschitz=lipschitz_for(op, basis, cfg))
    reports: List[SolveReport] = []
    state: Optional[SolveState] = None

    for t, y in enumerate(measurements):
        try:
            report, next_state = fista_solve(op, basis, y, cfg, warm=state if warm_start else None)
        except TactileCsError as e:
            raise ValidationError(f"time-step {t}: {e}") from e
        reports.append(report)
        state = next_state

    total = sum(r.wall_time for r in reports)
    rate = len(reports) / total if total > 0 else float("inf")
    logger.info(
        f"Reconstruidos {len(reports)} frames (L={cfg.lipschitz:.4g}, λ={cfg.lam}, "
        f"{cfg.max_iters} iteraciones): {rate:.1f} frames/s"
    )
    return reports


def residual_norm(op: LinearOperator, frame: Frame, y: MeasurementVector) -> float:
    """‖y − Φx̂‖₂ sobre el frame ya recortado."""
    return float(np.linalg.norm(y.values - op.forward(frame.values)))
