#!/usr/bin/env python3
# src/evaluation.py

"""
Métrica PSNR, series por time-step y el arnés de barridos
(cantidad de mediciones x presupuesto de iteraciones).

Pipeline de cada configuración:
    generate -> smooth -> add_noise -> build_sbhe -> medir -> reconstruct
    -> PSNR(reconstruido vs ground truth) y PSNR(ruidoso vs ground truth)

El pico del PSNR es el ancho del rango del sensor (fijo por grabación).
Los time-steps con PSNR infinito (error cero) se excluyen de las medias
y se cuentan aparte.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

# Importaciones de Terceros
import numpy as np
import pandas as pd

# Importaciones Locales
from .errors import DimensionError, ParameterError
from .experiment import ExperimentConfig, RunKey
from .grid import Frame, MeasurementSet, Recording
from .measure import LinearOperator, build_sbhe, measure_recording
from .scenario import ScenarioSpec, add_noise, generate, smooth
from .solve import Basis, SolverConfig, fista_solve, reconstruct_recording
from .transform import WaveletBasis

logger = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ["t", "psnr_reconstructed_dB", "psnr_noisy_dB"]


def psnr(reference: Frame, candidate: Frame, peak: float) -> float:
    """10·log₁₀(peak² / MSE); +inf cuando MSE = 0."""
    if reference.shape != candidate.shape:
        raise DimensionError(f"Formas distintas: {reference.shape} vs {candidate.shape}")
    if not peak > 0:
        raise ParameterError(f"peak debe ser > 0 (recibido {peak})")
    diff = reference.values - candidate.values
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


@dataclass(frozen=True)
class SeriesStats:
    mean: float
    min: float
    max: float
    infinite: int


def _stats(values: np.ndarray) -> SeriesStats:
    finite = values[np.isfinite(values)]
    infinite = int(values.size - finite.size)
    if finite.size == 0:
        return SeriesStats(math.inf, math.inf, math.inf, infinite)
    return SeriesStats(float(finite.mean()), float(finite.min()), float(finite.max()), infinite)


@dataclass
class PsnrSeries:
    """PSNR por time-step del reconstruido y del ruidoso, ambos contra el ground truth."""
    reconstructed: np.ndarray = field(default_factory=lambda: np.zeros(0))
    noisy: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.reconstructed = np.asarray(self.reconstructed, dtype=np.float64)
        self.noisy = np.asarray(self.noisy, dtype=np.float64)
        if self.reconstructed.shape != self.noisy.shape:
            raise DimensionError("Las series reconstruida y ruidosa deben tener la misma longitud")

    def __len__(self) -> int:
        return int(self.reconstructed.size)

    @property
    def reconstructed_stats(self) -> SeriesStats:
        return _stats(self.reconstructed)

    @property
    def noisy_stats(self) -> SeriesStats:
        return _stats(self.noisy)


def psnr_series(truth: Recording, noisy: Recording, reconstructed: Sequence[Frame]) -> PsnrSeries:
    peak = truth.sensor_range[1] - truth.sensor_range[0]
    recon = [psnr(truth.frame(t), frame, peak) for t, frame in enumerate(reconstructed)]
    noise = [psnr(truth.frame(t), noisy.frame(t), peak) for t in range(len(recon))]
    return PsnrSeries(np.array(recon), np.array(noise))


def emit_timeseries(series: PsnrSeries, path: str | Path) -> None:
    """CSV t, psnr_reconstructed_dB, psnr_noisy_dB; el infinito se escribe como 'inf'."""
    table = pd.DataFrame({
        "t": np.arange(len(series)),
        "psnr_reconstructed_dB": series.reconstructed,
        "psnr_noisy_dB": series.noisy,
    }, columns=TIMESERIES_COLUMNS)
    table.to_csv(path, index=False, na_rep="nan")


def read_timeseries(path: str | Path) -> PsnrSeries:
    table = pd.read_csv(path)
    return PsnrSeries(
        table["psnr_reconstructed_dB"].to_numpy(dtype=np.float64),
        table["psnr_noisy_dB"].to_numpy(dtype=np.float64),
    )


# ---------------------------
# Barridos
# ---------------------------

@dataclass(frozen=True)
class SweepRow:
    scenario: str
    n: int
    m: int
    iterations: int
    compression_ratio: float
    recon_mean_dB: float
    recon_min_dB: float
    recon_max_dB: float
    recon_range_dB: float
    recon_infinite: int
    noisy_mean_dB: float
    noisy_min_dB: float
    noisy_max_dB: float
    noisy_infinite: int
    mean_solve_time_s: float

    @property
    def key(self) -> RunKey:
        return RunKey(self.scenario, self.n, self.m, self.iterations)

    @property
    def frames_per_sec(self) -> float:
        return 1.0 / self.mean_solve_time_s if self.mean_solve_time_s > 0 else math.inf


_TIMING_COLUMNS = ("mean_solve_time_s",)


@dataclass
class SweepResult:
    """Una fila por configuración, en el orden de claves del archivo."""
    rows: List[SweepRow]
    series: Dict[RunKey, PsnrSeries]

    def to_frame(self, include_timing: bool = False) -> pd.DataFrame:
        table = pd.DataFrame([asdict(row) for row in self.rows])
        if not include_timing and not table.empty:
            table = table.drop(columns=list(_TIMING_COLUMNS))
        return table

    def row(self, scenario: str, m: int, iterations: int) -> SweepRow:
        for r in self.rows:
            if (r.scenario, r.m, r.iterations) == (scenario, m, iterations):
                return r
        raise KeyError((scenario, m, iterations))

    def write(self, out_dir: str | Path, timeseries: bool = True, timing: bool = False) -> List[Path]:
        """
        sweep.csv con las columnas determinísticas; psnr_<clave>.csv por
        configuración; timing.csv solo si se pide (los tiempos no se repiten
        byte a byte entre corridas).
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = [out_dir / "sweep.csv"]
        self.to_frame().to_csv(written[0], index=False)
        if timeseries:
            for key, series in self.series.items():
                path = out_dir / f"psnr_{key.slug}.csv"
                emit_timeseries(series, path)
                written.append(path)
        if timing:
            path = out_dir / "timing.csv"
            table = pd.DataFrame([
                {**asdict(r.key), "mean_solve_time_s": r.mean_solve_time_s, "frames_per_sec": r.frames_per_sec}
                for r in self.rows
            ])
            table.to_csv(path, index=False)
            written.append(path)
        return written


@dataclass(frozen=True)
class ScenarioData:
    """Ground truth filtrado y su versión ruidosa."""
    truth: Recording
    noisy: Recording


def prepare_scenario(spec: ScenarioSpec, smoothing_width: int, noise) -> ScenarioData:
    truth = smooth(generate(spec), smoothing_width)
    return ScenarioData(truth=truth, noisy=add_noise(truth, noise))


def run_configuration(
    key: RunKey,
    data: ScenarioData,
    config: ExperimentConfig,
) -> Tuple[SweepRow, PsnrSeries]:
    """Mide y reconstruye una configuración con warm starts."""
    op = build_sbhe(key.n, key.m, config.block_size, config.operator_seed)
    basis = WaveletBasis.haar(data.truth.shape)
    cfg = SolverConfig(
        lam=config.lam,
        max_iters=key.iterations,
        power_iters=config.power_iters,
        power_tol=config.power_tol,
        record_trace=False,
    )
    measurements = measure_recording(op, data.noisy)
    reports = reconstruct_recording(op, basis, measurements, cfg)
    series = psnr_series(data.truth, data.noisy, [r.frame for r in reports])

    recon, noisy = series.reconstructed_stats, series.noisy_stats
    mean_time = float(np.mean([r.wall_time for r in reports])) if reports else 0.0
    row = SweepRow(
        scenario=key.scenario,
        n=key.n,
        m=key.m,
        iterations=key.iterations,
        compression_ratio=key.n / key.m,
        recon_mean_dB=recon.mean,
        recon_min_dB=recon.min,
        recon_max_dB=recon.max,
        recon_range_dB=recon.max - recon.min,
        recon_infinite=recon.infinite,
        noisy_mean_dB=noisy.mean,
        noisy_min_dB=noisy.min,
        noisy_max_dB=noisy.max,
        noisy_infinite=noisy.infinite,
        mean_solve_time_s=mean_time,
    )
    logger.info(
        f"[{key.slug}] PSNR reconstruido {recon.mean:.2f} dB "
        f"({recon.min:.2f}..{recon.max:.2f}), ruidoso {noisy.mean:.2f} dB, "
        f"{row.frames_per_sec:.1f} frames/s"
    )
    return row, series


def run_sweep(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """
    Corre todas las configuraciones. Con jobs > 1 usa un pool de hilos;
    los resultados se ordenan por clave, no por orden de finalización.
    """
    if jobs < 1:
        raise ParameterError(f"jobs debe ser >= 1 (recibido {jobs})")
    runs = config.configurations()
    prepared: Dict[str, ScenarioData] = {}
    for name, spec in config.scenarios:
        logger.info(f"Preparando escenario {name} ({spec.kind.value}, {spec.shape}, {spec.steps} steps)")
        prepared[name] = prepare_scenario(spec, config.smoothing_width, config.noise)

    def task(item):
        key, _spec = item
        return run_configuration(key, prepared[key.scenario], config)

    if jobs == 1:
        outcomes = [task(item) for item in runs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(task, runs))

    rows = [row for row, _ in outcomes]
    series = {row.key: s for row, s in outcomes}
    return SweepResult(rows=rows, series=series)


# ---------------------------
# Convergencia con / sin warm start
# ---------------------------

def iterations_to_reach(trace: np.ndarray, reference: float, rel_tol: float = 0.01) -> int:
    """Primera iteración (1-based) cuyo objetivo queda dentro de rel_tol del de referencia."""
    limit = reference + rel_tol * abs(reference)
    hits = np.flatnonzero(np.asarray(trace) <= limit)
    return int(hits[0]) + 1 if hits.size else len(trace)


def convergence_iterations(
    op: LinearOperator,
    basis: Basis,
    measurements: MeasurementSet,
    cfg: SolverConfig,
    reference_iters: int = 1000,
    warm_start: bool = True,
    rel_tol: float = 0.01,
) -> int:
    """
    Suma, sobre todos los time-steps, las iteraciones necesarias para
    quedar a rel_tol del objetivo de una resolución de referencia en frío
    de `reference_iters` iteraciones.
    """
    vectors = measurements.vectors
    reference_cfg = SolverConfig(
        lam=cfg.lam, max_iters=reference_iters, lipschitz=cfg.lipschitz,
        power_iters=cfg.power_iters, power_tol=cfg.power_tol, record_trace=True,
    )
    run_cfg = SolverConfig(
        lam=cfg.lam, max_iters=cfg.max_iters, lipschitz=cfg.lipschitz,
        power_iters=cfg.power_iters, power_tol=cfg.power_tol, record_trace=True,
    )
    references = [float(fista_solve(op, basis, y, reference_cfg)[0].objective_trace.min()) for y in vectors]
    reports = reconstruct_recording(op, basis, vectors, run_cfg, warm_start=warm_start)
    return sum(iterations_to_reach(r.objective_trace, ref, rel_tol) for r, ref in zip(reports, references))

