# tests/test_evaluation.py

# Importaciones de la Biblioteca Estándar
import math

# Importaciones de Terceros
import numpy as np
import pandas as pd
import pytest

# Importaciones Locales
from src.errors import DimensionError, ParameterError
from src.evaluation import (
    PsnrSeries,
    emit_timeseries,
    iterations_to_reach,
    psnr,
    read_timeseries,
    run_sweep,
)
from src.experiment import ExperimentConfig
from src.grid import Frame, GridShape


def _sweep_config(**changes):
    data = {
        "version": 1,
        "smoothing_width": 3,
        "noise": {"sigma_mid": 0.0628, "seed": 0},
        "scenarios": [
            {"name": "press", "kind": "square_press", "rows": 8, "cols": 8, "steps": 12, "footprint": [4, 4]},
        ],
        "operator": {"block_size": 16, "seed": 0, "m": ["N/2", 48]},
        "solver": {"lambda": 0.1, "iterations": [5, 10]},
    }
    data.update(changes)
    return ExperimentConfig.from_dict(data)


def test_psnr_reference_values():
    shape = GridShape(4, 4)
    truth = Frame(shape, np.full(16, 1.0))
    assert psnr(truth, truth, 2.5) == math.inf
    assert psnr(truth, Frame(shape, np.full(16, 1.25)), 2.5) == pytest.approx(20.0)
    # MSE = 0.00625 con error uniforme √0.00625
    off = Frame(shape, np.full(16, 1.0 + math.sqrt(0.00625)))
    assert psnr(truth, off, 2.5) == pytest.approx(30.0)


def test_psnr_errors():
    with pytest.raises(DimensionError):
        psnr(Frame.zeros(GridShape(2, 2)), Frame.zeros(GridShape(2, 3)), 2.5)
    with pytest.raises(ParameterError):
        psnr(Frame.zeros(GridShape(2, 2)), Frame.zeros(GridShape(2, 2)), 0.0)


def test_series_stats_skip_infinite_steps():
    series = PsnrSeries([math.inf, 30.0, 40.0], [20.0, 25.0, math.inf])
    stats = series.reconstructed_stats
    assert (stats.mean, stats.min, stats.max, stats.infinite) == (35.0, 30.0, 40.0, 1)
    assert series.noisy_stats.mean == pytest.approx(22.5)


def test_timeseries_csv(tmp_path):
    path = tmp_path / "empty.csv"
    emit_timeseries(PsnrSeries(), path)
    assert path.read_text().splitlines() == ["t,psnr_reconstructed_dB,psnr_noisy_dB"]

    path = tmp_path / "one.csv"
    emit_timeseries(PsnrSeries([41.5], [33.25]), path)
    assert len(path.read_text().splitlines()) == 2

    path = tmp_path / "inf.csv"
    emit_timeseries(PsnrSeries([math.inf, 12.0], [10.0, 11.0]), path)
    assert "inf" in path.read_text()
    assert read_timeseries(path).reconstructed[0] == math.inf


def test_iterations_to_reach():
    trace = np.array([10.0, 5.0, 2.02, 2.0, 2.0])
    assert iterations_to_reach(trace, 2.0, rel_tol=0.01) == 3
    assert iterations_to_reach(trace, 1.0, rel_tol=0.01) == 5


def test_sweep_rows_follow_configuration_order():
    config = _sweep_config()
    result = run_sweep(config)
    assert [(r.m, r.iterations) for r in result.rows] == [(32, 5), (32, 10), (48, 5), (48, 10)]
    row = result.row("press", 48, 10)
    assert row.compression_ratio == pytest.approx(64 / 48)
    assert row.recon_min_dB <= row.recon_mean_dB <= row.recon_max_dB
    assert row.recon_range_dB == pytest.approx(row.recon_max_dB - row.recon_min_dB)
    assert len(result.series[row.key]) == 12
    assert "mean_solve_time_s" not in result.to_frame().columns


def test_parallel_sweep_matches_serial():
    config = _sweep_config()
    serial = run_sweep(config, jobs=1).to_frame()
    parallel = run_sweep(config, jobs=3).to_frame()
    pd.testing.assert_frame_equal(serial, parallel)
    with pytest.raises(ParameterError):
        run_sweep(config, jobs=0)


def test_sweep_write(tmp_path):
    result = run_sweep(_sweep_config(solver={"lambda": 0.1, "iterations": [5]}))
    written = result.write(tmp_path / "out", timeseries=True, timing=True)
    names = sorted(p.name for p in written)
    assert names == [
        "psnr_press_N64_M32_it5.csv",
        "psnr_press_N64_M48_it5.csv",
        "sweep.csv",
        "timing.csv",
    ]
    table = pd.read_csv(tmp_path / "out" / "sweep.csv")
    assert len(table) == 2
    assert {"recon_mean_dB", "noisy_mean_dB", "compression_ratio"} <= set(table.columns)
    assert "frames_per_sec" in pd.read_csv(tmp_path / "out" / "timing.csv").columns


def test_complete_measurements_invert_noiseless_input():
    config = _sweep_config(
        noise={"sigma_mid": 0.0, "seed": 0},
        operator={"block_size": 16, "m": ["N/1"]},
        solver={"lambda": 1e-6, "iterations": [500]},
    )
    row = run_sweep(config).rows[0]
    assert row.recon_mean_dB >= 80.0


@pytest.mark.slow
def test_square_press_40x40_beats_noise():
    config = ExperimentConfig.from_dict({
        "version": 1,
        "scenarios": [{"name": "press40", "kind": "square_press", "rows": 40, "cols": 40, "steps": 700}],
        "operator": {"block_size": 32, "seed": 0, "m": [400, 533, 800]},
        "solver": {"lambda": 0.1, "iterations": [30]},
    })
    result = run_sweep(config)
    assert len(result.rows) == 3
    row = result.row("press40", 533, 30)
    assert row.recon_mean_dB >= row.noisy_mean_dB + 1.0


@pytest.mark.slow
def test_iteration_budget_mostly_moves_the_minimum():
    # rampa de un solo step y sin filtro: el primer frame en contacto arranca
    # desde θ = 0, y con 10 iteraciones es el peor de todo el barrido
    config = ExperimentConfig.from_dict({
        "version": 1,
        "smoothing_width": 1,
        "scenarios": [{
            "name": "press64", "kind": "square_press", "rows": 64, "cols": 64,
            "steps": 800, "ramp_steps": 1,
        }],
        "operator": {"block_size": 32, "seed": 0, "m": ["N/3"]},
        "solver": {"lambda": 0.1, "iterations": [10, 20, 30]},
    })
    rows = run_sweep(config).rows
    means = [r.recon_mean_dB for r in rows]
    assert max(means) - min(means) < 0.5
    assert rows[0].recon_min_dB < min(r.recon_min_dB for r in rows[1:])


@pytest.mark.slow
def test_more_measurements_tighten_the_psnr_range():
    config = ExperimentConfig.from_dict({
        "version": 1,
        "scenarios": [{"name": "drag64", "kind": "shape_drag", "rows": 64, "cols": 64, "steps": 120}],
        "operator": {"block_size": 32, "seed": 0, "m": ["N/4", "N/2"]},
        "solver": {"lambda": 0.1, "iterations": [30]},
    })
    result = run_sweep(config)
    quarter = result.row("drag64", 1024, 30)
    half = result.row("drag64", 2048, 30)
    assert half.recon_range_dB <= quarter.recon_range_dB
    assert half.recon_mean_dB >= quarter.recon_mean_dB - 0.5
