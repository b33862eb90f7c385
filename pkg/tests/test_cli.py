# tests/test_cli.py

# Importaciones de la Biblioteca Estándar
from pathlib import Path

# Importaciones de Terceros
import numpy as np
import pandas as pd
import pytest
import yaml

# Importaciones Locales
import main
from src.grid import GridShape, Recording, import_csv, read_measurements, read_recording, write_recording

SPEC = {"kind": "square_press", "rows": 8, "cols": 8, "steps": 8, "footprint": [2, 2], "seed": 1}


@pytest.fixture
def cli(config_dir):
    def run(*args) -> int:
        return main.main(["--config-dir", str(config_dir), *[str(a) for a in args]])
    return run


@pytest.fixture
def recording_file(tmp_path, cli) -> Path:
    spec = tmp_path / "spec.yaml"
    spec.write_text(yaml.safe_dump(SPEC), encoding="utf-8")
    out = tmp_path / "press.txcs"
    assert cli("generate", "--spec", spec, "--out", out, "--smooth", 2, "--noise-seed", 0) == 0
    return out


def test_generate_writes_recording(recording_file):
    rec = read_recording(recording_file)
    assert rec.shape == GridShape(8, 8)
    assert rec.steps == 8
    assert rec.dt == pytest.approx(1e-3)


def test_generate_exports_csv_copy(tmp_path, cli):
    spec = tmp_path / "spec.yaml"
    spec.write_text(yaml.safe_dump(SPEC), encoding="utf-8")
    out, csv = tmp_path / "press.txcs", tmp_path / "press.csv"
    assert cli("generate", "--spec", spec, "--out", out, "--csv", csv) == 0
    rec = read_recording(out)
    loaded = import_csv(csv, rec.shape, rec.dt)
    assert loaded == rec


def test_measure_and_reconstruct_pipeline(tmp_path, cli, recording_file):
    meas = tmp_path / "press.meas"
    assert cli("measure", "--rec", recording_file, "--m", 32, "--block", 16, "--seed", 0, "--out", meas) == 0
    assert read_measurements(meas).data.shape == (8, 32)

    recon = tmp_path / "recon.txcs"
    trace = tmp_path / "trace.csv"
    report = tmp_path / "report.csv"
    code = cli(
        "reconstruct", "--meas", meas, "--m", 32, "--block", 16, "--seed", 0,
        "--iters", 10, "--lambda", 0.1, "--out", recon, "--trace", trace, "--report", report,
    )
    assert code == 0
    assert read_recording(recon).steps == 8
    assert len(pd.read_csv(trace)) == 8 * 10
    residuals = pd.read_csv(report)["residual"]
    assert len(residuals) == 8 and np.all(np.isfinite(residuals))

    again = tmp_path / "again.meas"
    assert cli("measure", "--rec", recon, "--m", 32, "--block", 16, "--seed", 0, "--out", again) == 0


def test_reconstruct_rejects_wrong_m(tmp_path, cli, recording_file):
    meas = tmp_path / "press.meas"
    assert cli("measure", "--rec", recording_file, "--m", 32, "--block", 16, "--out", meas) == 0
    code = cli("reconstruct", "--meas", meas, "--m", 16, "--block", 16, "--out", tmp_path / "x.txcs")
    assert code == 1


def test_sparsity_of_zero_recording(tmp_path, cli):
    rec = tmp_path / "zero.txcs"
    write_recording(Recording(GridShape(8, 8), 1e-3, np.zeros((5, 64))), rec)
    out = tmp_path / "nnz.csv"
    assert cli("sparsity", "--rec", rec, "--basis", "d4", "--out", out) == 0
    table = pd.read_csv(out)
    assert table["nnz"].tolist() == [0] * 5


def test_wiring_report(tmp_path, cli):
    out = tmp_path / "wiring.csv"
    assert cli("wiring-report", "--n", 64, "--m", 20, "--block", 16, "--seed", 3, "--out", out) == 0
    table = pd.read_csv(out)
    assert len(table) == 4
    assert table["rows_selected"].sum() == 20


def test_usage_errors_exit_1(cli, capsys):
    assert cli("wiring-report", "--n", 64, "--m", 20, "--out", "x.csv", "--bogus") == 1
    assert "usage" in capsys.readouterr().err
    assert cli("sparsity", "--rec", "x.txcs", "--basis", "d3", "--out", "y.csv") == 1
    assert cli() == 1


def test_validation_error_exits_1(tmp_path, cli):
    assert cli("wiring-report", "--n", 48, "--m", 20, "--block", 32, "--out", tmp_path / "w.csv") == 1


def test_io_errors_exit_2(tmp_path, cli):
    assert cli("measure", "--rec", tmp_path / "missing.txcs", "--m", 8, "--out", tmp_path / "m") == 2
    assert cli("wiring-report", "--n", 64, "--m", 8, "--out", tmp_path / "no" / "dir.csv") == 2

    junk = tmp_path / "junk.txcs"
    junk.write_bytes(b"not a container")
    assert cli("sparsity", "--rec", junk, "--basis", "d2", "--out", tmp_path / "s.csv") == 2


def test_sweep_is_reproducible(tmp_path, cli):
    config = tmp_path / "exp.yaml"
    config.write_text(yaml.safe_dump({
        "version": 1,
        "smoothing_width": 2,
        "scenarios": [
            {"name": "press", "kind": "square_press", "rows": 8, "cols": 8, "steps": 10, "footprint": [4, 4]},
            {"name": "drag", "kind": "shape_drag", "rows": 8, "cols": 8, "steps": 10,
             "footprint": [4, 4], "bar_width": 1, "velocity": [0.0, 0.5]},
        ],
        "operator": {"block_size": 16, "seed": 0, "m": ["N/2"]},
        "solver": {"lambda": 0.1, "iterations": [5]},
    }), encoding="utf-8")

    first, second = tmp_path / "a", tmp_path / "b"
    assert cli("sweep", "--config", config, "--out-dir", first) == 0
    assert cli("sweep", "--config", config, "--out-dir", second, "--jobs", 2) == 0

    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert "sweep.csv" in names and "timing.csv" not in names
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_sweep_config_error_exits_1(tmp_path, cli):
    config = tmp_path / "exp.yaml"
    config.write_text("version: 1\nscenarios: []\n", encoding="utf-8")
    assert cli("sweep", "--config", config, "--out-dir", tmp_path / "out") == 1
