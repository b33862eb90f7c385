# tests/test_grid.py

# Importaciones de Terceros
import numpy as np
import pytest

# Importaciones Locales
from src.errors import DimensionError, FormatError, ParameterError, ValidationError
from src.grid import (
    HEADER,
    Frame,
    GridShape,
    MeasurementSet,
    MeasurementVector,
    Recording,
    export_csv,
    import_csv,
    read_measurements,
    read_recording,
    write_measurements,
    write_recording,
)
from src.scenario import ScenarioKind, ScenarioSpec, generate, smooth


def test_grid_shape_rejects_degenerate_dimensions():
    with pytest.raises(ParameterError, match="rows"):
        GridShape(1, 4)
    assert GridShape(40, 40).n == 1600
    assert GridShape(3, 5).index(2, 1) == 11


def test_frame_is_row_major_and_read_only():
    frame = Frame.from_grid(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert frame.values.tolist() == [1.0, 2.0, 3.0, 4.0]
    with pytest.raises(ValueError):
        frame.values[0] = 9.0


def test_frame_validation():
    with pytest.raises(DimensionError):
        Frame(GridShape(2, 2), np.zeros(5))
    with pytest.raises(ValidationError, match="no finitos"):
        Frame(GridShape(2, 2), [0.0, np.nan, 0.0, 0.0])


def test_zero_frame_file_layout(tmp_path):
    shape = GridShape(2, 2)
    rec = Recording.from_frames([Frame.zeros(shape)], dt=1e-3)
    path = tmp_path / "zero.txcs"
    write_recording(rec, path)

    raw = path.read_bytes()
    assert HEADER.size == 48
    assert len(raw) == HEADER.size + 16
    assert raw[:4] == b"TXCS"
    assert raw[HEADER.size:] == bytes(16)


def test_recording_round_trip_is_bit_exact(tmp_path, rng):
    shape = GridShape(4, 6)
    rec = Recording(shape, 1e-4, rng.uniform(0.0, 2.5, size=(7, shape.n)), (0.0, 2.5))
    path = tmp_path / "rec.txcs"
    write_recording(rec, path)

    loaded = read_recording(path)
    assert loaded == rec
    assert loaded.data.tobytes() == rec.data.tobytes()


def test_smoothed_scenario_round_trip_is_bit_exact(tmp_path):
    spec = ScenarioSpec(ScenarioKind.SQUARE_PRESS, GridShape(8, 8), steps=16, footprint=(4, 4))
    rec = smooth(generate(spec), 3)
    path = tmp_path / "press.txcs"
    write_recording(rec, path)
    assert read_recording(path) == rec


def test_recording_values_are_float32_representable():
    rec = Recording(GridShape(2, 2), 1e-3, [[0.1, 1.0 / 3.0, 2.0, 0.0]])
    assert rec.data.dtype == np.float64
    np.testing.assert_array_equal(rec.data, rec.data.astype(np.float32).astype(np.float64))


def test_recording_rejects_values_beyond_float32():
    with pytest.raises(ValidationError, match="float32"):
        Recording(GridShape(2, 2), 1e-3, np.full((1, 4), 1e40))


def test_write_refuses_non_finite_measurements_and_leaves_no_file(tmp_path):
    meas = MeasurementSet(GridShape(2, 2), 1e-3, [[1.0, np.nan]])
    path = tmp_path / "bad.txcs"
    with pytest.raises(ValidationError):
        write_measurements(meas, path)
    assert not path.exists()


def test_recording_rejects_nan():
    with pytest.raises(ValidationError, match="time-step 1"):
        Recording(GridShape(2, 2), 1e-3, [[0, 0, 0, 0], [0, np.nan, 0, 0]])


def test_empty_file_is_bad_magic(tmp_path):
    path = tmp_path / "empty.txcs"
    path.write_bytes(b"")
    with pytest.raises(FormatError, match="bad magic"):
        read_recording(path)


def test_truncated_payload_names_byte_counts(tmp_path):
    shape = GridShape(2, 2)
    rec = Recording(shape, 1e-3, np.ones((10, 4)))
    path = tmp_path / "trunc.txcs"
    write_recording(rec, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])

    with pytest.raises(FormatError, match="se esperaban 160 bytes, hay 144"):
        read_recording(path)


def test_record_type_is_checked(tmp_path):
    meas = MeasurementSet(GridShape(2, 2), 1e-3, np.ones((3, 2)))
    path = tmp_path / "meas.txcs"
    write_measurements(meas, path)
    with pytest.raises(FormatError, match="tipo de registro"):
        read_recording(path)

    loaded = read_measurements(path)
    assert loaded.m == 2 and len(loaded) == 3
    assert np.array_equal(loaded.data, meas.data)


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError, match="nope.txcs"):
        read_recording(tmp_path / "nope.txcs")


def test_measurement_vector_declared_length():
    assert MeasurementVector([1.0, 2.0]).m == 2
    with pytest.raises(DimensionError):
        MeasurementVector([1.0, 2.0], m=3)


def test_csv_export_import(tmp_path, small_recording):
    path = tmp_path / "rec.csv"
    export_csv(small_recording, path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("t,i0,i1")

    loaded = import_csv(path, small_recording.shape, small_recording.dt)
    np.testing.assert_allclose(loaded.data, small_recording.data, rtol=1e-12)
