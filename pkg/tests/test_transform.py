# tests/test_transform.py

# Importaciones de Terceros
import numpy as np
import pytest
import pywt

# Importaciones Locales
from src.errors import DimensionError, ParameterError
from src.grid import Frame, GridShape, Recording
from src.transform import (
    WaveletBasis,
    WaveletKind,
    forward,
    inverse,
    max_levels,
    nnz,
    sparsity_series,
    sparsity_stats,
)
from src.scenario import ScenarioKind, ScenarioSpec, generate, smooth


def test_default_levels_are_maximal():
    assert max_levels(GridShape(40, 40)) == 3
    assert max_levels(GridShape(64, 64)) == 6
    assert WaveletBasis.haar(GridShape(64, 64)).levels == 6


def test_levels_out_of_range():
    with pytest.raises(ParameterError):
        WaveletBasis.haar(GridShape(40, 40), levels=4)
    with pytest.raises(ParameterError):
        WaveletBasis.haar(GridShape(3, 5))


def test_constant_frame_has_single_dc_coefficient():
    c = 1.7
    basis = WaveletBasis.haar(GridShape(4, 4), levels=2)
    coeffs = forward(basis, Frame(basis.shape, np.full(16, c)))
    assert coeffs[0] == pytest.approx(4 * c)
    assert np.count_nonzero(coeffs[1:]) == 0
    assert nnz(coeffs) == 1


def test_two_by_two_haar_coefficients():
    a, b, c, d = 1.0, 2.0, 3.0, 5.0
    basis = WaveletBasis.haar(GridShape(2, 2), levels=1)
    coeffs = forward(basis, Frame.from_grid(np.array([[a, b], [c, d]])))
    expected = [(a + b + c + d) / 2, (a - b + c - d) / 2, (a + b - c - d) / 2, (a - b - c + d) / 2]
    np.testing.assert_allclose(coeffs, expected, atol=1e-12)


def test_haar_matches_explicit_orthonormal_matrix():
    basis = WaveletBasis.haar(GridShape(2, 2), levels=1)
    psi_t = np.array([basis.analyze(e) for e in np.eye(4)]).T
    np.testing.assert_allclose(psi_t @ psi_t.T, np.eye(4), atol=1e-12)


def test_round_trip_and_norm_preservation(rng):
    basis = WaveletBasis.haar(GridShape(8, 8))
    for _ in range(20):
        frame = Frame(basis.shape, rng.standard_normal(64))
        coeffs = forward(basis, frame)
        assert np.linalg.norm(coeffs) == pytest.approx(np.linalg.norm(frame.values), rel=1e-10)
        assert np.max(np.abs(inverse(basis, coeffs).values - frame.values)) < 1e-10

        theta = rng.standard_normal(64)
        np.testing.assert_allclose(forward(basis, inverse(basis, theta)), theta, atol=1e-10)


def test_non_square_grid_round_trip(rng):
    basis = WaveletBasis.haar(GridShape(8, 12))
    assert basis.levels == 2
    values = rng.standard_normal(96)
    np.testing.assert_allclose(basis.synthesize(basis.analyze(values)), values, atol=1e-10)


def test_linearity(rng):
    basis = WaveletBasis.haar(GridShape(16, 16))
    x, z = rng.standard_normal(256), rng.standard_normal(256)
    np.testing.assert_allclose(
        basis.analyze(2.5 * x - 0.5 * z),
        2.5 * basis.analyze(x) - 0.5 * basis.analyze(z),
        atol=1e-10,
    )


def test_inverse_edge_cases():
    basis = WaveletBasis.haar(GridShape(4, 4), levels=2)
    dc = np.zeros(16)
    dc[0] = 4 * 0.3
    np.testing.assert_allclose(inverse(basis, dc).values, np.full(16, 0.3), atol=1e-12)
    assert np.all(inverse(basis, np.zeros(16)).values == 0.0)


def test_shape_mismatch():
    basis = WaveletBasis.haar(GridShape(4, 4))
    with pytest.raises(DimensionError):
        forward(basis, Frame.zeros(GridShape(2, 8)))
    with pytest.raises(DimensionError):
        inverse(basis, np.zeros(8))


def test_d4_is_orthonormal_analysis_only(rng):
    basis = WaveletBasis(WaveletKind.D4, GridShape(16, 16))
    values = rng.standard_normal(256)
    assert np.linalg.norm(basis.analyze(values)) == pytest.approx(np.linalg.norm(values), rel=1e-10)
    with pytest.raises(ParameterError, match="D4"):
        basis.synthesize(np.zeros(256))


def test_nnz_zero_vector_and_tolerance():
    assert nnz(np.zeros(16)) == 0
    assert nnz(np.array([1e-10, -1e-8, 0.5]), abs_tol=1e-9) == 2
    with pytest.raises(ParameterError):
        nnz(np.zeros(4), abs_tol=-1.0)


def test_sparsity_series_and_stats():
    shape = GridShape(8, 8)
    data = np.zeros((4, shape.n))
    data[2] = 1.0
    data[3, :4] = 2.0
    rec = Recording(shape, 1e-3, data)
    basis = WaveletBasis.haar(shape)

    series = sparsity_series(rec, basis)
    assert series.tolist()[:3] == [0, 0, 1]
    assert series[3] > 1

    stats = sparsity_stats(rec, basis, series=series)
    assert stats.contact_steps == 2
    assert stats.max == series.max()
    assert stats.mean == pytest.approx(series.mean())
    assert stats.contact_mean == pytest.approx(series[2:].mean())


def test_coefficient_layout_puts_coarsest_approximation_first(rng):
    shape = GridShape(40, 40)
    basis = WaveletBasis.haar(shape)
    values = rng.standard_normal(shape.n)
    coeffs = basis.analyze(values)

    parts = pywt.wavedec2(values.reshape(40, 40), "haar", mode="periodization", level=3)
    assert basis.approximation_size == 25
    np.testing.assert_allclose(coeffs[:25], parts[0].reshape(-1), atol=1e-12)
    start = 25
    for horizontal, vertical, diagonal in parts[1:]:
        for band in (vertical, horizontal, diagonal):
            np.testing.assert_allclose(coeffs[start:start + band.size], band.reshape(-1), atol=1e-12)
            start += band.size
    assert start == shape.n


def test_square_press_is_sparser_in_haar_than_d4():
    spec = ScenarioSpec(ScenarioKind.SQUARE_PRESS, GridShape(40, 40), steps=40, seed=7)
    frame = generate(spec).frame(20)
    d2 = nnz(forward(WaveletBasis(WaveletKind.D2, spec.shape), frame))
    d4 = nnz(forward(WaveletBasis(WaveletKind.D4, spec.shape), frame))
    assert 0 < d2 < d4


@pytest.mark.parametrize("kind", [ScenarioKind.SQUARE_PRESS, ScenarioKind.SHAPE_DRAG, ScenarioKind.BLOB_PATH])
def test_haar_beats_d4_on_every_scenario(kind):
    spec = ScenarioSpec(kind, GridShape(40, 40), steps=60, seed=0)
    rec = smooth(generate(spec), 10)
    d2 = sparsity_stats(rec, WaveletBasis(WaveletKind.D2, rec.shape))
    d4 = sparsity_stats(rec, WaveletBasis(WaveletKind.D4, rec.shape))
    assert d2.mean < d4.mean
    assert d2.contact_steps > 0
    assert d2.contact_mean <= 0.25 * rec.shape.n
