# tests/conftest.py

"""Fixtures compartidas por los tests."""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
from pathlib import Path

# Importaciones de Terceros
import numpy as np
import pytest

# Importaciones Locales
from src.grid import GridShape, Recording

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_recording(rng) -> Recording:
    shape = GridShape(4, 4)
    return Recording(shape, 1e-3, rng.uniform(0.0, 2.5, size=(5, shape.n)))
