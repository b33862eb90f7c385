#!/usr/bin/env python3
# src/errors.py

"""
Jerarquía de excepciones del toolkit.

Todas heredan de TactileCsError para que el CLI pueda mapearlas a
códigos de salida sin capturar excepciones genéricas.
"""

from __future__ import annotations


class TactileCsError(Exception):
    """Error base del toolkit."""


class ValidationError(TactileCsError, ValueError):
    """Valores no finitos, fuera de rango o entradas inválidas."""


class DimensionError(ValidationError):
    """Longitudes o formas incompatibles entre operadores y vectores."""


class ParameterError(ValidationError):
    """Parámetros de construcción inválidos (B, M, footprint, etc.)."""


class DegenerateError(ValidationError):
    """Operador nulo o problema sin solución útil."""


class ConfigError(ValidationError):
    """Archivo de experimento inválido. El mensaje empieza con la ruta del campo."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)


class FormatError(TactileCsError):
    """Contenedor TXCS corrupto, truncado o de versión desconocida."""
