# src/__init__.py
from .base_job import BaseJob
from .config_loader import Config

__all__ = ['BaseJob', 'Config']
