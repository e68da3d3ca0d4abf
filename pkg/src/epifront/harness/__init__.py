"""Configuration, CLI, sweeps, and figure emission."""

from .config import RunConfig, SCHEMA_VERSION
from .sweep import SweepSpec, sweep

__all__ = ["RunConfig", "SCHEMA_VERSION", "SweepSpec", "sweep"]
