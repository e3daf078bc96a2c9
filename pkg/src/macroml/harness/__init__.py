"""Expanding-window out-of-sample experiment runner and forecast storage."""

from .runner import DEFAULT_HORIZONS, ExperimentConfig, run_experiment
from .store import (
    CSV_COLUMNS,
    SCHEMA_VERSION,
    ForecastRecord,
    ForecastStore,
    StoreSchemaError,
    compute_error_panel,
)

__all__ = [
    "CSV_COLUMNS",
    "DEFAULT_HORIZONS",
    "ExperimentConfig",
    "ForecastRecord",
    "ForecastStore",
    "SCHEMA_VERSION",
    "StoreSchemaError",
    "compute_error_panel",
    "run_experiment",
]
