"""Hyperparameter grids, tuners and the freeze/refresh schedule."""

from .grids import Grid, default_grid, resolve_point
from .tuners import (
    Refresh,
    TuneDecision,
    ic_select,
    ic_value,
    kfold_cv,
    poos_cv,
    refresh_schedule,
    score_ic,
    tune,
    tune_seed,
)

__all__ = [
    "Grid",
    "Refresh",
    "TuneDecision",
    "default_grid",
    "ic_select",
    "ic_value",
    "kfold_cv",
    "poos_cv",
    "refresh_schedule",
    "resolve_point",
    "score_ic",
    "tune",
    "tune_seed",
]
