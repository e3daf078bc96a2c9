from .panel import RawPanel, TargetKind, TargetSeries, apply_tcode, build_target, ingest_fredmd
from .factors import FactorSet, extract_factors
from .predictors import (
    Rotation,
    PredictorSet,
    Standardizer,
    assemble_predictors,
    lag_matrix,
)

__all__ = [
    "RawPanel",
    "TargetKind",
    "TargetSeries",
    "apply_tcode",
    "build_target",
    "ingest_fredmd",
    "FactorSet",
    "extract_factors",
    "Rotation",
    "PredictorSet",
    "Standardizer",
    "assemble_predictors",
    "lag_matrix",
]
