"""Forecast evaluation: accuracy tables, equal-accuracy tests, and
feature-treatment regressions."""

from .dm import DegenerateVarianceError, TestResult, dm_test
from .fluctuation import FluctuationResult, fluctuation_critical_value, fluctuation_test
from .hac import bartlett_long_run, hac_covariance, long_run_variance, newey_west_bandwidth
from .mcs import model_confidence_set
from .regressions import (
    CollinearityError,
    EvalRegressionResult,
    FeatureDummies,
    heterogeneity_regression,
    treatment_regression,
)
from .tables import dm_against_reference, pseudo_r2, relative_rmspe_table

__all__ = [
    "CollinearityError",
    "DegenerateVarianceError",
    "EvalRegressionResult",
    "FeatureDummies",
    "FluctuationResult",
    "TestResult",
    "bartlett_long_run",
    "dm_against_reference",
    "dm_test",
    "fluctuation_critical_value",
    "fluctuation_test",
    "hac_covariance",
    "heterogeneity_regression",
    "long_run_variance",
    "model_confidence_set",
    "newey_west_bandwidth",
    "pseudo_r2",
    "relative_rmspe_table",
    "treatment_regression",
]
