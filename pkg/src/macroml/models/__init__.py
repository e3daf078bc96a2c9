from .base import ConvergenceError, FitError
from .linear import fit_ols, fit_ridge, RidgeMode
from .elastic_net import fit_elastic_net
from .kernel_ridge import fit_krr, rbf_kernel, linear_kernel
from .forest import fit_random_forest
from .svr import fit_svr
from .specs import (
    GClass,
    Loss,
    ModelSpec,
    Shrinkage,
    Tuner,
    model_roster,
    resolve_model_name,
)

__all__ = [
    "ConvergenceError",
    "FitError",
    "fit_ols",
    "fit_ridge",
    "RidgeMode",
    "fit_elastic_net",
    "fit_krr",
    "rbf_kernel",
    "linear_kernel",
    "fit_random_forest",
    "fit_svr",
    "GClass",
    "Loss",
    "ModelSpec",
    "Shrinkage",
    "Tuner",
    "model_roster",
    "resolve_model_name",
]
