"""Macro forecasting horse race: data transforms, factor models, a machine
learning model zoo, cross-validated tuning, an expanding-window
out-of-sample harness, and forecast evaluation statistics."""

from ._backend import get_backend

__version__ = "0.1.0"

__all__ = ["get_backend", "__version__"]
