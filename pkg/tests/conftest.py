"""Shared fixtures: synthetic panels and forecasting problems."""

import numpy as np
import pandas as pd
import pytest

from macroml.data.panel import RawPanel
from macroml.engine import ForecastProblem


def make_panel(T=264, n_series=5, seed=11, start="1968-01-01"):
    """Cointegrated-ish log-level panel with transform code 5 everywhere."""
    rng = np.random.default_rng(seed)
    dates = pd.date_range(start, periods=T, freq="MS")
    f = np.zeros(T)
    for t in range(1, T):
        f[t] = 0.8 * f[t - 1] + rng.standard_normal()
    cols = {}
    for j in range(n_series):
        growth = 0.002 + 0.002 * (0.5 * f + rng.standard_normal(T))
        cols[f"S{j}"] = np.exp(np.cumsum(growth))
    return RawPanel(
        dates=dates,
        names=tuple(cols),
        tcodes=np.array([5] * n_series),
        values=np.column_stack(list(cols.values())),
    )


def make_problem(T=360, n_x=8, seed=7, h=1, rho_f=0.7, start="1975-01-01"):
    """Factor-driven AR problem built directly (no level panel detour)."""
    rng = np.random.default_rng(seed)
    dates = pd.date_range(start, periods=T, freq="MS")
    f = np.zeros(T)
    for t in range(1, T):
        f[t] = rho_f * f[t - 1] + rng.standard_normal()
    X = np.outer(f, rng.standard_normal(n_x)) + 0.5 * rng.standard_normal((T, n_x))
    y = np.zeros(T)
    for t in range(1, T):
        y[t] = 0.4 * y[t - 1] + 0.5 * f[t - 1] + 0.3 * rng.standard_normal()
    return ForecastProblem(
        variable="Y", h=h, dates=dates, y_stat=y, target=y.copy(), X=X,
        x_names=tuple(f"x{i}" for i in range(n_x)),
    )


@pytest.fixture
def panel():
    return make_panel()


@pytest.fixture
def problem():
    return make_problem()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
