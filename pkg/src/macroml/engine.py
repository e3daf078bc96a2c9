"""Estimation engine: turn (model spec, hyperparameters, window) into a forecast.

All window logic is index-based: a "date" is a row index into the problem's
monthly index, an origin is the last predictor row a fit may use, and the
target array is aligned so target[i] is the value dated i (= t + h for the
pair with predictor row t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .data.factors import extract_factors
from .data.panel import RawPanel, TargetKind, apply_tcode, build_target
from .data.predictors import Rotation, Standardizer, lag_matrix
from .models.elastic_net import fit_elastic_net
from .models.forest import fit_random_forest
from .models.kernel_ridge import fit_krr
from .models.linear import fit_ols, fit_ridge
from .models.specs import ModelSpec
from .models.svr import fit_svr

TCODE_TARGET_KIND = {
    1: TargetKind.LEVEL_I0,
    2: TargetKind.AVG_DIFF,
    3: TargetKind.AVG_DIFF,
    4: TargetKind.LEVEL_I0,
    5: TargetKind.AVG_LOG_GROWTH,
    6: TargetKind.AVG_LOG_GROWTH,
    7: TargetKind.AVG_DIFF,
}


@dataclass(frozen=True)
class ForecastProblem:
    """One (variable, horizon) forecasting task over a monthly index."""

    variable: str
    h: int
    dates: pd.DatetimeIndex
    y_stat: np.ndarray  # stationarized own series (predictor side)
    target: np.ndarray  # direct target, target[i] dated i
    X: np.ndarray | None  # stationarized exogenous panel, NaN leading entries
    x_names: tuple = ()

    @classmethod
    def from_panel(
        cls,
        panel: RawPanel,
        variable: str,
        h: int,
        kind: TargetKind | None = None,
        data_rich: bool = True,
    ) -> "ForecastProblem":
        j = panel.names.index(variable)
        tcode = int(panel.tcodes[j])
        levels = panel.values[:, j]
        if kind is None:
            kind = TCODE_TARGET_KIND[tcode]
        # the target is built from logs when the transform itself is log-based
        target_levels = levels
        if kind is TargetKind.LEVEL_I0 and tcode == 4:
            target_levels = np.log(levels)
        tgt = build_target(target_levels, kind, h, variable=variable)
        y_stat = apply_tcode(levels, tcode)
        X = None
        names: tuple = ()
        if data_rich:
            stat = panel.stationary()
            X = stat.to_numpy()
            names = tuple(stat.columns)
        return cls(
            variable=variable, h=h, dates=panel.dates, y_stat=y_stat,
            target=tgt.values, X=X, x_names=names,
        )


def _factor_scores(X_win, fit_end, K):
    """Scores of the first K PCs; basis and scaling from rows <= fit_end."""
    ok_fit = np.all(np.isfinite(X_win[: fit_end + 1]), axis=1)
    fit_rows = X_win[: fit_end + 1][ok_fit]
    std = Standardizer.fit(fit_rows)
    fs = extract_factors(std.transform(fit_rows), K=min(K, *fit_rows.shape))
    scores = np.full((X_win.shape[0], fs.K), np.nan)
    ok_all = np.all(np.isfinite(X_win), axis=1)
    scores[ok_all] = std.transform(X_win[ok_all]) @ fs.loadings
    return scores


def build_design(
    spec: ModelSpec,
    hp: dict,
    problem: ForecastProblem,
    fit_end: int,
    full_end: int | None = None,
) -> np.ndarray:
    """Design matrix rows 0..full_end for one model and hyperparameter point.

    Standardization, factor bases and rotations use only rows <= fit_end;
    later rows (needed when tuning freezes a fit and rolls the origin) are
    projected onto the frozen basis.
    """
    if full_end is None:
        full_end = fit_end
    if full_end < fit_end:
        raise ValueError("full_end must not precede fit_end")
    p_y = int(hp["p_y"])
    y = problem.y_stat[: full_end + 1]
    ylags, _ = lag_matrix(y, p_y, prefix="y")
    X = problem.X[: full_end + 1] if problem.X is not None else None

    if spec.rotation is Rotation.NONE:
        blocks = [ylags]
        if spec.data_rich:
            if X is None:
                raise ValueError(f"{spec.name} needs the exogenous panel")
            K = int(hp["K"])
            p_f = int(hp["p_f"])
            scores = _factor_scores(X, fit_end, K)
            for k in range(scores.shape[1]):
                fl, _ = lag_matrix(scores[:, k], p_f, prefix=f"F{k}")
                blocks.append(fl)
        Z = np.column_stack(blocks)
    elif spec.rotation is Rotation.B1:
        p_f = int(hp["p_f"])
        blocks = [ylags]
        for j in range(X.shape[1]):
            xl, _ = lag_matrix(X[:, j], p_f, prefix=f"x{j}")
            blocks.append(xl)
        Z = np.column_stack(blocks)
    elif spec.rotation is Rotation.B2:
        p_f = int(hp["p_f"])
        scores = _factor_scores(X, fit_end, X.shape[1])
        blocks = [ylags]
        for k in range(scores.shape[1]):
            fl, _ = lag_matrix(scores[:, k], p_f, prefix=f"PC{k}")
            blocks.append(fl)
        Z = np.column_stack(blocks)
    elif spec.rotation is Rotation.B3:
        p_f = int(hp["p_f"])
        blocks = [ylags]
        for j in range(X.shape[1]):
            xl, _ = lag_matrix(X[:, j], p_f, prefix=f"x{j}")
            blocks.append(xl)
        H = np.column_stack(blocks)
        Z = _factor_scores(H, fit_end, H.shape[1])
    else:  # pragma: no cover
        raise ValueError(spec.rotation)

    # per-column standardization on the estimation window
    ok = np.all(np.isfinite(Z[: fit_end + 1]), axis=1)
    if ok.any():
        std = Standardizer.fit(Z[: fit_end + 1][ok])
        Z = np.where(np.isfinite(Z), std.transform(Z), np.nan)
    return Z


def training_pairs(Z, target, origin: int, h: int):
    """Rows t <= origin - h whose predictors and target t+h are observed."""
    t_max = origin - h
    if t_max < 0:
        raise ValueError("origin leaves no training pairs")
    t = np.arange(t_max + 1)
    ok = np.all(np.isfinite(Z[: t_max + 1]), axis=1) & np.isfinite(target[h : t_max + h + 1])
    return Z[t[ok]], target[t[ok] + h], t[ok]


def fit_estimator(spec: ModelSpec, hp: dict, Z_train, y_train, seed: int = 0,
                  rf_trees: int = 500):
    if spec.estimator == "ols":
        return fit_ols(Z_train, y_train)
    if spec.estimator == "ridge":
        return fit_ridge(Z_train, y_train, lam=float(hp["lam"]))
    if spec.estimator == "enet":
        alpha = hp.get("alpha", spec.en_alpha)
        return fit_elastic_net(Z_train, y_train, lam=float(hp["lam"]), alpha=float(alpha))
    if spec.estimator == "krr":
        return fit_krr(Z_train, y_train, lam=float(hp["lam"]),
                       sigma=float(hp["sigma"]), kernel=spec.kernel or "rbf")
    if spec.estimator == "rf":
        return fit_random_forest(
            Z_train, y_train, n_trees=int(hp.get("n_trees", rf_trees)),
            mtry_frac=1.0 / 3.0, min_leaf=5, seed=seed,
        )
    if spec.estimator == "svr":
        sigma = float(hp.get("sigma", 1.0))
        return fit_svr(Z_train, y_train, kernel=spec.kernel or "rbf",
                       C=float(hp["C"]), eps=float(hp["eps"]), sigma=sigma,
                       tol=float(hp.get("svr_tol", 1e-6)))
    raise ValueError(f"unknown estimator {spec.estimator!r}")


def forecast_at(
    spec: ModelSpec,
    hp: dict,
    problem: ForecastProblem,
    origin: int,
    seed: int = 0,
    rf_trees: int = 500,
) -> float:
    """Fit on all information dated <= origin and forecast the target at
    origin + h."""
    Z = build_design(spec, hp, problem, fit_end=origin)
    Z_train, y_train, _ = training_pairs(Z, problem.target, origin, problem.h)
    model = fit_estimator(spec, hp, Z_train, y_train, seed=seed, rf_trees=rf_trees)
    z0 = Z[origin]
    if not np.all(np.isfinite(z0)):
        raise ValueError("predictor row at the origin contains missing values")
    return float(np.asarray(model.predict(z0[None, :]))[0])
