"""Fixed-effects regressions measuring what model features buy in accuracy.

The regressand is the per-period pseudo-R2 of each (date, variable, horizon,
model) forecast; regressors are model-feature dummies (nonlinearity,
shrinkage scheme, tuning method, loss function, data richness) and optional
interactions. Fixed effects by (date, variable, horizon) are removed by
within-group demeaning; standard errors are HAC over target dates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..models.specs import GClass, Loss, ModelSpec, Tuner, model_roster
from .hac import bartlett_long_run, newey_west_bandwidth

SH_BASELINE = "PCA"
CV_BASELINE = "BIC"


class CollinearityError(Exception):
    """A regressor has no independent within-group variation."""


@dataclass(frozen=True)
class FeatureDummies:
    """Feature coding of a model set, one row per model.

    NL, LF and X are indicators; SH and CV are categoricals dummy-coded
    against the factor-shrinkage (PCA) and BIC baselines.
    """

    frame: pd.DataFrame

    @classmethod
    def from_specs(cls, specs) -> "FeatureDummies":
        rows = {}
        for s in specs:
            rows[s.name] = {
                "NL": float(s.g_class is not GClass.LINEAR),
                "SH": s.shrinkage.value,
                "CV": s.tuner.value,
                "LF": float(s.loss is Loss.EPS_INSENSITIVE),
                "X": float(s.data_rich),
            }
        df = pd.DataFrame.from_dict(rows, orient="index")
        df.index.name = "model"
        return cls(frame=df)

    @classmethod
    def from_names(cls, names) -> "FeatureDummies":
        roster = model_roster()
        return cls.from_specs([roster[n] for n in names])

    def design(self, features) -> pd.DataFrame:
        """Numeric columns for the requested features; categoricals expand to
        dummies against their baseline level."""
        cols = {}
        for f in features:
            if f in ("NL", "LF", "X"):
                cols[f] = self.frame[f].astype(float)
            elif f == "SH":
                for level in sorted(self.frame["SH"].unique()):
                    if level != SH_BASELINE:
                        cols[f"SH={level}"] = (self.frame["SH"] == level).astype(float)
            elif f == "CV":
                for level in sorted(self.frame["CV"].unique()):
                    if level != CV_BASELINE:
                        cols[f"CV={level}"] = (self.frame["CV"] == level).astype(float)
            else:
                raise ValueError(f"unknown feature {f!r}")
        return pd.DataFrame(cols, index=self.frame.index)


@dataclass(frozen=True)
class EvalRegressionResult:
    coef: pd.Series
    se: pd.Series
    cov: np.ndarray
    n_obs: int
    n_groups: int
    r2_within: float
    dropped: int = 0
    degenerate: bool = False
    auxiliary: dict = field(default_factory=dict)

    def tstats(self) -> pd.Series:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coef / self.se

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"coef": self.coef, "se": self.se, "t": self.tstats()})


def _within_demean(df: pd.DataFrame, cols, group_cols) -> pd.DataFrame:
    g = df.groupby(group_cols, sort=False)
    out = df.copy()
    out[cols] = df[cols] - g[cols].transform("mean")
    return out


def _fit_within(data: pd.DataFrame, xcols, bandwidth) -> EvalRegressionResult:
    group_cols = ["date", "variable", "horizon"]
    dm = _within_demean(data, ["r2", *xcols], group_cols)
    X = dm[xcols].to_numpy(dtype=float)
    y = dm["r2"].to_numpy(dtype=float)
    n, k = X.shape

    # name the redundant column, if any, via pivoted QR on the demeaned design
    scale = np.sqrt(np.sum(X**2, axis=0))
    if np.any(scale <= 1e-12 * max(1.0, np.abs(X).max(initial=1.0))):
        bad = xcols[int(np.argmin(scale))]
        raise CollinearityError(f"no within-group variation in {bad!r}")
    from scipy.linalg import qr

    _, R, piv = qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * diag.max():
        bad = xcols[piv[int(np.argmin(diag))]]
        raise CollinearityError(f"regressor {bad!r} is collinear after demeaning")

    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    tss = float(y @ y)
    r2_w = 1.0 - ssr / tss if tss > 0 else 0.0
    degenerate = ssr <= 1e-14 * max(tss, 1.0)

    # HAC over target dates: aggregate scores within each date, then apply
    # the Bartlett kernel to the date-level series
    scores = X * resid[:, None]
    date_codes, dates = pd.factorize(data["date"], sort=True)
    G = np.zeros((len(dates), k))
    np.add.at(G, date_codes, scores)
    bw = newey_west_bandwidth(len(dates)) if bandwidth is None else bandwidth
    S = bartlett_long_run(G, bw)
    XtX_inv = np.linalg.pinv(X.T @ X)
    cov = XtX_inv @ (len(dates) * S) @ XtX_inv

    se = pd.Series(np.sqrt(np.maximum(np.diag(cov), 0.0)), index=xcols)
    n_groups = int(data.groupby(group_cols, sort=False).ngroups)
    return EvalRegressionResult(
        coef=pd.Series(beta, index=xcols), se=se, cov=cov, n_obs=n,
        n_groups=n_groups, r2_within=r2_w, degenerate=degenerate,
        auxiliary={"bandwidth": bw, "n_dates": len(dates)},
    )


def treatment_regression(
    r2_panel: pd.DataFrame,
    features,
    dummies: FeatureDummies | None = None,
    model_set=None,
    interactions: pd.DataFrame | None = None,
    bandwidth: int | None = None,
) -> EvalRegressionResult:
    """Feature coefficients from the within-(date, variable, horizon)
    regression of per-period pseudo-R2 on model-feature dummies.

    ``r2_panel`` is the long panel from :func:`pseudo_r2`. ``interactions``
    optionally adds pre-built numeric columns aligned with the panel rows.
    Coefficients read as pseudo-R2 point gains from switching the feature on.
    """
    data = r2_panel.copy()
    if model_set is not None:
        data = data[data["model"].isin(set(model_set))]
    if data.empty:
        raise ValueError("no rows left in the evaluation panel")
    if dummies is None:
        dummies = FeatureDummies.from_names(sorted(data["model"].unique()))
    design = dummies.design(features)
    data = data.join(design, on="model", how="inner")
    xcols = list(design.columns)
    if interactions is not None:
        for c in interactions.columns:
            data[c] = interactions[c].to_numpy()
            xcols.append(c)
    sizes = data.groupby(["date", "variable", "horizon"], sort=False)["model"].size()
    if (sizes < 2).all():
        raise CollinearityError(
            "every (date, variable, horizon) group has a single model; "
            "feature effects are not identified"
        )
    return _fit_within(data, xcols, bandwidth)


def heterogeneity_regression(
    r2_panel: pd.DataFrame,
    xi: pd.Series,
    feature: str = "NL",
    dummies: FeatureDummies | None = None,
    model_set=None,
    bandwidth: int | None = None,
) -> EvalRegressionResult:
    """Interaction of a feature effect with a lagged conditioning series.

    ``xi`` is indexed by month; each observation at target date t and horizon
    h picks up xi at t-h, standardized to unit variance, so the interaction
    coefficient reads as pseudo-R2 points per one-SD move. Rows whose lagged
    xi is missing are dropped and counted in the result.
    """
    data = r2_panel.copy()
    if model_set is not None:
        data = data[data["model"].isin(set(model_set))]
    if data.empty:
        raise ValueError("no rows left in the evaluation panel")
    if dummies is None:
        dummies = FeatureDummies.from_names(sorted(data["model"].unique()))
    design = dummies.design([feature])
    data = data.join(design, on="model", how="inner")

    xi = xi.dropna()
    sd = float(xi.std(ddof=0))
    if sd <= 0:
        raise ValueError("conditioning series has zero variance")
    xi_std = (xi - xi.mean()) / sd

    xi_lag = pd.Series(np.nan, index=data.index, dtype=float)
    for h in data["horizon"].unique():
        rows = data["horizon"] == h
        lagged = data.loc[rows, "date"] - pd.DateOffset(months=int(h))
        xi_lag[rows] = xi_std.reindex(lagged).to_numpy()
    keep = xi_lag.notna()
    dropped = int((~keep).sum())
    data = data[keep].copy()
    xi_lag = xi_lag[keep]
    if data.empty:
        raise ValueError("conditioning series missing at every required lag")
    inter = f"{feature}*xi"
    data[inter] = data[feature].to_numpy() * xi_lag.to_numpy()
    res = _fit_within(data, [feature, inter], bandwidth)
    return EvalRegressionResult(
        coef=res.coef, se=res.se, cov=res.cov, n_obs=res.n_obs,
        n_groups=res.n_groups, r2_within=res.r2_within, dropped=dropped,
        degenerate=res.degenerate, auxiliary=res.auxiliary,
    )
