"""Forecast accuracy panels and tables: pseudo-R2 and relative RMSPE."""

from __future__ import annotations

import numpy as np
import pandas as pd

from ..harness.store import ForecastStore
from .dm import DegenerateVarianceError, dm_test


def _realized_by_group(df: pd.DataFrame) -> pd.DataFrame:
    """One realized value per (variable, horizon, date), deduplicated."""
    return df.drop_duplicates(["variable", "horizon", "date"])[
        ["variable", "horizon", "date", "y"]
    ]


def pseudo_r2(store: ForecastStore, loss: str = "SQUARED") -> pd.DataFrame:
    """Per-period out-of-sample fit, one row per record.

    Squared loss gives 1 - e^2 / mean((y - ybar)^2); absolute loss gives
    1 - |e| / mean(|y - ybar|), with the denominator taken over the (v, h)
    evaluation window. Perfect forecasts score 1; values can go negative.
    """
    if loss not in ("SQUARED", "ABSOLUTE"):
        raise ValueError(f"unknown loss {loss!r}")
    df = store.to_frame()
    if df.empty:
        raise ValueError("empty forecast store")
    out = []
    for (v, h), g in df.groupby(["variable", "horizon"], sort=True):
        y = _realized_by_group(g)["y"].to_numpy()
        dev = y - y.mean()
        denom = float(np.mean(dev**2)) if loss == "SQUARED" else float(np.mean(np.abs(dev)))
        if denom <= 0.0:
            raise ValueError(f"zero benchmark denominator for ({v}, h={h})")
        num = g["e"] ** 2 if loss == "SQUARED" else g["e"].abs()
        sub = g[["date", "horizon", "variable", "model"]].copy()
        sub["r2"] = 1.0 - num / denom
        out.append(sub)
    return pd.concat(out, ignore_index=True)


def _rmspe(e: np.ndarray) -> float:
    return float(np.sqrt(np.mean(e**2)))


def relative_rmspe_table(
    store: ForecastStore,
    reference_model: str,
    mask=None,
) -> pd.DataFrame:
    """Root MSPE of every model relative to a reference, per (variable, horizon).

    ``mask`` optionally restricts to target dates where it is true (a callable
    on dates or a boolean Series indexed by date); an empty masked sample
    leaves the entry missing. The reference's absolute RMSPE is included as
    its own column.
    """
    df = store.to_frame()
    if mask is not None:
        if callable(mask):
            keep = df["date"].map(mask).astype(bool)
        else:
            keep = df["date"].map(mask).fillna(False).astype(bool)
        df = df[keep]
    models = sorted(df["model"].unique())
    out_index = []
    out_rows = []
    for (v, h), g in df.groupby(["variable", "horizon"], sort=True):
        ref = g[g["model"] == reference_model]
        if ref.empty:
            raise ValueError(f"reference model {reference_model!r} missing for ({v}, h={h})")
        row = {f"{reference_model} (RMSPE)": _rmspe(ref["e"].to_numpy())}
        ref_by_date = ref.set_index("date")["e"]
        for m in models:
            gm = g[g["model"] == m]
            common = gm.set_index("date")["e"].align(ref_by_date, join="inner")
            if common[0].empty:
                row[m] = np.nan
                continue
            row[m] = _rmspe(common[0].to_numpy()) / _rmspe(common[1].to_numpy())
        out_index.append((v, h))
        out_rows.append(row)
    table = pd.DataFrame(
        out_rows, index=pd.MultiIndex.from_tuples(out_index, names=["variable", "horizon"])
    )
    return table


def dm_against_reference(
    store: ForecastStore,
    reference_model: str,
    loss: str = "SQUARED",
) -> pd.DataFrame:
    """Equal-accuracy p-values of every model against the reference,
    per (variable, horizon)."""
    df = store.to_frame()
    df["loss"] = df["e"] ** 2 if loss == "SQUARED" else df["e"].abs()
    rows = []
    for (v, h), g in df.groupby(["variable", "horizon"], sort=True):
        ref = g[g["model"] == reference_model].set_index("date")["loss"]
        for m in sorted(g["model"].unique()):
            if m == reference_model:
                continue
            lm = g[g["model"] == m].set_index("date")["loss"]
            a, r = lm.align(ref, join="inner")
            try:
                res = dm_test(a.to_numpy(), r.to_numpy(), h=int(h))
                stat, p = res.statistic, res.p_value
            except (ValueError, DegenerateVarianceError):
                stat, p = np.nan, np.nan
            rows.append({
                "variable": v, "horizon": h, "model": m,
                "statistic": stat, "p_value": p,
            })
    return pd.DataFrame(rows)
