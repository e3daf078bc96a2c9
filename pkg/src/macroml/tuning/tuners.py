"""Hyperparameter selection: information criteria, held-out validation over
the tail of the training window, random K-fold validation, and the 24-month
freeze/refresh schedule."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from ..engine import ForecastProblem, build_design, fit_estimator, training_pairs
from ..models.base import ConvergenceError, FitError
from ..models.kernel_ridge import krr_path_predictions
from ..models.linear import LinearModel
from ..models.specs import ModelSpec, Tuner
from .grids import Grid, default_grid, resolve_point


class Refresh(Enum):
    REUSE = "REUSE"
    RETUNE = "RETUNE"


@dataclass(frozen=True)
class TuneDecision:
    model: str
    chosen: dict
    score: float
    criterion: str
    decided_at: pd.Timestamp
    frozen_until: pd.Timestamp
    score_table: tuple  # ((sorted hp items, score), ...) in search order
    n_evaluated: int


def ic_value(ssr: float, n_obs: int, k: int, criterion: str) -> float:
    """n*ln(SSR/n) plus the AIC (2k) or BIC (k*ln n) penalty."""
    if k < 1:
        raise ValueError("parameter count k must be at least 1")
    if n_obs <= k:
        raise ValueError(f"{n_obs} observations cannot identify {k} parameters")
    if criterion == "AIC":
        pen = 2.0 * k
    elif criterion == "BIC":
        pen = k * math.log(n_obs)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    return n_obs * math.log(max(ssr, 1e-300) / n_obs) + pen


def score_ic(fit, Z, y, criterion: str) -> float:
    """Information criterion of a least-squares fit on its estimation sample."""
    if not isinstance(fit, LinearModel):
        raise TypeError(
            f"{criterion} needs a least-squares fit, got {type(fit).__name__}"
        )
    y = np.asarray(y, dtype=float)
    resid = y - fit.predict(Z)
    k = int(fit.coef.size) + 1
    return ic_value(float(resid @ resid), y.size, k, criterion)


def _decision(spec, problem, origin, criterion, order, scores, resolved):
    best = None
    for i in order:
        if np.isfinite(scores[i]) and (best is None or scores[i] < scores[best]):
            best = i
    if best is None:
        raise FitError(f"{spec.name}: no grid point could be scored")
    decided_at = problem.dates[origin]
    table = tuple(
        (tuple(sorted(resolved[i].items())), float(scores[i])) for i in order
    )
    return TuneDecision(
        model=spec.name,
        chosen=dict(resolved[best]),
        score=float(scores[best]),
        criterion=criterion,
        decided_at=decided_at,
        frozen_until=decided_at + pd.DateOffset(months=24),
        score_table=table,
        n_evaluated=len(order),
    )


def _groups(spec, grid, n_x):
    """Grid points in search order, grouped by the discrete axes."""
    pts = grid.points(spec, n_x=n_x)
    groups: dict = {}
    for i, p in enumerate(pts):
        key = (p.get("p_y"), p.get("p_f"), p.get("K"))
        groups.setdefault(key, []).append(i)
    return pts, groups


def _disc(key):
    return {k: v for k, v in zip(("p_y", "p_f", "K"), key) if v is not None}


def _safe_predictions(spec, hp, Z_tr, y_tr, Z_ev, seed, rf_trees):
    try:
        model = fit_estimator(spec, hp, Z_tr, y_tr, seed=seed, rf_trees=rf_trees)
        return np.asarray(model.predict(Z_ev), dtype=float)
    except (FitError, ConvergenceError, ValueError, np.linalg.LinAlgError):
        return None


def ic_select(
    spec: ModelSpec,
    grid: Grid,
    problem: ForecastProblem,
    origin: int,
    criterion: str,
) -> TuneDecision:
    """Pick lag/factor orders by AIC or BIC on the full training window."""
    if spec.estimator != "ols":
        raise TypeError(f"{criterion} tuning needs a least-squares model")
    n_x = problem.X.shape[1] if problem.X is not None else 0
    pts, groups = _groups(spec, grid, n_x)
    scores = np.full(len(pts), np.inf)
    for key, idxs in groups.items():
        Z = build_design(spec, _disc(key), problem, fit_end=origin)
        Z_tr, y_tr, _ = training_pairs(Z, problem.target, origin, problem.h)
        k = Z_tr.shape[1] + 1
        if y_tr.size <= k:
            continue
        pred = _safe_predictions(spec, {}, Z_tr, y_tr, Z_tr, 0, 0)
        if pred is None:
            continue
        ssr = float(np.sum((y_tr - pred) ** 2))
        for i in idxs:
            scores[i] = ic_value(ssr, y_tr.size, k, criterion)
    return _decision(spec, problem, origin, criterion, range(len(pts)), scores, pts)


def kfold_cv(
    spec: ModelSpec,
    grid: Grid,
    problem: ForecastProblem,
    origin: int,
    k: int = 5,
    seed: int = 0,
    rf_trees: int = 100,
) -> TuneDecision:
    """Average held-out MSE over k random disjoint folds of the training rows."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n_x = problem.X.shape[1] if problem.X is not None else 0
    pts, groups = _groups(spec, grid, n_x)
    scores = np.full(len(pts), np.inf)
    resolved: list = [None] * len(pts)
    for key, idxs in groups.items():
        Z = build_design(spec, _disc(key), problem, fit_end=origin)
        Z_tr, y_tr, _ = training_pairs(Z, problem.target, origin, problem.h)
        n = y_tr.size
        if n < 5 * k:
            raise ValueError(f"{n} training rows is fewer than 5*k={5 * k}")
        rng = np.random.Generator(np.random.PCG64(seed))
        fold_id = np.empty(n, dtype=np.int64)
        fold_id[rng.permutation(n)] = np.arange(n) % k
        for i in idxs:
            resolved[i] = {**_disc(key), **resolve_point(spec, pts[i], Z_tr, y_tr)}

        if spec.estimator == "krr":
            _krr_fold_scores(spec, idxs, resolved, Z_tr, y_tr, fold_id, k, scores)
            continue
        for i in idxs:
            sse, cnt = 0.0, 0
            for f in range(k):
                te = fold_id == f
                pred = _safe_predictions(
                    spec, resolved[i], Z_tr[~te], y_tr[~te], Z_tr[te], seed, rf_trees
                )
                if pred is None:
                    sse = np.inf
                    break
                sse += float(np.sum((pred - y_tr[te]) ** 2))
                cnt += int(te.sum())
            if np.isfinite(sse) and cnt:
                scores[i] = sse / cnt
    return _decision(spec, problem, origin, "K-fold", range(len(pts)), scores, resolved)


def _krr_fold_scores(spec, idxs, resolved, Z_tr, y_tr, fold_id, k, scores):
    """One eigendecomposition per (bandwidth, fold) covers the whole lam ladder."""
    by_sigma: dict = {}
    for i in idxs:
        by_sigma.setdefault(resolved[i].get("sigma", 1.0), []).append(i)
    for sigma, sub in by_sigma.items():
        lams = [resolved[i]["lam"] for i in sub]
        sse = np.zeros(len(sub))
        cnt = 0
        for f in range(k):
            te = fold_id == f
            try:
                preds = krr_path_predictions(
                    Z_tr[~te], y_tr[~te], Z_tr[te], lams, sigma,
                    kernel=spec.kernel or "rbf",
                )
            except (FitError, ValueError, np.linalg.LinAlgError):
                sse[:] = np.inf
                break
            sse += np.sum((preds - y_tr[te][None, :]) ** 2, axis=1)
            cnt += int(te.sum())
        if cnt:
            for j, i in enumerate(sub):
                if np.isfinite(sse[j]):
                    scores[i] = sse[j] / cnt


def poos_cv(
    spec: ModelSpec,
    grid: Grid,
    problem: ForecastProblem,
    origin: int,
    seed: int = 0,
    step: int = 12,
    val_frac: float = 0.25,
    rf_trees: int = 100,
) -> TuneDecision:
    """Score each grid point by replaying the forecasting exercise over the
    last ``val_frac`` of the training window, refitting every ``step`` months
    with an h-month gap between each estimation window and its targets."""
    h = problem.h
    t_idx = np.arange(h, origin + 1)
    n_train = int(np.isfinite(problem.target[t_idx]).sum())
    if n_train < 120:
        raise ValueError(f"training window has {n_train} usable months, needs 120")
    v_len = int(math.ceil(val_frac * n_train))
    if v_len < h + step:
        raise ValueError(
            f"validation window of {v_len} months is shorter than h+{step}={h + step}"
        )
    v0 = origin - v_len + 1

    n_x = problem.X.shape[1] if problem.X is not None else 0
    pts, groups = _groups(spec, grid, n_x)
    scores = np.full(len(pts), np.inf)
    resolved: list = [None] * len(pts)
    sse = np.zeros(len(pts))
    cnt = np.zeros(len(pts), dtype=np.int64)
    dead = np.zeros(len(pts), dtype=bool)

    for key, idxs in groups.items():
        disc = _disc(key)
        Z_full = build_design(spec, disc, problem, fit_end=origin)
        Z_o, y_o, _ = training_pairs(Z_full, problem.target, origin, h)
        for i in idxs:
            resolved[i] = {**disc, **resolve_point(spec, pts[i], Z_o, y_o)}

        for s in range(v0, origin + 1, step):
            e = s - h  # estimation origin: information dated <= e only
            d_hi = min(s + step - 1, origin)
            Z = build_design(spec, disc, problem, fit_end=e, full_end=d_hi - h)
            Z_tr, y_tr, _ = training_pairs(Z, problem.target, e, h)
            d = np.arange(s, d_hi + 1)
            ok = np.isfinite(problem.target[d]) & np.all(np.isfinite(Z[d - h]), axis=1)
            d = d[ok]
            if d.size == 0 or y_tr.size == 0:
                continue
            Z_ev, y_ev = Z[d - h], problem.target[d]

            if spec.estimator == "krr":
                _krr_block_scores(spec, idxs, resolved, Z_tr, y_tr, Z_ev, y_ev,
                                  sse, cnt, dead)
                continue
            for i in idxs:
                if dead[i]:
                    continue
                pred = _safe_predictions(spec, resolved[i], Z_tr, y_tr, Z_ev,
                                         seed, rf_trees)
                if pred is None:
                    dead[i] = True
                    continue
                sse[i] += float(np.sum((pred - y_ev) ** 2))
                cnt[i] += d.size

    live = ~dead & (cnt > 0)
    scores[live] = sse[live] / cnt[live]
    return _decision(spec, problem, origin, "POOS-CV", range(len(pts)), scores, resolved)


def _krr_block_scores(spec, idxs, resolved, Z_tr, y_tr, Z_ev, y_ev, sse, cnt, dead):
    by_sigma: dict = {}
    for i in idxs:
        if not dead[i]:
            by_sigma.setdefault(resolved[i].get("sigma", 1.0), []).append(i)
    for sigma, sub in by_sigma.items():
        lams = [resolved[i]["lam"] for i in sub]
        try:
            preds = krr_path_predictions(Z_tr, y_tr, Z_ev, lams, sigma,
                                         kernel=spec.kernel or "rbf")
        except (FitError, ValueError, np.linalg.LinAlgError):
            for i in sub:
                dead[i] = True
            continue
        for j, i in enumerate(sub):
            sse[i] += float(np.sum((preds[j] - y_ev) ** 2))
            cnt[i] += y_ev.size


def refresh_schedule(decisions, now: pd.Timestamp) -> Refresh:
    """RETUNE unless some past decision is less than 24 months old."""
    now = pd.Timestamp(now)
    for d in decisions:
        when = pd.Timestamp(d.decided_at)
        age = (now.year - when.year) * 12 + (now.month - when.month)
        if 0 <= age < 24:
            return Refresh.REUSE
    return Refresh.RETUNE


def tune_seed(model: str, variable: str, h: int, date) -> int:
    """Stable seed derived from what is being tuned and when."""
    tag = f"{model}|{variable}|{h}|{pd.Timestamp(date):%Y-%m}"
    return int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "little")


def tune(
    spec: ModelSpec,
    problem: ForecastProblem,
    origin: int,
    grid: Grid | None = None,
    seed: int | None = None,
    k: int = 5,
    rf_trees: int = 100,
) -> TuneDecision:
    """Dispatch to the model's tuner; seed defaults to a stable derivation."""
    grid = grid if grid is not None else default_grid(spec)
    if seed is None:
        seed = tune_seed(spec.name, problem.variable, problem.h, problem.dates[origin])
    if spec.tuner in (Tuner.AIC, Tuner.BIC):
        return ic_select(spec, grid, problem, origin, spec.tuner.value)
    if spec.tuner is Tuner.POOS_CV:
        return poos_cv(spec, grid, problem, origin, seed=seed, rf_trees=rf_trees)
    if spec.tuner is Tuner.KFOLD_CV:
        return kfold_cv(spec, grid, problem, origin, k=k, seed=seed, rf_trees=rf_trees)
    raise ValueError(spec.tuner)
