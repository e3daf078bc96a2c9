"""The expanding-window pseudo-out-of-sample exercise.

For every (variable, horizon, model) and every monthly forecast origin, the
runner ensures a fresh-enough hyperparameter decision (re-optimized on an
aligned 24-month calendar), refits on all data up to the origin, forecasts
h months ahead, and records the realized error.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..data.panel import RawPanel
from ..engine import ForecastProblem, forecast_at
from ..models.base import ConvergenceError, FitError
from ..models.specs import ModelSpec, model_roster, resolve_model_name
from ..tuning import TuneDecision, default_grid, kfold_cv, poos_cv, ic_select, tune_seed
from ..tuning.grids import Grid
from ..models.specs import Tuner
from .store import ForecastRecord, ForecastStore

log = logging.getLogger(__name__)

DEFAULT_HORIZONS = (1, 3, 9, 12, 24)


@dataclass(frozen=True)
class ExperimentConfig:
    variables: tuple
    horizons: tuple
    models: tuple  # roster names (variant spellings accepted)
    oos_start: pd.Timestamp
    oos_end: pd.Timestamp
    seed: int = 0
    refresh_months: int = 24
    rf_trees: int = 500
    rf_cv_trees: int = 100
    kfold_k: int = 5
    val_frac: float = 0.25
    min_history_months: int = 240
    allow_any_horizon: bool = False
    jobs: int = 1
    grid_overrides: dict = field(default_factory=dict)  # model name -> axis dict

    def __post_init__(self):
        object.__setattr__(self, "oos_start", pd.Timestamp(self.oos_start))
        object.__setattr__(self, "oos_end", pd.Timestamp(self.oos_end))
        if self.oos_end < self.oos_start:
            raise ValueError("oos_end precedes oos_start")
        if not self.variables or not self.horizons or not self.models:
            raise ValueError("variables, horizons and models must be non-empty")
        if not self.allow_any_horizon:
            bad = set(self.horizons) - set(DEFAULT_HORIZONS)
            if bad:
                raise ValueError(
                    f"horizons {sorted(bad)} outside {DEFAULT_HORIZONS}; "
                    "set allow_any_horizon to override"
                )
        if self.refresh_months < 1:
            raise ValueError("refresh_months must be positive")


@dataclass
class ItemResult:
    records: list
    attempts: int
    failures: int
    messages: list


def _fit_seed(model: str, variable: str, h: int, date, base: int) -> int:
    tag = f"fit|{model}|{variable}|{h}|{pd.Timestamp(date):%Y-%m}|{base}"
    return int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "little")


def _months_between(a: pd.Timestamp, b: pd.Timestamp) -> int:
    return (b.year - a.year) * 12 + (b.month - a.month)


def _tune_once(spec, grid, problem, origin, cfg) -> TuneDecision:
    seed = tune_seed(spec.name, problem.variable, problem.h, problem.dates[origin])
    if spec.tuner in (Tuner.AIC, Tuner.BIC):
        return ic_select(spec, grid, problem, origin, spec.tuner.value)
    if spec.tuner is Tuner.POOS_CV:
        return poos_cv(spec, grid, problem, origin, seed=seed,
                       val_frac=cfg.val_frac, rf_trees=cfg.rf_cv_trees)
    return kfold_cv(spec, grid, problem, origin, k=cfg.kfold_k, seed=seed,
                    rf_trees=cfg.rf_cv_trees)


def _run_item(spec: ModelSpec, problem: ForecastProblem, cfg: ExperimentConfig,
              targets: np.ndarray) -> ItemResult:
    """All origins for one (variable, horizon, model), in date order."""
    grid_kw = dict(spec.grid_overrides)
    grid_kw.update(cfg.grid_overrides.get(spec.name, {}))
    grid = default_grid(
        spec if not grid_kw else
        ModelSpec(**{**spec.__dict__, "grid_overrides": grid_kw})
    )
    h = problem.h
    decisions: dict = {}
    res = ItemResult(records=[], attempts=0, failures=0, messages=[])
    for d in targets:
        tau = d - h
        date_d = problem.dates[d]
        vintage_idx = _months_between(cfg.oos_start, date_d) // cfg.refresh_months
        vintage_date = cfg.oos_start + pd.DateOffset(
            months=vintage_idx * cfg.refresh_months
        )
        res.attempts += 1
        if vintage_idx not in decisions:
            # tune at the vintage's own origin so partial reruns make the
            # same decision regardless of which target triggers it
            tune_tau = problem.dates.get_indexer([vintage_date])[0] - h
            try:
                decisions[vintage_idx] = _tune_once(spec, grid, problem, tune_tau, cfg)
            except (FitError, ConvergenceError, ValueError) as exc:
                decisions[vintage_idx] = None
                res.messages.append(
                    f"{spec.name}/{problem.variable}/h={h}: tuning failed at "
                    f"{problem.dates[tune_tau]:%Y-%m}: {exc}"
                )
        decision = decisions[vintage_idx]
        if decision is None:
            res.failures += 1
            continue
        seed = _fit_seed(spec.name, problem.variable, h, date_d, cfg.seed)
        try:
            yhat = forecast_at(spec, decision.chosen, problem, tau,
                               seed=seed, rf_trees=cfg.rf_trees)
        except (FitError, ConvergenceError, ValueError) as exc:
            res.failures += 1
            res.messages.append(
                f"{spec.name}/{problem.variable}/h={h}: forecast failed at "
                f"origin {problem.dates[tau]:%Y-%m}: {exc}"
            )
            continue
        y = float(problem.target[d])
        if not np.isfinite(y):
            continue  # target masked at the sample edge
        res.records.append(ForecastRecord(
            t=date_d, h=h, v=problem.variable, m=spec.name,
            yhat=float(yhat), y=y, tune_vintage=vintage_date,
        ))
    return res


def run_experiment(panel: RawPanel, config: ExperimentConfig,
                   store: ForecastStore | None = None) -> ForecastStore:
    """Run the horse race described by ``config`` over ``panel``."""
    roster = model_roster()
    specs = [roster[resolve_model_name(m, roster)] for m in config.models]

    start_gap = _months_between(panel.dates[0], config.oos_start)
    if start_gap < config.min_history_months:
        raise ValueError(
            f"only {start_gap} months of history before oos_start; "
            f"{config.min_history_months} required (set min_history_months to relax)"
        )

    problems: dict = {}
    for v in config.variables:
        if v not in panel.names:
            raise ValueError(f"variable {v!r} not in the panel")
        for h in config.horizons:
            problems[(v, h)] = ForecastProblem.from_panel(panel, v, int(h))

    store = store if store is not None else ForecastStore()
    items = []
    skipped = 0
    for v in config.variables:
        for h in config.horizons:
            problem = problems[(v, h)]
            d0 = problem.dates.get_indexer([config.oos_start])[0]
            d1 = problem.dates.get_indexer([config.oos_end])[0]
            if d0 < 0 or d1 < 0:
                raise ValueError("oos_start/oos_end must be months of the panel")
            targets = np.arange(d0, d1 + 1)
            for spec in specs:
                # resume support: only recompute targets absent from the store
                missing = np.array([
                    store.get(problem.dates[d], h, v, spec.name) is None
                    for d in targets
                ])
                skipped += int((~missing).sum())
                if missing.any():
                    items.append((spec, problem, targets[missing]))

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(
                lambda it: _run_item(it[0], it[1], config, it[2]), items,
            ))
    else:
        results = [_run_item(spec, problem, config, targets)
                   for spec, problem, targets in items]

    per_model_attempts: dict = {}
    per_model_failures: dict = {}
    for (spec, problem, _), res in zip(items, results):
        for msg in res.messages:
            log.warning(msg)
        store.extend(res.records)
        per_model_attempts[spec.name] = per_model_attempts.get(spec.name, 0) + res.attempts
        per_model_failures[spec.name] = per_model_failures.get(spec.name, 0) + res.failures
    for name, attempts in per_model_attempts.items():
        fails = per_model_failures[name]
        if attempts and fails / attempts > 0.01:
            log.warning(
                "model %s failed at %d of %d origins (%.1f%%)",
                name, fails, attempts, 100.0 * fails / attempts,
            )
    store.run_stats = {
        "attempts": per_model_attempts,
        "failures": per_model_failures,
        "skipped_existing": skipped,
    }
    return store
