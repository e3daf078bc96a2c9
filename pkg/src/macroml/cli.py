"""Command-line entry point: ingest a data panel, run the horse race, and
emit evaluation tables."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import sys
import time
from dataclasses import asdict, dataclass

import click
import numpy as np
import pandas as pd

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .data.panel import DateParseError, PanelValidationError, RawPanel, ingest_fredmd
from .evaluation import (
    CollinearityError,
    dm_against_reference,
    dm_test,
    fluctuation_test,
    heterogeneity_regression,
    model_confidence_set,
    pseudo_r2,
    relative_rmspe_table,
    treatment_regression,
)
from .harness import ExperimentConfig, ForecastStore, StoreSchemaError, run_experiment
from .models.specs import model_roster, resolve_model_name

log = logging.getLogger(__name__)

EXIT_VALIDATION = 2


@dataclass(frozen=True)
class RunManifest:
    config_hash: str
    code_version: str
    seed: int
    elapsed_seconds: float
    n_records: int
    attempts: dict
    failures: dict
    skipped_existing: int
    resolved_config: dict

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True, default=str)


def _fail(message: str, code: int = EXIT_VALIDATION):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_panel(path: str) -> RawPanel:
    data_dir = os.environ.get("MACROML_DATA_DIR")
    if data_dir and not os.path.isabs(path) and not os.path.exists(path):
        candidate = os.path.join(data_dir, path)
        if os.path.exists(candidate):
            path = candidate
    if not os.path.exists(path):
        _fail(f"data file not found: {path}")
    if path.endswith(".npz"):
        with np.load(path, allow_pickle=True) as z:
            return RawPanel(
                dates=pd.DatetimeIndex(z["dates"]),
                names=tuple(str(n) for n in z["names"]),
                tcodes=np.asarray(z["tcodes"], dtype=np.int64),
                values=np.asarray(z["values"], dtype=float),
            )
    return ingest_fredmd(path)


@click.group()
@click.version_option(version=__version__, prog_name="macroml")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Macro forecasting horse race: ingest, run, evaluate."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(), help="Input CSV (header, transform-code row, then monthly rows).")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Normalized panel cache (.npz).")
def ingest(data_path, out_path):
    """Validate a raw panel and write a normalized cache."""
    try:
        panel = _load_panel(data_path)
    except (PanelValidationError, DateParseError, ValueError) as exc:
        _fail(str(exc))
    np.savez_compressed(
        out_path,
        dates=panel.dates.to_numpy(),
        names=np.array(panel.names, dtype=object),
        tcodes=panel.tcodes,
        values=panel.values,
    )
    click.echo(
        f"{len(panel.names)} series, "
        f"{panel.dates[0]:%Y-%m}..{panel.dates[-1]:%Y-%m}"
    )


def _validate_config(raw: dict) -> tuple:
    """Collect every config problem before failing."""
    problems = []
    data = raw.get("data", {})
    run = raw.get("run", {})
    if "path" not in data:
        problems.append("[data].path is required")
    for key in ("variables", "horizons", "models", "oos_start", "oos_end"):
        if key not in run:
            problems.append(f"[run].{key} is required")
    roster = model_roster()
    resolved_models = []
    for m in run.get("models", []):
        try:
            resolved_models.append(resolve_model_name(str(m), roster))
        except KeyError:
            problems.append(f"unknown model {m!r}")
    for key in ("oos_start", "oos_end"):
        if key in run:
            try:
                pd.Timestamp(run[key])
            except (ValueError, TypeError):
                problems.append(f"[run].{key} is not a date: {run[key]!r}")
    grid_overrides = {}
    for name, axes in raw.get("grids", {}).items():
        try:
            canon = resolve_model_name(name, roster)
        except KeyError:
            problems.append(f"[grids] references unknown model {name!r}")
            continue
        if not isinstance(axes, dict):
            problems.append(f"[grids.{name}] must be a table of axis lists")
            continue
        grid_overrides[canon] = {k: tuple(v) for k, v in axes.items()}
    if problems:
        raise ValueError("; ".join(problems))
    cfg = ExperimentConfig(
        variables=tuple(run["variables"]),
        horizons=tuple(int(h) for h in run["horizons"]),
        models=tuple(resolved_models),
        oos_start=pd.Timestamp(run["oos_start"]),
        oos_end=pd.Timestamp(run["oos_end"]),
        seed=int(run.get("seed", 0)),
        refresh_months=int(run.get("refresh_months", 24)),
        rf_trees=int(run.get("rf_trees", 500)),
        rf_cv_trees=int(run.get("rf_cv_trees", 100)),
        kfold_k=int(run.get("kfold_k", 5)),
        val_frac=float(run.get("val_frac", 0.25)),
        min_history_months=int(run.get("min_history_months", 240)),
        allow_any_horizon=bool(run.get("allow_any_horizon", False)),
        jobs=int(run.get("jobs", 1)),
        grid_overrides=grid_overrides,
    )
    return cfg, data["path"], raw


@main.command(name="run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--jobs", type=int, default=None, help="Worker count (overrides config).")
def run_cmd(config_path, store_path, jobs):
    """Run the out-of-sample experiment described by a TOML config."""
    with open(config_path, "rb") as f:
        raw = tomllib.load(f)
    try:
        cfg, data_path, resolved = _validate_config(raw)
    except (ValueError, TypeError) as exc:
        _fail(str(exc))
    if jobs is not None:
        cfg = ExperimentConfig(**{**cfg.__dict__, "jobs": int(jobs)})
    try:
        panel = _load_panel(data_path)
    except (PanelValidationError, DateParseError, ValueError) as exc:
        _fail(str(exc))

    store = ForecastStore()
    if os.path.exists(store_path):
        try:
            store = ForecastStore.load(store_path)
        except StoreSchemaError as exc:
            _fail(str(exc))
        click.echo(f"resuming: {len(store)} records already present", err=True)

    t0 = time.monotonic()
    try:
        store = run_experiment(panel, cfg, store=store)
    except ValueError as exc:
        _fail(str(exc))
    elapsed = time.monotonic() - t0
    store.save(store_path)

    cfg_json = json.dumps(resolved, sort_keys=True, default=str)
    manifest = RunManifest(
        config_hash=hashlib.sha256(cfg_json.encode()).hexdigest(),
        code_version=__version__,
        seed=cfg.seed,
        elapsed_seconds=round(elapsed, 3),
        n_records=len(store),
        attempts=store.run_stats.get("attempts", {}),
        failures=store.run_stats.get("failures", {}),
        skipped_existing=store.run_stats.get("skipped_existing", 0),
        resolved_config=resolved,
    )
    manifest.save(store_path + ".manifest.json")
    click.echo(
        f"{len(store)} records in store ({store.run_stats.get('skipped_existing', 0)} "
        f"reused); {elapsed:.1f}s"
    )


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_")


def _require_models(store: ForecastStore, names) -> list:
    roster = model_roster()
    available = store.models()
    out = []
    for n in names:
        try:
            canon = resolve_model_name(n, roster)
        except KeyError:
            canon = n
        if canon not in available:
            _fail(f"model {n!r} not in the store; available: {available}")
        out.append(canon)
    return out


def _loss_frame(store: ForecastStore, v, h) -> pd.DataFrame:
    df = store.to_frame()
    df = df[(df["variable"] == v) & (df["horizon"] == h)]
    df["loss"] = df["e"] ** 2
    return df.pivot(index="date", columns="model", values="loss").dropna()


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--spec", "eval_spec", required=True,
              type=click.Choice(["tables", "treatment", "heterogeneity", "mcs", "dm", "fluctuation"]))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--reference", default="AR,BIC", show_default=True)
@click.option("--model-a", default=None, help="First model for dm/fluctuation.")
@click.option("--model-b", default=None, help="Second model for dm/fluctuation.")
@click.option("--alpha", default=0.25, show_default=True, help="MCS level.")
@click.option("--window", default=60, show_default=True, help="Fluctuation window (months).")
@click.option("--features", default="NL", show_default=True,
              help="Comma-separated features for the treatment regression.")
@click.option("--xi-file", default=None, type=click.Path(exists=True),
              help="CSV (date,value) conditioning series for heterogeneity.")
@click.option("--seed", default=0, show_default=True)
def eval(store_path, eval_spec, out_dir, reference, model_a, model_b, alpha,
         window, features, xi_file, seed):
    """Evaluate a forecast store and write CSV tables."""
    try:
        store = ForecastStore.load(store_path)
    except StoreSchemaError as exc:
        _fail(str(exc))
    if len(store) == 0:
        _fail("store is empty")
    os.makedirs(out_dir, exist_ok=True)
    df = store.to_frame()
    pairs = sorted(set(zip(df["variable"], df["horizon"])))

    if eval_spec == "tables":
        [ref] = _require_models(store, [reference])
        table = relative_rmspe_table(store, ref)
        dm_p = dm_against_reference(store, ref)
        mcs_flags = {}
        for v, h in pairs:
            losses = _loss_frame(store, v, h)
            try:
                res = model_confidence_set(losses, alpha=alpha, seed=seed)
                survivors = res.auxiliary["survivors"]
            except ValueError:
                survivors = list(losses.columns)  # too short to test
            for m in losses.columns:
                mcs_flags[(v, h, m)] = m in survivors
        for v in sorted({p[0] for p in pairs}):
            rows = []
            for m in store.models():
                row = {"model": m}
                for vv, h in pairs:
                    if vv != v:
                        continue
                    row[f"h{h}_rel_rmspe"] = table.loc[(v, h), m]
                    p = dm_p[(dm_p["variable"] == v) & (dm_p["horizon"] == h)
                             & (dm_p["model"] == m)]["p_value"]
                    pv = float(p.iloc[0]) if len(p) else np.nan
                    row[f"h{h}_dm_p"] = pv
                    row[f"h{h}_stars"] = (
                        "" if not np.isfinite(pv) else
                        "***" if pv < 0.01 else "**" if pv < 0.05 else
                        "*" if pv < 0.10 else ""
                    )
                    row[f"h{h}_in_mcs"] = bool(mcs_flags.get((v, h, m), False))
                rows.append(row)
            ref_rows = [{"model": f"{ref} (RMSPE)"}]
            for vv, h in pairs:
                if vv == v:
                    ref_rows[0][f"h{h}_rel_rmspe"] = table.loc[(v, h), f"{ref} (RMSPE)"]
            out = pd.DataFrame(rows + ref_rows)
            out.to_csv(os.path.join(out_dir, f"tables_{_slug(v)}.csv"), index=False)
        click.echo(f"wrote {len(set(p[0] for p in pairs))} table files to {out_dir}")

    elif eval_spec == "dm":
        a, b = model_a or reference, model_b or reference
        [a, b] = _require_models(store, [a, b])
        rows = []
        for v, h in pairs:
            losses = _loss_frame(store, v, h)
            try:
                res = dm_test(losses[a].to_numpy(), losses[b].to_numpy(), h=int(h))
            except ValueError as exc:
                _fail(f"({v}, h={h}): {exc}", code=1)
            rows.append({"variable": v, "horizon": h, "model_a": a, "model_b": b,
                         "statistic": res.statistic, "p_value": res.p_value})
        path = os.path.join(out_dir, f"dm_{_slug(a)}_vs_{_slug(b)}.csv")
        pd.DataFrame(rows).to_csv(path, index=False)
        click.echo(f"wrote {path}")

    elif eval_spec == "mcs":
        rows = []
        for v, h in pairs:
            losses = _loss_frame(store, v, h)
            try:
                res = model_confidence_set(losses, alpha=alpha, seed=seed)
            except ValueError as exc:
                _fail(f"({v}, h={h}): {exc}", code=1)
            for m in losses.columns:
                rows.append({
                    "variable": v, "horizon": h, "model": m,
                    "survives": m in res.auxiliary["survivors"],
                    "p_value": res.auxiliary["p_values"].get(m, np.nan),
                })
        path = os.path.join(out_dir, f"mcs_alpha{alpha}.csv")
        pd.DataFrame(rows).to_csv(path, index=False)
        click.echo(f"wrote {path}")

    elif eval_spec == "fluctuation":
        if not model_a or not model_b:
            _fail("fluctuation needs --model-a and --model-b")
        [a, b] = _require_models(store, [model_a, model_b])
        for v, h in pairs:
            losses = _loss_frame(store, v, h)
            try:
                res = fluctuation_test(losses[a].to_numpy(), losses[b].to_numpy(),
                                       window=window, h=int(h))
            except ValueError as exc:
                _fail(f"({v}, h={h}): {exc}", code=1)
            out = pd.DataFrame({
                "date": losses.index[res.centers],
                "statistic": res.statistics,
                "upper": res.critical_value,
                "lower": -res.critical_value,
            })
            path = os.path.join(
                out_dir, f"fluct_{_slug(a)}_vs_{_slug(b)}_{_slug(v)}_h{h}.csv"
            )
            out.to_csv(path, index=False)
        click.echo(f"wrote fluctuation paths to {out_dir}")

    elif eval_spec == "treatment":
        panel = pseudo_r2(store)
        feats = [f.strip() for f in features.split(",") if f.strip()]
        try:
            res = treatment_regression(panel, feats)
        except (CollinearityError, ValueError) as exc:
            _fail(str(exc))
        path = os.path.join(out_dir, f"treatment_{_slug(features)}.csv")
        res.to_frame().to_csv(path, index_label="term")
        click.echo(f"wrote {path}")

    elif eval_spec == "heterogeneity":
        if not xi_file:
            _fail("heterogeneity needs --xi-file")
        xi_df = pd.read_csv(xi_file, parse_dates=[0])
        xi = pd.Series(xi_df.iloc[:, 1].to_numpy(), index=pd.DatetimeIndex(xi_df.iloc[:, 0]))
        panel = pseudo_r2(store)
        try:
            res = heterogeneity_regression(panel, xi)
        except (CollinearityError, ValueError) as exc:
            _fail(str(exc))
        path = os.path.join(out_dir, "heterogeneity_NL.csv")
        res.to_frame().to_csv(path, index_label="term")
        click.echo(f"wrote {path} ({res.dropped} rows dropped for missing xi)")


if __name__ == "__main__":
    main()
