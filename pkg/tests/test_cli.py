"""Command-line interface: ingest, run, eval, exit codes and resume."""

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from macroml.cli import main
from macroml.harness import ForecastStore

from conftest import make_panel


@pytest.fixture
def runner():
    return CliRunner()


def _write_panel_csv(path, panel):
    with open(path, "w") as f:
        f.write("sasdate," + ",".join(panel.names) + "\n")
        f.write("Transform:," + ",".join(str(c) for c in panel.tcodes) + "\n")
        for i, d in enumerate(panel.dates):
            f.write(d.strftime("%m/%d/%Y") + ","
                    + ",".join(f"{v:.10f}" for v in panel.values[i]) + "\n")


@pytest.fixture
def data_csv(tmp_path):
    p = tmp_path / "panel.csv"
    _write_panel_csv(p, make_panel())
    return p


CONFIG = """\
[data]
path = "{data}"

[run]
variables = ["S0"]
horizons = [1]
models = ["AR,BIC", "RRAR,K-fold"]
oos_start = "1988-01-01"
oos_end = "1988-12-01"
seed = 7

[grids."RRAR,K-fold"]
p_y = [2]
lam = [0.1, 10.0]
"""


@pytest.fixture
def config_file(tmp_path, data_csv):
    p = tmp_path / "cfg.toml"
    p.write_text(CONFIG.format(data=data_csv))
    return p


class TestIngest:
    def test_summary_line(self, runner, tmp_path, data_csv):
        out = tmp_path / "panel.npz"
        res = runner.invoke(main, ["ingest", "--data", str(data_csv),
                                   "--out", str(out)])
        assert res.exit_code == 0, res.output
        assert "5 series, 1968-01..1989-12" in res.output
        assert out.exists()

    def test_bad_transform_code_exits_two(self, runner, tmp_path):
        panel = make_panel()
        p = tmp_path / "bad.csv"
        with open(p, "w") as f:
            f.write("sasdate," + ",".join(panel.names) + "\n")
            f.write("Transform:,5,5,9,5,5\n")
            for i, d in enumerate(panel.dates):
                f.write(d.strftime("%m/%d/%Y") + ","
                        + ",".join(f"{v:.10f}" for v in panel.values[i]) + "\n")
        res = runner.invoke(main, ["ingest", "--data", str(p),
                                   "--out", str(tmp_path / "o.npz")])
        assert res.exit_code == 2
        assert "error:" in res.output

    def test_missing_file_exits_two(self, runner, tmp_path):
        res = runner.invoke(main, ["ingest", "--data", str(tmp_path / "no.csv"),
                                   "--out", str(tmp_path / "o.npz")])
        assert res.exit_code == 2

    def test_data_dir_resolution(self, runner, tmp_path, data_csv, monkeypatch):
        monkeypatch.setenv("MACROML_DATA_DIR", str(data_csv.parent))
        res = runner.invoke(main, ["ingest", "--data", data_csv.name,
                                   "--out", str(tmp_path / "o.npz")])
        assert res.exit_code == 0, res.output


class TestRun:
    def test_run_produces_store_and_manifest(self, runner, tmp_path, config_file):
        store_path = tmp_path / "store.npz"
        res = runner.invoke(main, ["run", "--config", str(config_file),
                                   "--store", str(store_path)])
        assert res.exit_code == 0, res.output
        store = ForecastStore.load(store_path)
        assert len(store) == 24  # 12 months x 2 models
        manifest = json.loads((tmp_path / "store.npz.manifest.json").read_text())
        assert manifest["n_records"] == 24
        assert manifest["seed"] == 7
        assert manifest["failures"] == {"AR,BIC": 0, "RRAR,K-fold": 0}

    def test_rerun_reuses_everything(self, runner, tmp_path, config_file):
        store_path = tmp_path / "store.npz"
        args = ["run", "--config", str(config_file), "--store", str(store_path)]
        assert runner.invoke(main, args).exit_code == 0
        first = store_path.read_bytes()
        res = runner.invoke(main, args)
        assert res.exit_code == 0, res.output
        assert "resuming: 24 records" in res.output
        assert "(24 reused)" in res.output
        assert store_path.read_bytes() == first

    def test_invalid_config_lists_all_problems(self, runner, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text(
            '[run]\nmodels = ["NOPE,BIC"]\noos_start = "1988-01-01"\n'
            'oos_end = "1988-06-01"\n'
        )
        res = runner.invoke(main, ["run", "--config", str(p),
                                   "--store", str(tmp_path / "s.npz")])
        assert res.exit_code == 2
        # every problem reported at once
        assert "[data].path" in res.output
        assert "[run].variables" in res.output
        assert "[run].horizons" in res.output
        assert "NOPE,BIC" in res.output


@pytest.fixture
def filled_store(runner, tmp_path, config_file):
    store_path = tmp_path / "store.npz"
    res = runner.invoke(main, ["run", "--config", str(config_file),
                               "--store", str(store_path)])
    assert res.exit_code == 0, res.output
    return store_path


class TestEval:
    def test_dm_self_comparison_is_zero(self, runner, tmp_path, filled_store):
        out = tmp_path / "eval"
        res = runner.invoke(main, [
            "eval", "--store", str(filled_store), "--spec", "dm",
            "--out", str(out), "--model-a", "AR,BIC", "--model-b", "AR,BIC",
        ])
        assert res.exit_code == 1  # only 12 aligned months: honest refusal
        assert "need at least 30" in res.output

    def test_tables_written(self, runner, tmp_path, filled_store):
        out = tmp_path / "eval"
        res = runner.invoke(main, [
            "eval", "--store", str(filled_store), "--spec", "tables",
            "--out", str(out), "--reference", "AR,BIC",
        ])
        assert res.exit_code == 0, res.output
        table = pd.read_csv(out / "tables_S0.csv")
        ref_row = table[table["model"] == "AR,BIC"]
        assert ref_row["h1_rel_rmspe"].iloc[0] == pytest.approx(1.0)

    def test_unknown_reference_fails_cleanly(self, runner, tmp_path, filled_store):
        res = runner.invoke(main, [
            "eval", "--store", str(filled_store), "--spec", "tables",
            "--out", str(tmp_path / "e"), "--reference", "RFARDI,K-fold",
        ])
        assert res.exit_code == 2
        assert "not in the store" in res.output

    def test_empty_store_rejected(self, runner, tmp_path):
        p = tmp_path / "empty.npz"
        ForecastStore().save(p)
        res = runner.invoke(main, [
            "eval", "--store", str(p), "--spec", "tables",
            "--out", str(tmp_path / "e"),
        ])
        assert res.exit_code == 2
        assert "empty" in res.output

    def test_treatment_regression_on_synthetic_store(self, runner, tmp_path):
        # plant a constant accuracy gap between two roster models and check
        # the regression CSV reports it
        from macroml.harness import ForecastRecord

        dates = pd.date_range("2000-01-01", periods=60, freq="MS")
        rng = np.random.default_rng(0)
        y = rng.standard_normal(60)
        dev = y - y.mean()
        store = ForecastStore()
        for m, frac in (("AR,BIC", 0.0), ("RFAR,K-fold", 0.4)):
            for i in range(60):
                e = np.sqrt(frac) * dev[i]
                store.add(ForecastRecord(
                    t=dates[i], h=1, v="S0", m=m, yhat=float(y[i] - e),
                    y=float(y[i]), tune_vintage=dates[0],
                ))
        p = tmp_path / "s.npz"
        store.save(p)
        out = tmp_path / "eval"
        res = runner.invoke(main, [
            "eval", "--store", str(p), "--spec", "treatment",
            "--out", str(out), "--features", "NL",
        ])
        assert res.exit_code == 0, res.output
        table = pd.read_csv(out / "treatment_NL.csv", index_col="term")
        # the tree model loses 0.4 pseudo-R2 points by construction
        assert table.loc["NL", "coef"] == pytest.approx(-0.4, abs=1e-10)

    def test_fluctuation_requires_model_pair(self, runner, tmp_path, filled_store):
        res = runner.invoke(main, [
            "eval", "--store", str(filled_store), "--spec", "fluctuation",
            "--out", str(tmp_path / "e"),
        ])
        assert res.exit_code == 2
        assert "model-a" in res.output

    def test_version_flag(self, runner):
        res = runner.invoke(main, ["--version"])
        assert res.exit_code == 0
        assert "macroml" in res.output
