"""Expanding-window experiment runner: coverage, determinism, resume."""

import numpy as np
import pandas as pd
import pytest

from macroml.harness import ExperimentConfig, ForecastStore, run_experiment

from conftest import make_panel

SMALL_GRIDS = {
    "RRAR,K-fold": {"p_y": (2,), "lam": (0.1, 10.0)},
    "RRARDI,K-fold": {"p_y": (2,), "p_f": (1,), "K": (3,), "lam": (0.1, 10.0)},
}


def _config(**kw):
    base = dict(
        variables=("S0",),
        horizons=(1,),
        models=("AR,BIC",),
        oos_start="1988-01-01",
        oos_end="1988-12-01",
        seed=7,
        grid_overrides=SMALL_GRIDS,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_reversed_window_rejected(self):
        with pytest.raises(ValueError):
            _config(oos_start="1990-01-01", oos_end="1989-01-01")

    def test_empty_roster_rejected(self):
        with pytest.raises(ValueError):
            _config(models=())

    def test_off_roster_horizon_rejected(self):
        with pytest.raises(ValueError, match="horizon"):
            _config(horizons=(7,))

    def test_any_horizon_override(self):
        cfg = _config(horizons=(7,), allow_any_horizon=True)
        assert cfg.horizons == (7,)

    def test_zero_refresh_rejected(self):
        with pytest.raises(ValueError):
            _config(refresh_months=0)


class TestRunExperiment:
    def test_every_origin_recorded(self):
        store = run_experiment(make_panel(), _config())
        assert len(store) == 12
        dates = [r.t for r in store]
        assert dates[0] == pd.Timestamp("1988-01-01")
        assert dates[-1] == pd.Timestamp("1988-12-01")
        assert store.run_stats["failures"] == {"AR,BIC": 0}

    def test_two_models_two_horizons(self):
        cfg = _config(models=("AR,BIC", "RRAR,K-fold"), horizons=(1, 3))
        store = run_experiment(make_panel(), cfg)
        assert len(store) == 12 * 2 * 2
        assert store.models() == ["AR,BIC", "RRAR,K-fold"]

    def test_short_history_rejected(self):
        with pytest.raises(ValueError, match="history"):
            run_experiment(make_panel(T=120), _config(oos_start="1970-01-01",
                                                      oos_end="1970-06-01"))

    def test_unknown_variable_rejected(self):
        with pytest.raises(ValueError, match="S9"):
            run_experiment(make_panel(), _config(variables=("S9",)))

    def test_oos_date_off_panel_rejected(self):
        with pytest.raises(ValueError):
            run_experiment(make_panel(), _config(oos_end="2050-01-01"))

    def test_realized_values_match_target(self):
        panel = make_panel()
        store = run_experiment(panel, _config())
        levels = panel.values[:, 0]
        i = panel.dates.get_indexer([pd.Timestamp("1988-05-01")])[0]
        r = store.get("1988-05-01", 1, "S0", "AR,BIC")
        assert r.y == pytest.approx(np.log(levels[i] / levels[i - 1]))


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, tmp_path):
        cfg = _config(models=("AR,BIC", "RRAR,K-fold"))
        panel = make_panel()
        paths = []
        for i in (1, 2):
            p = tmp_path / f"s{i}.npz"
            run_experiment(panel, cfg).save(p)
            paths.append(p)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_parallel_matches_sequential(self, tmp_path):
        panel = make_panel()
        p1, p2 = tmp_path / "seq.npz", tmp_path / "par.npz"
        cfg1 = _config(models=("AR,BIC", "RRAR,K-fold"), horizons=(1, 3), jobs=1)
        cfg2 = _config(models=("AR,BIC", "RRAR,K-fold"), horizons=(1, 3), jobs=4)
        run_experiment(panel, cfg1).save(p1)
        run_experiment(panel, cfg2).save(p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestResume:
    def test_complete_store_skips_everything(self):
        panel = make_panel()
        cfg = _config()
        store = run_experiment(panel, cfg)
        n = len(store)
        store2 = run_experiment(panel, cfg, store=store)
        assert store2 is store
        assert len(store2) == n
        assert store2.overwrites == 0
        assert store2.run_stats["skipped_existing"] == n
        assert store2.run_stats["attempts"] == {}

    def test_partial_store_fills_the_gap(self):
        panel = make_panel()
        cfg = _config()
        full = run_experiment(panel, cfg)
        partial = ForecastStore(r for r in full if r.t < pd.Timestamp("1988-07-01"))
        assert len(partial) == 6
        resumed = run_experiment(panel, cfg, store=partial)
        assert len(resumed) == 12
        assert resumed.run_stats["skipped_existing"] == 6
        # the filled-in half must agree with the uninterrupted run
        assert [r for r in resumed] == [r for r in full]
