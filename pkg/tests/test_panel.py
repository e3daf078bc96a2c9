"""Panel ingestion, stationarizing transforms and direct-forecast targets."""

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroml.data.panel import (
    DateParseError,
    PanelValidationError,
    RawPanel,
    TargetKind,
    apply_tcode,
    build_target,
    ingest_fredmd,
)

from conftest import make_panel


def _write_csv(path, dates, names, tcodes, values, date_fmt="%Y-%m-%d"):
    with open(path, "w") as f:
        f.write("sasdate," + ",".join(names) + "\n")
        f.write("Transform:," + ",".join(str(c) for c in tcodes) + "\n")
        for i, d in enumerate(dates):
            f.write(d.strftime(date_fmt) + ","
                    + ",".join(f"{v:.8f}" for v in values[i]) + "\n")


class TestApplyTcode:
    def test_level(self):
        x = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(apply_tcode(x, 1), x)

    def test_first_difference(self):
        out = apply_tcode(np.array([1.0, 3.0, 6.0]), 2)
        assert np.isnan(out[0])
        np.testing.assert_allclose(out[1:], [2.0, 3.0])

    def test_second_difference(self):
        out = apply_tcode(np.array([1.0, 3.0, 6.0, 10.0]), 3)
        assert np.isnan(out[:2]).all()
        np.testing.assert_allclose(out[2:], [1.0, 1.0])

    def test_log(self):
        np.testing.assert_allclose(apply_tcode(np.array([1.0, np.e]), 4), [0.0, 1.0])

    def test_dlog(self):
        out = apply_tcode(np.array([1.0, np.e, np.e**2]), 5)
        assert np.isnan(out[0])
        np.testing.assert_allclose(out[1:], [1.0, 1.0])

    def test_d2log(self):
        out = apply_tcode(np.array([1.0, np.e, np.e**3]), 6)
        assert np.isnan(out[:2]).all()
        np.testing.assert_allclose(out[2:], [1.0])

    def test_growth_difference(self):
        x = np.array([100.0, 110.0, 121.0, 133.1])
        out = apply_tcode(x, 7)
        assert np.isnan(out[:2]).all()
        np.testing.assert_allclose(out[2:], [0.0, 0.0], atol=1e-12)

    def test_invalid_code(self):
        with pytest.raises(ValueError, match="1..7"):
            apply_tcode(np.ones(5), 8)

    def test_log_of_nonpositive(self):
        with pytest.raises(ValueError, match="non-positive"):
            apply_tcode(np.array([1.0, -1.0]), 5)

    @given(
        code=st.integers(min_value=1, max_value=7),
        n=st.integers(min_value=5, max_value=40),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=40, deadline=None)
    def test_output_length_and_nan_pad(self, code, n, seed):
        rng = np.random.default_rng(seed)
        x = np.exp(rng.standard_normal(n) * 0.1)
        out = apply_tcode(x, code)
        assert out.shape == x.shape
        pad = {1: 0, 2: 1, 3: 2, 4: 0, 5: 1, 6: 2, 7: 2}[code]
        assert np.isnan(out[:pad]).all()
        assert np.isfinite(out[pad:]).all()


class TestRawPanel:
    def test_round_trip(self, panel):
        assert panel.n_series == 5
        stat = panel.stationary()
        assert stat.shape == panel.values.shape
        assert np.isnan(stat.iloc[0]).all()  # tcode 5 loses the first month

    def test_gap_in_dates_rejected(self, panel):
        dates = panel.dates.delete(5).append(
            pd.DatetimeIndex([panel.dates[-1] + pd.DateOffset(months=1)])
        )
        with pytest.raises(PanelValidationError, match="monthly"):
            RawPanel(dates=dates, names=panel.names, tcodes=panel.tcodes,
                     values=panel.values)

    def test_bad_tcode_names_series(self, panel):
        tc = panel.tcodes.copy()
        tc[2] = 9
        with pytest.raises(PanelValidationError, match="S2"):
            RawPanel(dates=panel.dates, names=panel.names, tcodes=tc,
                     values=panel.values)

    def test_too_few_observations_names_series(self, panel):
        vals = panel.values.copy()
        vals[:-10, 1] = np.nan
        with pytest.raises(PanelValidationError, match="S1"):
            RawPanel(dates=panel.dates, names=panel.names, tcodes=panel.tcodes,
                     values=vals)


class TestIngest:
    def test_fredmd_layout(self, tmp_path, panel):
        path = tmp_path / "panel.csv"
        _write_csv(path, panel.dates, panel.names, panel.tcodes, panel.values,
                   date_fmt="%m/%d/%Y")
        got = ingest_fredmd(path)
        assert got.names == panel.names
        np.testing.assert_array_equal(got.tcodes, panel.tcodes)
        assert got.dates.equals(panel.dates)
        np.testing.assert_allclose(got.values, panel.values, rtol=1e-6)

    @pytest.mark.parametrize("fmt", ["%Y-%m-%d", "%Y:%m", "%m/%d/%Y"])
    def test_date_formats(self, tmp_path, panel, fmt):
        path = tmp_path / "panel.csv"
        _write_csv(path, panel.dates, panel.names, panel.tcodes, panel.values,
                   date_fmt=fmt)
        got = ingest_fredmd(path)
        assert got.dates.equals(panel.dates)

    def test_unparseable_date_names_row(self, tmp_path, panel):
        path = tmp_path / "panel.csv"
        _write_csv(path, panel.dates, panel.names, panel.tcodes, panel.values)
        lines = path.read_text().splitlines()
        lines[5] = "notadate" + lines[5][10:]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DateParseError, match="notadate"):
            ingest_fredmd(path)

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            ingest_fredmd("/nonexistent/panel.csv")


class TestBuildTarget:
    def test_avg_log_growth(self):
        y = np.array([1.0, np.e, np.e**2, np.e**3])
        tgt = build_target(y, TargetKind.AVG_LOG_GROWTH, h=2)
        assert np.isnan(tgt.values[:2]).all()
        np.testing.assert_allclose(tgt.values[2:], [1.0, 1.0])

    def test_avg_diff(self):
        y = np.array([0.0, 1.0, 4.0, 9.0])
        tgt = build_target(y, TargetKind.AVG_DIFF, h=2)
        np.testing.assert_allclose(tgt.values[2:], [2.0, 4.0])

    def test_level(self):
        y = np.array([1.0, 2.0, 3.0])
        tgt = build_target(y, TargetKind.LEVEL_I0, h=1)
        np.testing.assert_array_equal(tgt.values, y)

    def test_h1_equals_one_period_growth(self):
        rng = np.random.default_rng(0)
        y = np.exp(np.cumsum(0.01 * rng.standard_normal(50)))
        tgt = build_target(y, TargetKind.AVG_LOG_GROWTH, h=1)
        np.testing.assert_allclose(tgt.values[1:], np.diff(np.log(y)))

    def test_horizon_too_long_warns(self):
        with pytest.warns(UserWarning, match="sample length"):
            tgt = build_target(np.ones(5), TargetKind.AVG_DIFF, h=10)
        assert np.isnan(tgt.values).all()

    def test_nonpositive_levels_rejected_for_log_growth(self):
        with pytest.raises(ValueError, match="positive"):
            build_target(np.array([1.0, -2.0, 3.0]), TargetKind.AVG_LOG_GROWTH, h=1)

    def test_bad_horizon(self):
        with pytest.raises(ValueError, match="horizon"):
            build_target(np.ones(10), TargetKind.AVG_DIFF, h=0)

    @given(h=st.integers(min_value=1, max_value=6), seed=st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_avg_growth_telescopes(self, h, seed):
        # the h-step average log growth is the mean of the one-step growths
        rng = np.random.default_rng(seed)
        y = np.exp(np.cumsum(0.05 * rng.standard_normal(40)))
        tgt = build_target(y, TargetKind.AVG_LOG_GROWTH, h=h)
        one = np.diff(np.log(y))
        for t in range(h, 40):
            np.testing.assert_allclose(tgt.values[t], one[t - h : t].mean())
