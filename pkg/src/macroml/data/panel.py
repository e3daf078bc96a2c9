"""Monthly panel ingestion, stationarizing transforms and forecast targets."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

VALID_TCODES = frozenset(range(1, 8))


class PanelValidationError(ValueError):
    pass


class DateParseError(ValueError):
    pass


@dataclass(frozen=True)
class RawPanel:
    """Dated monthly matrix of raw series with per-series transform codes.

    Missing leading observations are NaN. Dates are month starts with no
    gaps; every column must have at least 24 non-missing observations.
    """

    dates: pd.DatetimeIndex
    names: tuple
    tcodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        T, N = self.values.shape
        if len(self.dates) != T:
            raise PanelValidationError("dates length does not match values rows")
        if len(self.names) != N or len(self.tcodes) != N:
            raise PanelValidationError("names/tcodes length does not match columns")
        expected = pd.date_range(self.dates[0], periods=T, freq="MS")
        if not self.dates.equals(expected):
            raise PanelValidationError("dates must be strictly increasing monthly with no gaps")
        bad = [n for n, c in zip(self.names, self.tcodes) if int(c) not in VALID_TCODES]
        if bad:
            raise PanelValidationError(f"transformation code outside 1..7 for series: {bad}")
        thin = [
            n for j, n in enumerate(self.names)
            if np.isfinite(self.values[:, j]).sum() < 24
        ]
        if thin:
            raise PanelValidationError(f"fewer than 24 observations for series: {thin}")

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def tcode(self, name: str) -> int:
        return int(self.tcodes[self.names.index(name)])

    def stationary(self) -> pd.DataFrame:
        """Apply each series' transform code; leading undefined entries NaN."""
        out = np.column_stack(
            [apply_tcode(self.values[:, j], int(self.tcodes[j])) for j in range(self.n_series)]
        )
        return pd.DataFrame(out, index=self.dates, columns=list(self.names))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, index=self.dates, columns=list(self.names))


def _parse_dates(raw: pd.Series) -> pd.DatetimeIndex:
    parsed = []
    for row, cell in enumerate(raw):
        s = str(cell).strip().replace(":", "-").replace("/", "-")
        ts = None
        for fmt in ("%Y-%m-%d", "%Y-%m", "%m-%d-%Y", "%m-%Y"):
            try:
                ts = pd.to_datetime(s, format=fmt)
                break
            except ValueError:
                continue
        if ts is None:
            raise DateParseError(f"cannot parse date {cell!r} at data row {row}")
        parsed.append(ts.replace(day=1))
    return pd.DatetimeIndex(parsed)


def ingest_fredmd(csv_path) -> RawPanel:
    """Read a FRED-MD style CSV: header row, transform-code row, then data.

    The first column holds dates (ISO YYYY-MM-DD, YYYY:MM or M/D/Y all
    accepted); the row whose first cell is non-date-like (FRED-MD writes
    'Transform:') carries the integer transformation codes.
    """
    path = Path(csv_path)
    if not path.exists():
        raise FileNotFoundError(path)
    df = pd.read_csv(path)
    names = tuple(str(c).strip() for c in df.columns[1:])
    tcode_row = df.iloc[0, 1:]
    tcodes = np.array([int(float(v)) for v in tcode_row])
    bad = [n for n, c in zip(names, tcodes) if c not in VALID_TCODES]
    if bad:
        raise PanelValidationError(f"transformation code outside 1..7 for series: {bad}")
    body = df.iloc[1:].reset_index(drop=True)
    body = body[body.iloc[:, 0].notna()]
    dates = _parse_dates(body.iloc[:, 0])
    values = body.iloc[:, 1:].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    return RawPanel(dates=dates, names=names, tcodes=tcodes, values=values)


def apply_tcode(series, code: int) -> np.ndarray:
    """Stationarize one series with its integer transform code (1..7).

    1: x, 2: dx, 3: d2x, 4: log x, 5: dlog x, 6: d2log x,
    7: d(x_t/x_{t-1} - 1). Undefined leading entries come back as NaN.
    """
    x = np.asarray(series, dtype=float)
    if code not in VALID_TCODES:
        raise ValueError(f"transformation code must be in 1..7, got {code}")
    if code in (4, 5, 6):
        nonpos = np.flatnonzero(np.isfinite(x) & (x <= 0))
        if nonpos.size:
            raise ValueError(f"non-positive value at index {nonpos[0]} under log transform")
    nanpad = np.full(1, np.nan)
    if code == 1:
        return x.copy()
    if code == 2:
        return np.concatenate([nanpad, np.diff(x)])
    if code == 3:
        return np.concatenate([nanpad, nanpad, np.diff(x, n=2)])
    if code == 4:
        return np.log(x)
    if code == 5:
        return np.concatenate([nanpad, np.diff(np.log(x))])
    if code == 6:
        return np.concatenate([nanpad, nanpad, np.diff(np.log(x), n=2)])
    # code 7: first difference of the period growth rate
    g = x[1:] / x[:-1] - 1.0
    return np.concatenate([nanpad, nanpad, np.diff(g)])


class TargetKind(Enum):
    LEVEL_I0 = "level"
    AVG_LOG_GROWTH = "avg_log_growth"
    AVG_DIFF = "avg_diff"


@dataclass(frozen=True)
class TargetSeries:
    """Direct-forecast target; values[i] is the target dated i (= t+h)."""

    variable: str
    h: int
    kind: TargetKind
    values: np.ndarray


def build_target(levels, kind: TargetKind, h: int, variable: str = "") -> TargetSeries:
    """Build the h-step direct target from a level series.

    LEVEL_I0 keeps the series; AVG_LOG_GROWTH is (1/h)*ln(Y_{t+h}/Y_t);
    AVG_DIFF is (1/h)*(Y_{t+h}-Y_t). Entries whose h-window leaves the
    sample are NaN.
    """
    if h < 1:
        raise ValueError("horizon must be >= 1")
    y = np.asarray(levels, dtype=float)
    T = y.shape[0]
    out = np.full(T, np.nan)
    if h >= T:
        import warnings

        warnings.warn(f"horizon {h} >= sample length {T}; target is empty")
        return TargetSeries(variable, h, kind, out)
    if kind is TargetKind.LEVEL_I0:
        out = y.copy()
    elif kind is TargetKind.AVG_LOG_GROWTH:
        if np.any(np.isfinite(y) & (y <= 0)):
            raise ValueError("AVG_LOG_GROWTH requires strictly positive levels")
        out[h:] = np.log(y[h:] / y[:-h]) / h
    elif kind is TargetKind.AVG_DIFF:
        out[h:] = (y[h:] - y[:-h]) / h
    else:
        raise ValueError(f"unknown target kind {kind}")
    return TargetSeries(variable, h, kind, out)
