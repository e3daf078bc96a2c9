"""Forecast record storage: an in-memory keyed store with a binary columnar
file format and a CSV interchange export."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = ("date", "horizon", "variable", "model", "yhat", "y", "e", "tune_vintage")


class StoreSchemaError(Exception):
    """Raised when a stored file's schema version does not match."""


@dataclass(frozen=True)
class ForecastRecord:
    """One forecast of one variable at one horizon by one model."""

    t: pd.Timestamp  # target date
    h: int
    v: str
    m: str
    yhat: float
    y: float
    tune_vintage: pd.Timestamp

    @property
    def e(self) -> float:
        return self.y - self.yhat

    @property
    def key(self) -> tuple:
        return (self.t, self.h, self.v, self.m)


class ForecastStore:
    """Records keyed by (target date, horizon, variable, model).

    Re-adding an existing key replaces the record (last write wins) and
    increments an overwrite counter, so partial reruns can be merged safely.
    """

    def __init__(self, records=()):
        self._records: dict = {}
        self.overwrites = 0
        self.run_stats: dict = {}
        for r in records:
            self.add(r)

    def add(self, record: ForecastRecord) -> bool:
        replaced = record.key in self._records
        if replaced:
            self.overwrites += 1
            log.debug("overwriting record %s", record.key)
        self._records[record.key] = record
        return replaced

    def extend(self, records) -> None:
        for r in records:
            self.add(r)

    def get(self, t, h, v, m) -> ForecastRecord | None:
        return self._records.get((pd.Timestamp(t), int(h), v, m))

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self.records())

    def records(self) -> list:
        return [self._records[k] for k in sorted(self._records)]

    def models(self) -> list:
        return sorted({r.m for r in self._records.values()})

    def to_frame(self) -> pd.DataFrame:
        recs = self.records()
        return pd.DataFrame(
            {
                "date": [r.t for r in recs],
                "horizon": [r.h for r in recs],
                "variable": [r.v for r in recs],
                "model": [r.m for r in recs],
                "yhat": [r.yhat for r in recs],
                "y": [r.y for r in recs],
                "e": [r.e for r in recs],
                "tune_vintage": [r.tune_vintage for r in recs],
            }
        )

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "ForecastStore":
        store = cls()
        for row in df.itertuples(index=False):
            store.add(ForecastRecord(
                t=pd.Timestamp(row.date), h=int(row.horizon), v=str(row.variable),
                m=str(row.model), yhat=float(row.yhat), y=float(row.y),
                tune_vintage=pd.Timestamp(row.tune_vintage),
            ))
        return store

    # CSV interchange
    def to_csv(self, path) -> None:
        df = self.to_frame()
        df["date"] = df["date"].dt.strftime("%Y-%m-%d")
        df["tune_vintage"] = pd.to_datetime(df["tune_vintage"]).dt.strftime("%Y-%m-%d")
        df.to_csv(path, index=False, columns=list(CSV_COLUMNS))

    @classmethod
    def from_csv(cls, path) -> "ForecastStore":
        df = pd.read_csv(path, parse_dates=["date", "tune_vintage"])
        missing = set(CSV_COLUMNS) - set(df.columns)
        if missing:
            raise StoreSchemaError(f"CSV lacks required columns {sorted(missing)}")
        return cls.from_frame(df)

    # binary columnar format
    def save(self, path) -> None:
        recs = self.records()
        arrays = {
            "schema_version": np.int64(SCHEMA_VERSION),
            "date": np.array([r.t.to_datetime64() for r in recs], dtype="datetime64[ns]"),
            "horizon": np.array([r.h for r in recs], dtype=np.int64),
            "variable": np.array([r.v for r in recs], dtype=str),
            "model": np.array([r.m for r in recs], dtype=str),
            "yhat": np.array([r.yhat for r in recs], dtype=float),
            "y": np.array([r.y for r in recs], dtype=float),
            "tune_vintage": np.array(
                [r.tune_vintage.to_datetime64() for r in recs], dtype="datetime64[ns]"
            ),
        }
        # write the archive with fixed zip metadata so identical record sets
        # produce byte-identical files regardless of when they are saved
        import io
        import zipfile

        with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
            for name, arr in arrays.items():
                buf = io.BytesIO()
                np.lib.format.write_array(buf, np.asarray(arr), allow_pickle=True)
                info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
                info.compress_type = zipfile.ZIP_DEFLATED
                zf.writestr(info, buf.getvalue())

    @classmethod
    def load(cls, path) -> "ForecastStore":
        with np.load(path, allow_pickle=True) as z:
            version = int(z["schema_version"])
            if version != SCHEMA_VERSION:
                raise StoreSchemaError(
                    f"store schema version {version} != supported {SCHEMA_VERSION}"
                )
            store = cls()
            for i in range(len(z["date"])):
                store.add(ForecastRecord(
                    t=pd.Timestamp(z["date"][i]), h=int(z["horizon"][i]),
                    v=str(z["variable"][i]), m=str(z["model"][i]),
                    yhat=float(z["yhat"][i]), y=float(z["y"][i]),
                    tune_vintage=pd.Timestamp(z["tune_vintage"][i]),
                ))
        return store


def compute_error_panel(store: ForecastStore, loss: str = "SQUARED") -> pd.DataFrame:
    """Losses keyed (date, horizon, variable, model), wide over models.

    Missing (date, h, v, model) combinations appear as NaN, never as zero.
    """
    if loss not in ("SQUARED", "ABSOLUTE"):
        raise ValueError(f"unknown loss {loss!r}")
    df = store.to_frame()
    df["loss"] = df["e"] ** 2 if loss == "SQUARED" else df["e"].abs()
    return df.pivot_table(
        index=["date", "horizon", "variable"], columns="model", values="loss",
        dropna=False,
    )
