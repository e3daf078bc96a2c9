"""Equal-predictive-accuracy tests on loss differentials."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .hac import long_run_variance


class DegenerateVarianceError(Exception):
    """Zero long-run variance with a nonzero mean differential."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    auxiliary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p-value outside [0, 1]")


def dm_test(loss_a, loss_b, h: int = 1, bandwidth: int | None = None) -> TestResult:
    """Test of equal expected loss between two aligned loss sequences.

    The statistic is mean(d)/sqrt(lrv(d)/T) with d = loss_a - loss_b and a
    Bartlett long-run variance truncated at h-1 lags (or ``bandwidth`` if
    larger); p-values use the normal reference distribution.
    """
    a = np.asarray(loss_a, dtype=float)
    b = np.asarray(loss_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("loss sequences must be aligned one-dimensional arrays")
    ok = np.isfinite(a) & np.isfinite(b)
    d = a[ok] - b[ok]
    T = d.size
    if T < 30:
        raise ValueError(f"only {T} aligned observations; need at least 30")
    lag = max(h - 1, 0)
    if bandwidth is not None:
        lag = max(lag, int(bandwidth))
    mean = float(d.mean())
    lrv = long_run_variance(d, lag)
    if lrv <= 0.0:
        if mean == 0.0:
            return TestResult(0.0, 1.0, {"bandwidth": lag, "n_obs": T})
        raise DegenerateVarianceError(
            f"zero long-run variance with mean differential {mean:.3e}"
        )
    stat = mean / np.sqrt(lrv / T)
    p = 2.0 * float(stats.norm.sf(abs(stat)))
    return TestResult(float(stat), min(p, 1.0), {"bandwidth": lag, "n_obs": T})
