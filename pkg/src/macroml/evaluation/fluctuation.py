"""Rolling-window test for time variation in relative forecast accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hac import long_run_variance

# two-sided critical values for the rolling equal-accuracy statistic,
# tabulated against mu = window / sample length
_MU = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
_CRIT = {
    0.05: np.array([3.393, 3.179, 3.012, 2.890, 2.779, 2.634, 2.560, 2.433, 2.331]),
    0.10: np.array([3.170, 2.948, 2.766, 2.626, 2.500, 2.356, 2.252, 2.130, 1.950]),
}


def fluctuation_critical_value(mu: float, alpha: float = 0.05) -> float:
    """Interpolated two-sided band for window share ``mu`` of the sample."""
    if alpha not in _CRIT:
        raise ValueError(f"tabulated levels are {sorted(_CRIT)}, got {alpha}")
    mu = float(np.clip(mu, _MU[0], _MU[-1]))
    return float(np.interp(mu, _MU, _CRIT[alpha]))


@dataclass(frozen=True)
class FluctuationResult:
    statistics: np.ndarray  # one rolling statistic per window
    centers: np.ndarray  # index of each window's last observation
    critical_value: float
    window: int
    mu: float
    alpha: float

    @property
    def crosses(self) -> np.ndarray:
        return np.abs(self.statistics) > self.critical_value


def fluctuation_test(
    loss_a,
    loss_b,
    window: int,
    h: int = 1,
    alpha: float = 0.05,
) -> FluctuationResult:
    """Rolling equal-accuracy statistics of the loss differential.

    Each window of length ``window`` yields mean(d)/sqrt(lrv(d)/window); the
    band comes from the tabulation indexed by window/T. The full-sample
    window degenerates to a single equal-accuracy statistic.
    """
    a = np.asarray(loss_a, dtype=float)
    b = np.asarray(loss_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("loss sequences must be aligned one-dimensional arrays")
    T = a.size
    if window < 24:
        raise ValueError("window must be at least 24 months")
    if window > T:
        raise ValueError(f"window {window} exceeds the sample length {T}")
    d = a - b
    if not np.all(np.isfinite(d)):
        raise ValueError("loss sequences contain non-finite entries")
    lag = max(h - 1, 0)
    stats_out = np.empty(T - window + 1)
    for i in range(T - window + 1):
        seg = d[i : i + window]
        mean = float(seg.mean())
        lrv = long_run_variance(seg, lag)
        stats_out[i] = 0.0 if lrv <= 0 and mean == 0 else mean / np.sqrt(max(lrv, 1e-300) / window)
    mu = window / T
    return FluctuationResult(
        statistics=stats_out,
        centers=np.arange(window - 1, T),
        critical_value=fluctuation_critical_value(mu, alpha),
        window=window,
        mu=mu,
        alpha=alpha,
    )
