"""Heteroskedasticity- and autocorrelation-consistent covariance pieces."""

from __future__ import annotations

import logging
import warnings

import numpy as np

log = logging.getLogger(__name__)


def newey_west_bandwidth(n_obs: int) -> int:
    """Automatic Bartlett truncation lag floor(4*(T/100)^(2/9))."""
    if n_obs < 1:
        raise ValueError("need at least one observation")
    return int(np.floor(4.0 * (n_obs / 100.0) ** (2.0 / 9.0)))


def bartlett_long_run(G, bandwidth: int | None = None) -> np.ndarray:
    """Bartlett-weighted long-run covariance of a (T, k) moment series.

    Bandwidth 0 keeps only the contemporaneous term. A non-positive-definite
    result (possible after weighting) is repaired by flooring eigenvalues at
    zero, with a warning.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    if G.ndim != 2:
        raise ValueError("moment series must be 1- or 2-dimensional")
    T = G.shape[0]
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(T)
    if bandwidth < 0:
        raise ValueError("bandwidth must be nonnegative")
    S = G.T @ G / T
    for lag in range(1, min(bandwidth, T - 1) + 1):
        w = 1.0 - lag / (bandwidth + 1.0)
        gamma = G[lag:].T @ G[:-lag] / T
        S += w * (gamma + gamma.T)
    S = 0.5 * (S + S.T)
    evals = np.linalg.eigvalsh(S)
    if evals.min(initial=0.0) < -1e-12 * max(1.0, abs(evals).max()):
        warnings.warn("long-run covariance not PSD; flooring eigenvalues at zero")
        w_e, Q = np.linalg.eigh(S)
        S = (Q * np.maximum(w_e, 0.0)) @ Q.T
    return S


def hac_covariance(X, resid, bandwidth: int | None = None) -> np.ndarray:
    """HAC sandwich covariance of OLS coefficients from (X, residuals)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    u = np.asarray(resid, dtype=float)
    T = X.shape[0]
    if u.shape[0] != T:
        raise ValueError("X and residuals disagree on the number of rows")
    S = bartlett_long_run(X * u[:, None], bandwidth)
    XtX_inv = np.linalg.pinv(X.T @ X)
    return XtX_inv @ (T * S) @ XtX_inv


def long_run_variance(d, bandwidth: int | None = None) -> float:
    """Scalar Bartlett long-run variance of a demeaned series."""
    d = np.asarray(d, dtype=float)
    dc = d - d.mean()
    return float(bartlett_long_run(dc[:, None], bandwidth)[0, 0])
