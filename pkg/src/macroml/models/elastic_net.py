"""Elastic net by coordinate descent.

Objective: sum_t (y_t - Z_t b)^2 + lam * sum_k (alpha*|b_k| + (1-alpha)*b_k^2),
so alpha=1 is the lasso and alpha=0 reproduces ridge with the same lam.
Common libraries scale the fit term by 1/(2n) and split the penalty weights
differently; e.g. against scikit-learn, lam = 2*n*alpha_skl at alpha=1 and
lam = n*alpha_skl at alpha=0.
"""

from __future__ import annotations

import numpy as np

from .. import _backend
from .base import ConvergenceError, center_xy
from .linear import LinearModel


def fit_elastic_net(
    Z,
    y,
    lam: float,
    alpha: float,
    max_sweeps: int = 2000,
    tol: float = 1e-10,
) -> LinearModel:
    if lam < 0:
        raise ValueError("penalty must be nonnegative")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    Zc, yc, zbar, ybar = center_xy(Z, y)
    beta, sweeps, converged, delta = _backend.enet_cd(
        Zc, yc, lam, alpha, max_sweeps=max_sweeps, tol=tol
    )
    if not converged:
        gap = _subgradient_gap(Zc, yc, beta, lam, alpha)
        raise ConvergenceError(
            f"coordinate descent did not converge in {sweeps} sweeps "
            f"(last max coordinate change {delta:.3e}, stationarity gap {gap:.3e})",
            last_iterate=beta,
            gap=gap,
        )
    return LinearModel(coef=beta, intercept=ybar - zbar @ beta)


def _subgradient_gap(Zc, yc, beta, lam, alpha) -> float:
    """Max violation of the stationarity conditions, for diagnostics."""
    grad = -2.0 * Zc.T @ (yc - Zc @ beta) + 2.0 * lam * (1 - alpha) * beta
    thr = lam * alpha
    active = beta != 0
    viol = np.abs(grad + thr * np.sign(beta)) * active
    viol_zero = np.maximum(np.abs(grad) - thr, 0.0) * (~active)
    return float(np.max(viol + viol_zero, initial=0.0))
