"""OLS and ridge (primal / dual) estimators."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .base import FitError, center_xy


@dataclass(frozen=True)
class LinearModel:
    coef: np.ndarray
    intercept: float

    def predict(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        return Z @ self.coef + self.intercept


class RidgeMode(Enum):
    PRIMAL = "primal"
    DUAL = "dual"


def fit_ols(Z, y, intercept: bool = True) -> LinearModel:
    """Least squares via pivoted QR; rank deficiency is reported with the
    offending columns rather than silently dropped."""
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise ValueError("masked/non-finite entries in the estimation sample")
    if intercept:
        Zc, yc, zbar, ybar = center_xy(Z, y)
    else:
        Zc, yc, zbar, ybar = Z, y, np.zeros(Z.shape[1]), 0.0
    n, p = Zc.shape
    if n <= p:
        raise FitError(f"need more rows ({n}) than columns ({p}) for OLS")
    if p:
        _, R, piv = scipy.linalg.qr(Zc, mode="economic", pivoting=True)
        d = np.abs(np.diag(R))
        tol = max(n, p) * np.finfo(float).eps * (d[0] if d.size else 0.0)
        rank = int(np.sum(d > tol))
        if rank < p:
            raise FitError(f"rank-deficient design; collinear columns {sorted(piv[rank:])}")
        coef = np.linalg.lstsq(Zc, yc, rcond=None)[0]
    else:
        coef = np.zeros(0)
    return LinearModel(coef=coef, intercept=ybar - zbar @ coef)


def fit_ridge(Z, y, lam: float, mode: RidgeMode = RidgeMode.PRIMAL) -> LinearModel:
    """Ridge with unpenalized intercept.

    PRIMAL solves (Z'Z + lam*I) b = Z'y; DUAL uses b = Z'(ZZ' + lam*I)^-1 y.
    The two agree on fitted values; lam=0 reduces to OLS on full-rank Z.
    """
    if lam < 0:
        raise ValueError("ridge penalty must be nonnegative")
    Zc, yc, zbar, ybar = center_xy(Z, y)
    n, p = Zc.shape
    if mode is RidgeMode.PRIMAL:
        A = Zc.T @ Zc + lam * np.eye(p)
        coef = np.linalg.solve(A, Zc.T @ yc) if lam > 0 else np.linalg.lstsq(Zc, yc, rcond=None)[0]
    elif mode is RidgeMode.DUAL:
        G = Zc @ Zc.T + lam * np.eye(n)
        coef = Zc.T @ np.linalg.solve(G, yc) if lam > 0 else np.linalg.lstsq(Zc, yc, rcond=None)[0]
    else:
        raise ValueError(f"unknown ridge mode {mode}")
    return LinearModel(coef=coef, intercept=ybar - zbar @ coef)
