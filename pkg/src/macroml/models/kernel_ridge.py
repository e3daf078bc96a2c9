"""Kernel ridge regression with RBF or linear kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .base import FitError


def rbf_kernel(A, B, sigma: float) -> np.ndarray:
    """exp(-||a - b||^2 / (2 sigma^2)) for all row pairs."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * sigma * sigma))


def linear_kernel(A, B) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    return A @ B.T


@dataclass(frozen=True)
class KRRModel:
    dual_coef: np.ndarray
    Z_train: np.ndarray
    kernel: str
    sigma: float
    y_mean: float
    lam: float

    def predict(self, Z_new) -> np.ndarray:
        K = _gram(Z_new, self.Z_train, self.kernel, self.sigma)
        return K @ self.dual_coef + self.y_mean


def _gram(A, B, kernel: str, sigma: float) -> np.ndarray:
    if kernel == "rbf":
        K = rbf_kernel(A, B, sigma)
    elif kernel == "linear":
        K = linear_kernel(A, B)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    if not np.all(np.isfinite(K)):
        raise FitError("non-finite kernel entries")
    return K


def fit_krr(Z, y, lam: float, sigma: float = 1.0, kernel: str = "rbf") -> KRRModel:
    """Dual solve (K + lam*I)^-1 (y - ybar); the centered target supplies the
    intercept, which is restored at prediction."""
    if lam <= 0:
        raise ValueError("lam must be positive (the Gram matrix may be singular)")
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise ValueError("masked/non-finite entries in the estimation sample")
    K = _gram(Z, Z, kernel, sigma)
    ybar = float(y.mean())
    alpha = scipy.linalg.solve(
        K + lam * np.eye(K.shape[0]), y - ybar, assume_a="pos"
    )
    return KRRModel(
        dual_coef=alpha, Z_train=Z.copy(), kernel=kernel, sigma=sigma,
        y_mean=ybar, lam=lam,
    )


def krr_path_predictions(Z_train, y_train, Z_eval, lambdas, sigma: float, kernel: str = "rbf"):
    """Predictions of KRR at every lam in ``lambdas`` from one eigendecomposition.

    Used by the tuners: the Gram matrix is decomposed once per (sigma, sample)
    and the whole lam ladder is swept cheaply. Returns an array of shape
    (len(lambdas), rows(Z_eval)).
    """
    Z_train = np.atleast_2d(np.asarray(Z_train, dtype=float))
    y = np.asarray(y_train, dtype=float)
    K = _gram(Z_train, Z_train, kernel, sigma)
    Ke = _gram(Z_eval, Z_train, kernel, sigma)
    w, Q = scipy.linalg.eigh(K)
    ybar = float(y.mean())
    qy = Q.T @ (y - ybar)
    out = np.empty((len(lambdas), Ke.shape[0]))
    for i, lam in enumerate(lambdas):
        alpha = Q @ (qy / (w + lam))
        out[i] = Ke @ alpha + ybar
    return out
