"""Principal-component factor extraction for the diffusion-index models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FactorSet:
    """Static factors F (T x K), loadings (N x K) and PC eigenvalues.

    Sign convention: in each loading column the entry of largest magnitude
    is positive, so repeated runs are reproducible. Factor columns are
    mutually orthogonal; X is reconstructed as F @ loadings.T.
    """

    factors: np.ndarray
    loadings: np.ndarray
    eigenvalues: np.ndarray
    K: int


def extract_factors(X, K: int) -> FactorSet:
    """First K principal components of a column-standardized T x N matrix.

    Factors are PC scores (U*S), loadings the right singular vectors; with
    K = min(T, N), loadings @ factors.T reproduces X.
    """
    X = np.ascontiguousarray(X, dtype=float)
    T, N = X.shape
    if K > min(T, N):
        raise ValueError(f"K={K} exceeds min(T, N)={min(T, N)}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite entries; drop or trim missing rows first")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    V = Vt.T
    # fix signs: largest-|loading| entry positive per component
    flip = np.sign(V[np.argmax(np.abs(V), axis=0), np.arange(V.shape[1])])
    flip[flip == 0] = 1.0
    U = U * flip
    V = V * flip
    factors = U[:, :K] * s[:K]
    loadings = V[:, :K]
    return FactorSet(factors=factors, loadings=loadings, eigenvalues=s[:K] ** 2, K=K)
