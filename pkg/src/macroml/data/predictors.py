"""Design-matrix assembly: lag blocks, rotations B1/B2/B3, standardization."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .factors import extract_factors


class Rotation(Enum):
    NONE = "none"
    B1 = "B1"  # all raw series, lagged
    B2 = "B2"  # all principal components of X, lagged
    B3 = "B3"  # all principal components of the lagged block itself


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        ok = np.all(np.isfinite(X), axis=1)
        mean = X[ok].mean(axis=0)
        scale = X[ok].std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean=mean, scale=scale)

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale


def lag_matrix(series, p: int, prefix: str = "y") -> tuple[np.ndarray, list]:
    """T x (p+1) matrix whose column j is the series lagged j periods."""
    x = np.asarray(series, dtype=float)
    T = x.shape[0]
    out = np.full((T, p + 1), np.nan)
    names = []
    for j in range(p + 1):
        out[j:, j] = x[: T - j] if j else x
        names.append(f"{prefix}_L{j}")
    return out, names


@dataclass(frozen=True)
class PredictorSet:
    """Aligned design matrix for one forecast origin.

    Z rows are dated 0..origin of the caller's index; no column uses
    information after the origin. ``standardization`` holds the training
    mean/scale actually applied to Z.
    """

    origin: int
    Z: np.ndarray
    columns: tuple
    rotation: Rotation
    p_y: int
    p_f: int
    standardization: Standardizer | None


def _pca_all(block: np.ndarray, prefix: str) -> tuple[np.ndarray, list]:
    """All principal components of the complete rows of a block; incomplete
    rows stay NaN."""
    ok = np.all(np.isfinite(block), axis=1)
    std = Standardizer.fit(block[ok])
    scores = np.full((block.shape[0], min(ok.sum(), block.shape[1])), np.nan)
    fs = extract_factors(std.transform(block[ok]), K=min(ok.sum(), block.shape[1]))
    scores[ok] = fs.factors
    names = [f"{prefix}_PC{j + 1}" for j in range(scores.shape[1])]
    return scores, names


def assemble_predictors(
    target_stationary,
    p_y: int,
    origin: int | None = None,
    rotation: Rotation = Rotation.NONE,
    factors=None,
    X=None,
    p_f: int = 0,
    standardize: bool = True,
) -> PredictorSet:
    """Build the predictor matrix for one origin.

    ``target_stationary`` (and X/factors, when given) must already be
    truncated to rows <= origin. NONE yields own lags plus optional factor
    lags; B1 appends lags of every raw series; B2 lags of all-N principal
    components of X; B3 replaces the whole lagged block by its own
    principal components.
    """
    y = np.asarray(target_stationary, dtype=float)
    T = y.shape[0]
    if origin is None:
        origin = T - 1
    if origin != T - 1:
        raise ValueError("inputs must be truncated at the origin row")
    if rotation in (Rotation.B1, Rotation.B2, Rotation.B3) and X is None:
        raise ValueError(f"rotation {rotation.value} requires the raw panel X")

    ylags, names = lag_matrix(y, p_y, prefix="y")
    blocks = [ylags]

    if rotation is Rotation.NONE and factors is not None:
        F = np.asarray(factors.factors if hasattr(factors, "factors") else factors, float)
        for k in range(F.shape[1]):
            fl, fn = lag_matrix(F[:, k], p_f, prefix=f"F{k + 1}")
            blocks.append(fl)
            names.extend(fn)
    elif rotation is Rotation.B1:
        Xm = np.asarray(X, dtype=float)
        for j in range(Xm.shape[1]):
            xl, xn = lag_matrix(Xm[:, j], p_f, prefix=f"x{j + 1}")
            blocks.append(xl)
            names.extend(xn)
    elif rotation is Rotation.B2:
        scores, _ = _pca_all(np.asarray(X, dtype=float), "X")
        for k in range(scores.shape[1]):
            fl, fn = lag_matrix(scores[:, k], p_f, prefix=f"PC{k + 1}")
            blocks.append(fl)
            names.extend(fn)
    elif rotation is Rotation.B3:
        Xm = np.asarray(X, dtype=float)
        for j in range(Xm.shape[1]):
            xl, xn = lag_matrix(Xm[:, j], p_f, prefix=f"x{j + 1}")
            blocks.append(xl)
            names.extend(xn)
        H = np.column_stack(blocks)
        scores, names = _pca_all(H, "H")
        blocks = [scores]

    Z = np.column_stack(blocks)
    std = None
    if standardize:
        ok = np.all(np.isfinite(Z), axis=1)
        if ok.any():
            std = Standardizer.fit(Z[ok])
            Z = np.where(np.isfinite(Z), std.transform(Z), np.nan)
    return PredictorSet(
        origin=origin,
        Z=Z,
        columns=tuple(names),
        rotation=rotation,
        p_y=p_y,
        p_f=p_f,
        standardization=std,
    )
