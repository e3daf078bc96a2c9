"""Shared model errors and conventions.

Every fit in the zoo centers the target (and, for penalized fits, the
columns) so the intercept is never penalized; predictions add it back.
"""

from __future__ import annotations

import numpy as np


class FitError(RuntimeError):
    pass


class ConvergenceError(FitError):
    def __init__(self, message, last_iterate=None, gap=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.gap = gap


def center_xy(Z, y):
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    if Z.ndim != 2 or y.ndim != 1 or Z.shape[0] != y.shape[0]:
        raise ValueError("Z must be 2-D and y 1-D with matching rows")
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise ValueError("masked/non-finite entries in the estimation sample")
    zbar = Z.mean(axis=0)
    ybar = y.mean()
    return Z - zbar, y - ybar, zbar, ybar
