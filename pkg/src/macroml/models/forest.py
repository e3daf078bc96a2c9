"""Random forest regression built on the backend tree kernels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _backend
from .base import FitError

_MASK64 = (1 << 64) - 1


def _tree_seed(master: int, tree_idx: int) -> int:
    # per-tree streams derived deterministically from the master seed
    return (int(master) * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019 * (tree_idx + 1)) & _MASK64


@dataclass(frozen=True)
class ForestModel:
    trees: tuple
    seed: int
    n_features: int
    oob_mse: float = field(default=float("nan"))

    def predict(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        acc = np.zeros(Z.shape[0])
        for t in self.trees:
            acc += _backend.predict_tree(*t, Z)
        return acc / len(self.trees)


def fit_random_forest(
    Z,
    y,
    n_trees: int = 500,
    mtry_frac: float = 1.0 / 3.0,
    min_leaf: int = 5,
    seed: int = 0,
    max_depth: int = -1,
) -> ForestModel:
    """Bagged variance-reduction trees; full-size bootstrap resamples with
    replacement, ceil(mtry_frac * cols) candidate columns per split, and an
    out-of-bag MSE estimate. Fixing the seed fixes every forecast."""
    if n_trees < 1:
        raise ValueError("need at least one tree")
    if not 0.0 < mtry_frac <= 1.0:
        raise ValueError("mtry_frac must lie in (0, 1]")
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise ValueError("masked/non-finite entries in the estimation sample")
    n, p = Z.shape
    if n < 2 * min_leaf:
        raise FitError(f"{n} rows is fewer than 2*min_leaf={2 * min_leaf}")
    mtry = int(np.ceil(mtry_frac * p))

    rng = np.random.Generator(np.random.PCG64(seed))
    trees = []
    oob_sum = np.zeros(n)
    oob_cnt = np.zeros(n, dtype=np.int64)
    for b in range(n_trees):
        idx = rng.integers(0, n, size=n)
        tree = _backend.grow_tree(Z, y, idx, mtry, min_leaf, max_depth, _tree_seed(seed, b))
        trees.append(tree)
        oob = np.setdiff1d(np.arange(n), idx, assume_unique=False)
        if oob.size:
            oob_sum[oob] += _backend.predict_tree(*tree, Z[oob])
            oob_cnt[oob] += 1
    covered = oob_cnt > 0
    oob_mse = float(np.mean((oob_sum[covered] / oob_cnt[covered] - y[covered]) ** 2)) \
        if covered.any() else float("nan")
    return ForestModel(trees=tuple(trees), seed=int(seed), n_features=p, oob_mse=oob_mse)
