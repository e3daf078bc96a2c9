"""Hyperparameter grids: discrete lag/factor sets and continuous ladders.

Lag orders, factor counts and fold counts are fixed sets; the continuous
penalties are 10-point log ladders. Ladders whose natural scale depends on
the sample (elastic-net lambda, RBF bandwidth, SVR tube width) are stored as
relative multipliers and resolved against the training window at tune time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields

import numpy as np

from ..data.predictors import Rotation
from ..models.specs import ModelSpec

P_Y_SET = (1, 3, 6, 12)
P_F_SET = (1, 3, 6, 12)
K_SET = (3, 6, 10)


def _ladder(lo_exp: float, hi_exp: float, n: int = 10) -> tuple:
    return tuple(float(v) for v in np.logspace(lo_exp, hi_exp, n))


@dataclass(frozen=True)
class Grid:
    """Axes of one model's hyperparameter search.

    ``lam`` is an absolute ridge/KRR penalty ladder; ``lam_frac`` scales the
    elastic-net penalty relative to the smallest lambda that zeroes every
    coefficient; ``sigma_mult`` scales the RBF bandwidth by sqrt(n_cols);
    ``eps_mult`` scales the insensitivity tube by the target's standard
    deviation.
    """

    p_y: tuple = P_Y_SET
    p_f: tuple | None = None
    K: tuple | None = None
    lam: tuple | None = None
    alpha: tuple | None = None
    lam_frac: tuple | None = None
    sigma_mult: tuple | None = None
    C: tuple | None = None
    eps_mult: tuple | None = None

    def __post_init__(self):
        for f in fields(self):
            ax = getattr(self, f.name)
            if ax is not None and len(ax) == 0:
                raise ValueError(f"empty grid axis {f.name!r}")

    def axes(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}

    def points(self, spec: ModelSpec, n_x: int = 0) -> list:
        """All grid points as dicts, smallest model first.

        Order: ascending column count, then ladder indices (lambda first).
        The tuners keep the first minimum, so this order is the tie-break.
        """
        axes = self.axes()
        names = list(axes)
        out = []
        for combo in itertools.product(*(range(len(axes[n])) for n in names)):
            point = {n: axes[n][i] for n, i in zip(names, combo)}
            idx = dict(zip(names, combo))
            key = (
                _n_columns(spec, point, n_x),
                idx.get("lam", idx.get("lam_frac", 0)),
                idx.get("sigma_mult", 0),
                idx.get("C", 0),
                idx.get("eps_mult", 0),
                idx.get("alpha", 0),
                idx.get("p_y", 0),
                idx.get("p_f", 0),
                idx.get("K", 0),
            )
            out.append((key, point))
        out.sort(key=lambda kp: kp[0])
        return [p for _, p in out]


def _n_columns(spec: ModelSpec, point: dict, n_x: int) -> int:
    cols = int(point.get("p_y", 1)) + 1
    p_f = int(point.get("p_f", 0))
    if spec.rotation is Rotation.NONE:
        if spec.data_rich:
            cols += int(point.get("K", 0)) * (p_f + 1)
    else:
        # B1/B2 append the lagged panel (or its PCs, same width); B3 spans
        # the same block with its own PCs
        cols += n_x * (p_f + 1)
    return cols


def default_grid(spec: ModelSpec) -> Grid:
    """The search grid implied by a model's estimator and predictor set."""
    kw: dict = {"p_y": P_Y_SET}
    if spec.rotation is not Rotation.NONE:
        kw["p_f"] = P_F_SET
    elif spec.data_rich:
        kw["p_f"] = P_F_SET
        kw["K"] = K_SET

    if spec.estimator == "ridge":
        kw["lam"] = _ladder(-2, 6)
    elif spec.estimator == "enet":
        if spec.en_alpha == 0.0:
            kw["lam"] = _ladder(-2, 6)
        else:
            kw["lam_frac"] = _ladder(-5, -0.25)
            if spec.en_alpha == "cv":
                kw["alpha"] = (0.1, 0.3, 0.5, 0.7, 0.9)
    elif spec.estimator == "krr":
        kw["lam"] = _ladder(-4, 3)
        if (spec.kernel or "rbf") == "rbf":
            kw["sigma_mult"] = _ladder(-0.7, 1.0)
    elif spec.estimator == "svr":
        kw["C"] = _ladder(-2, 3)
        kw["eps_mult"] = _ladder(-2, 0)
        if (spec.kernel or "rbf") == "rbf":
            kw["sigma_mult"] = _ladder(-0.7, 1.0)
    elif spec.estimator not in ("ols", "rf"):
        raise ValueError(f"no default grid for estimator {spec.estimator!r}")

    kw.update(spec.grid_overrides)
    return Grid(**{k: tuple(v) if v is not None else None for k, v in kw.items()})


def resolve_point(spec: ModelSpec, point: dict, Z_train, y_train) -> dict:
    """Turn relative ladder entries into concrete hyperparameter values."""
    hp = {k: v for k, v in point.items()
          if k not in ("lam_frac", "sigma_mult", "eps_mult")}
    Z_train = np.atleast_2d(np.asarray(Z_train, dtype=float))
    y = np.asarray(y_train, dtype=float)
    if "lam_frac" in point:
        alpha = float(point.get("alpha", spec.en_alpha if spec.en_alpha != "cv" else 1.0))
        yc = y - y.mean()
        lam_max = 2.0 * float(np.abs(Z_train.T @ yc).max()) / max(alpha, 1e-12)
        hp["lam"] = float(point["lam_frac"]) * max(lam_max, 1e-12)
    if "sigma_mult" in point:
        hp["sigma"] = float(point["sigma_mult"]) * float(np.sqrt(Z_train.shape[1]))
    if "eps_mult" in point:
        hp["eps"] = float(point["eps_mult"]) * max(float(y.std()), 1e-12)
    return hp
