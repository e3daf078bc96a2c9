"""Model confidence set by iterative elimination with a moving-block
bootstrap null."""

from __future__ import annotations

import numpy as np
import pandas as pd

from .dm import TestResult


def _block_bootstrap_indices(T, reps, block, rng):
    n_blocks = int(np.ceil(T / block))
    starts = rng.integers(0, T - block + 1, size=(reps, n_blocks))
    offsets = np.arange(block)
    idx = (starts[:, :, None] + offsets[None, None, :]).reshape(reps, -1)
    return idx[:, :T]


def model_confidence_set(
    losses,
    alpha: float = 0.25,
    reps: int = 999,
    block_length: int = 12,
    seed: int = 0,
) -> TestResult:
    """Surviving set of models whose losses are statistically indistinguishable.

    ``losses`` is a (T, M) table (DataFrame columns name the models). Each
    round computes per-model t-statistics of the average loss differential
    against the rest, bootstraps the max statistic under the null by
    moving-block resampling, and eliminates the worst model while the null
    rejects at level ``alpha``. Elimination p-values are monotonized so the
    survivor sets nest across levels.
    """
    if isinstance(losses, pd.DataFrame):
        names = list(losses.columns)
        L = losses.to_numpy(dtype=float)
    else:
        L = np.atleast_2d(np.asarray(losses, dtype=float))
        names = [f"m{j}" for j in range(L.shape[1])]
    ok = np.all(np.isfinite(L), axis=1)
    L = L[ok]
    T, M = L.shape
    if M < 1:
        raise ValueError("need at least one model")
    if M == 1:
        return TestResult(0.0, 1.0, {
            "survivors": names, "eliminated": [], "p_values": {names[0]: 1.0},
            "reps": reps, "block_length": block_length,
        })
    if T < 2 * block_length:
        raise ValueError(f"{T} common dates is too short for block length {block_length}")

    rng = np.random.Generator(np.random.PCG64(seed))
    boot_idx = _block_bootstrap_indices(T, reps, block_length, rng)

    active = list(range(M))
    eliminated: list = []
    p_values: dict = {}
    p_floor = 0.0
    last_stat, last_p = 0.0, 1.0

    while True:
        m = len(active)
        if m == 1:
            p_values[names[active[0]]] = 1.0
            break
        La = L[:, active]
        # average differential of each model against the others
        col_mean = La.mean(axis=0)
        dbar = (col_mean - col_mean.mean()) * m / (m - 1.0)
        boot_mean = La[boot_idx].mean(axis=1)  # (reps, m)
        dbar_b = (boot_mean - boot_mean.mean(axis=1, keepdims=True)) * m / (m - 1.0)
        dev = dbar_b - dbar[None, :]
        var = np.mean(dev**2, axis=0)
        # snap floating-point dust to exact zero so identical loss columns
        # take the degenerate all-survive path
        scale = max(1.0, float(np.abs(La).max()))
        dbar = np.where(np.abs(dbar) <= 1e-10 * scale, 0.0, dbar)
        var = np.where(var <= (1e-10 * scale) ** 2, 0.0, var)

        with np.errstate(divide="ignore", invalid="ignore"):
            t_i = np.where(var > 0, dbar / np.sqrt(var), 0.0)
        zero_var = var <= 0
        t_i[zero_var & (dbar > 0)] = np.inf
        t_i[zero_var & (dbar < 0)] = -np.inf
        if np.all(zero_var) and np.all(dbar == 0):
            for j in active:
                p_values[names[j]] = 1.0
            last_stat, last_p = 0.0, 1.0
            break

        t_max = float(t_i.max())
        with np.errstate(divide="ignore", invalid="ignore"):
            t_b = np.where(var[None, :] > 0, dev / np.sqrt(var[None, :]), 0.0)
        t_max_b = t_b.max(axis=1)
        p_raw = float(np.mean(t_max_b >= t_max)) if np.isfinite(t_max) else 0.0
        p = max(p_raw, p_floor)
        p_floor = p
        last_stat, last_p = t_max, p
        if p >= alpha:
            for j in active:
                p_values[names[j]] = p
            break
        worst = active[int(np.argmax(t_i))]
        p_values[names[worst]] = p
        eliminated.append(names[worst])
        active.remove(worst)

    survivors = [names[j] for j in active]
    return TestResult(last_stat, last_p, {
        "survivors": survivors,
        "eliminated": eliminated,
        "p_values": p_values,
        "reps": reps,
        "block_length": block_length,
        "n_obs": T,
    })
