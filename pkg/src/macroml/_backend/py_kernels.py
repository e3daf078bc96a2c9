"""Pure-Python (numpy) implementations of the hot numerical kernels.

These mirror the compiled Cython kernels in ``_ckernels.pyx`` and are used
whenever the extension is unavailable or ``MACROML_BACKEND=python`` is set.
Algorithms and RNG streams are kept identical so both backends are
interchangeable.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    # SplitMix64: same stream as the C kernel, emulated with masked ints.
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


# ---------------------------------------------------------------------------
# Elastic net coordinate descent
# ---------------------------------------------------------------------------

def enet_cd(Z, y, lam, alpha, max_sweeps=1000, tol=1e-8, beta0=None):
    """Coordinate descent for sum((y-Zb)^2) + lam*sum(alpha*|b| + (1-alpha)*b^2).

    Returns (beta, n_sweeps, converged, last_max_delta).
    """
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, p = Z.shape
    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=np.float64)
    col_ss = np.einsum("ij,ij->j", Z, Z)
    resid = y - Z @ beta
    thr = 0.5 * lam * alpha
    denom = col_ss + lam * (1.0 - alpha)
    sweeps = 0
    max_delta = np.inf
    for sweeps in range(1, max_sweeps + 1):
        max_delta = 0.0
        for k in range(p):
            if denom[k] <= 0.0:
                continue
            bk = beta[k]
            rho = Z[:, k] @ resid + col_ss[k] * bk
            bnew = np.sign(rho) * max(abs(rho) - thr, 0.0) / denom[k]
            if bnew != bk:
                resid += Z[:, k] * (bk - bnew)
                beta[k] = bnew
                max_delta = max(max_delta, abs(bnew - bk))
        scale = max(1.0, float(np.max(np.abs(beta))) if p else 1.0)
        if max_delta <= tol * scale:
            return beta, sweeps, True, max_delta
    return beta, sweeps, False, max_delta


# ---------------------------------------------------------------------------
# epsilon-SVR dual solver (SMO with maximal-violating-pair selection)
# ---------------------------------------------------------------------------

def svr_smo(K, y, C, eps, tol=1e-6, max_iter=0):
    """Solve the box-constrained SVR dual on a precomputed kernel Gram matrix.

    min_beta 0.5*b'Kb - y'b + eps*sum|b|  s.t.  sum(b)=0, -C <= b_i <= C,
    via the expanded (a, a*) pair formulation. Returns
    (beta, intercept, n_iter, kkt_violation).
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    T = y.shape[0]
    if max_iter <= 0:
        max_iter = max(200000, 2000 * T)
    a = np.zeros(T)
    astar = np.zeros(T)
    u = np.zeros(T)  # K @ beta
    diag = np.diag(K).copy()
    it = 0
    viol = np.inf
    for it in range(1, max_iter + 1):
        F = y - u
        up_a = F - eps
        up_s = F + eps
        # I_up: a_t < C can move up; astar_t > 0 can move up
        cand_up_a = np.where(a < C, up_a, -np.inf)
        cand_up_s = np.where(astar > 0, up_s, -np.inf)
        # I_low: a_t > 0; astar_t < C
        cand_lo_a = np.where(a > 0, up_a, np.inf)
        cand_lo_s = np.where(astar < C, up_s, np.inf)
        ia, isa = int(np.argmax(cand_up_a)), int(np.argmax(cand_up_s))
        ja, jsa = int(np.argmin(cand_lo_a)), int(np.argmin(cand_lo_s))
        if cand_up_a[ia] >= cand_up_s[isa]:
            i, i_star, m = ia, False, cand_up_a[ia]
        else:
            i, i_star, m = isa, True, cand_up_s[isa]
        if cand_lo_a[ja] <= cand_lo_s[jsa]:
            j, j_star, M = ja, False, cand_lo_a[ja]
        else:
            j, j_star, M = jsa, True, cand_lo_s[jsa]
        viol = m - M
        if viol < tol:
            return a - astar, 0.5 * (m + M), it, viol
        eta = diag[i] + diag[j] - 2.0 * K[i, j]
        if eta <= 1e-12:
            eta = 1e-12
        t = viol / eta
        # box caps for the step along the (i up, j down) direction
        t = min(t, (a[j] if not j_star else C - astar[j]))
        t = min(t, (C - a[i] if not i_star else astar[i]))
        if t <= 0.0:
            # numerically stuck; treat as converged at current violation
            return a - astar, 0.5 * (m + M), it, viol
        if i_star:
            astar[i] -= t
        else:
            a[i] += t
        if j_star:
            astar[j] += t
        else:
            a[j] -= t
        u += t * (K[:, i] - K[:, j])
    return a - astar, 0.0, it, viol


# ---------------------------------------------------------------------------
# Regression tree (greedy variance-reduction splits)
# ---------------------------------------------------------------------------

def grow_tree(X, y, sample_idx, mtry, min_leaf, max_depth, seed):
    """Fit one regression tree on X[sample_idx], y[sample_idx].

    Returns (feature, threshold, left, right, value) arrays; feature == -1
    marks a leaf. Candidate features per node are drawn without replacement
    with a SplitMix64 stream seeded by ``seed``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    p = X.shape[1]
    mtry = min(max(1, int(mtry)), p)

    feature, threshold, left, right, value = [], [], [], [], []
    state = int(seed) & _MASK64
    feat_pool = np.arange(p)

    # stack of (row-index array, depth); node ids assigned in DFS order
    stack = [(np.asarray(sample_idx, dtype=np.intp), 0, -1, False)]
    while stack:
        rows, depth, parent, is_right = stack.pop()
        node = len(feature)
        if parent >= 0:
            if is_right:
                right[parent] = node
            else:
                left[parent] = node
        yv = y[rows]
        n = rows.shape[0]
        node_val = float(yv.mean())
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(node_val)
        if n < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue
        if np.all(yv == yv[0]):
            continue
        # draw mtry distinct candidate features (partial Fisher-Yates)
        for d in range(mtry):
            state, r = _splitmix64(state)
            swap = d + int(r % (p - d))
            feat_pool[d], feat_pool[swap] = feat_pool[swap], feat_pool[d]
        best_gain = 0.0
        best_feat = -1
        best_thr = 0.0
        best_mask = None
        total = yv.sum()
        base = (total * total) / n
        for d in range(mtry):
            f = int(feat_pool[d])
            xv = X[rows, f]
            order = np.argsort(xv, kind="stable")
            xs = xv[order]
            ys = yv[order]
            csum = np.cumsum(ys)
            nl = np.arange(1, n)
            gains = csum[:-1] ** 2 / nl + (total - csum[:-1]) ** 2 / (n - nl) - base
            ok = (xs[1:] != xs[:-1]) & (nl >= min_leaf) & (n - nl >= min_leaf)
            if not ok.any():
                continue
            gi = np.flatnonzero(ok)
            gbest = gi[np.argmax(gains[gi])]
            if gains[gbest] > best_gain + 1e-12 * max(1.0, abs(best_gain)):
                best_gain = float(gains[gbest])
                best_feat = f
                best_thr = 0.5 * (xs[gbest] + xs[gbest + 1])
                best_mask = xv <= best_thr
        if best_feat < 0:
            continue
        feature[node] = best_feat
        threshold[node] = float(best_thr)
        lrows = rows[best_mask]
        rrows = rows[~best_mask]
        # push right first so the left child is processed (and numbered) first
        stack.append((rrows, depth + 1, node, True))
        stack.append((lrows, depth + 1, node, False))
    return (
        np.asarray(feature, dtype=np.int32),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int32),
        np.asarray(right, dtype=np.int32),
        np.asarray(value, dtype=np.float64),
    )


def predict_tree(feature, threshold, left, right, value, X):
    """Vectorized routing of the rows of X down one fitted tree."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = feature[node] >= 0
    while active.any():
        idx = np.flatnonzero(active)
        nd = node[idx]
        go_left = X[idx, feature[nd]] <= threshold[nd]
        node[idx] = np.where(go_left, left[nd], right[nd])
        active[idx] = feature[node[idx]] >= 0
    return value[node]
