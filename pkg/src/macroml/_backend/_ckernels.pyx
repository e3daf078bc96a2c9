# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot kernels: elastic-net coordinate descent,
the SVR dual SMO loop and regression-tree growth. Mirrors py_kernels.py
(same algorithms, same SplitMix64 stream) so the two backends agree."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

ctypedef unsigned long long u64

cdef inline u64 _mix(u64* state) nogil:
    cdef u64 z
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


# ---------------------------------------------------------------------------
# Elastic net coordinate descent
# ---------------------------------------------------------------------------

def enet_cd(Z, y, double lam, double alpha, int max_sweeps=1000,
            double tol=1e-8, beta0=None):
    cdef cnp.ndarray[double, ndim=2, mode="fortran"] Zf = \
        np.asfortranarray(Z, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = Zf.shape[0], p = Zf.shape[1]
    cdef cnp.ndarray[double, ndim=1] beta
    if beta0 is None:
        beta = np.zeros(p)
    else:
        beta = np.array(beta0, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] col_ss = np.einsum("ij,ij->j", Zf, Zf)
    cdef cnp.ndarray[double, ndim=1] resid = yv - np.asarray(Zf) @ np.asarray(beta)
    cdef double thr = 0.5 * lam * alpha
    cdef cnp.ndarray[double, ndim=1] denom = col_ss + lam * (1.0 - alpha)
    cdef double max_delta = INFINITY, bk, rho, bnew, scale, diff
    cdef Py_ssize_t sweep = 0, k, i
    cdef bint converged = False
    with nogil:
        for sweep in range(1, max_sweeps + 1):
            max_delta = 0.0
            for k in range(p):
                if denom[k] <= 0.0:
                    continue
                bk = beta[k]
                rho = col_ss[k] * bk
                for i in range(n):
                    rho += Zf[i, k] * resid[i]
                if rho > thr:
                    bnew = (rho - thr) / denom[k]
                elif rho < -thr:
                    bnew = (rho + thr) / denom[k]
                else:
                    bnew = 0.0
                if bnew != bk:
                    diff = bk - bnew
                    for i in range(n):
                        resid[i] += Zf[i, k] * diff
                    beta[k] = bnew
                    if fabs(diff) > max_delta:
                        max_delta = fabs(diff)
            scale = 1.0
            for k in range(p):
                if fabs(beta[k]) > scale:
                    scale = fabs(beta[k])
            if max_delta <= tol * scale:
                converged = True
                break
    return np.asarray(beta), sweep, converged, max_delta


# ---------------------------------------------------------------------------
# epsilon-SVR dual solver (SMO, maximal violating pair)
# ---------------------------------------------------------------------------

def svr_smo(K, y, double C, double eps, double tol=1e-6, long max_iter=0):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Km = \
        np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t T = yv.shape[0]
    if max_iter <= 0:
        max_iter = max(200000, 2000 * T)
    cdef cnp.ndarray[double, ndim=1] a = np.zeros(T)
    cdef cnp.ndarray[double, ndim=1] astar = np.zeros(T)
    cdef cnp.ndarray[double, ndim=1] u = np.zeros(T)
    cdef double m, M, viol = INFINITY, F, va, vs, eta, t, cap, b
    cdef Py_ssize_t i = 0, j = 0, k
    cdef bint i_star = False, j_star = False
    cdef long it = 0
    cdef bint done = False
    with nogil:
        for it in range(1, max_iter + 1):
            m = -INFINITY
            M = INFINITY
            for k in range(T):
                F = yv[k] - u[k]
                va = F - eps
                vs = F + eps
                if a[k] < C and va > m:
                    m = va; i = k; i_star = False
                if astar[k] > 0.0 and vs > m:
                    m = vs; i = k; i_star = True
                if a[k] > 0.0 and va < M:
                    M = va; j = k; j_star = False
                if astar[k] < C and vs < M:
                    M = vs; j = k; j_star = True
            viol = m - M
            if viol < tol:
                done = True
                break
            eta = Km[i, i] + Km[j, j] - 2.0 * Km[i, j]
            if eta <= 1e-12:
                eta = 1e-12
            t = viol / eta
            cap = a[j] if not j_star else C - astar[j]
            if cap < t:
                t = cap
            cap = C - a[i] if not i_star else astar[i]
            if cap < t:
                t = cap
            if t <= 0.0:
                done = True
                break
            if i_star:
                astar[i] -= t
            else:
                a[i] += t
            if j_star:
                astar[j] += t
            else:
                a[j] -= t
            for k in range(T):
                u[k] += t * (Km[k, i] - Km[k, j])
    b = 0.5 * (m + M) if done else 0.0
    return np.asarray(a) - np.asarray(astar), b, it, viol


# ---------------------------------------------------------------------------
# Regression tree
# ---------------------------------------------------------------------------

def grow_tree(X, y, sample_idx, long mtry, long min_leaf, long max_depth,
              unsigned long long seed):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Xc = \
        np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t p = Xc.shape[1]
    if mtry < 1:
        mtry = 1
    if mtry > p:
        mtry = p

    feature, threshold, left, right, value = [], [], [], [], []
    cdef u64 state = seed
    cdef cnp.ndarray[long, ndim=1] feat_pool = np.arange(p)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] rows, order, lrows, rrows
    cdef cnp.ndarray[double, ndim=1] xv, xs, ys
    cdef Py_ssize_t n, d, f, q, gbest, node, swap, nl, nr, ii
    cdef double total, base, csum, gain, best_gain, best_thr, tmp, node_val
    cdef long best_feat

    stack = [(np.asarray(sample_idx, dtype=np.intp), 0, -1, False)]
    while stack:
        rows, depth, parent, is_right = stack.pop()
        node = len(feature)
        if parent >= 0:
            if is_right:
                right[parent] = node
            else:
                left[parent] = node
        n = rows.shape[0]
        ysub = yv[rows]
        node_val = float(ysub.mean())
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(node_val)
        if n < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue
        if np.all(ysub == ysub[0]):
            continue
        for d in range(mtry):
            swap = d + <Py_ssize_t>(_mix(&state) % <u64>(p - d))
            feat_pool[d], feat_pool[swap] = feat_pool[swap], feat_pool[d]
        best_gain = 0.0
        best_feat = -1
        best_thr = 0.0
        total = ysub.sum()
        base = (total * total) / n
        for d in range(mtry):
            f = feat_pool[d]
            xv = Xc[:, f][rows].copy()
            order = np.argsort(xv, kind="stable")
            xs = xv[order]
            ys = np.asarray(ysub)[order]
            csum = 0.0
            for q in range(n - 1):
                csum += ys[q]
                nl = q + 1
                nr = n - nl
                if xs[q + 1] == xs[q] or nl < min_leaf or nr < min_leaf:
                    continue
                gain = csum * csum / nl + (total - csum) * (total - csum) / nr - base
                tmp = 1.0 if best_gain < 1.0 and best_gain > -1.0 else fabs(best_gain)
                if gain > best_gain + 1e-12 * tmp:
                    best_gain = gain
                    best_feat = f
                    best_thr = 0.5 * (xs[q] + xs[q + 1])
        if best_feat < 0:
            continue
        feature[node] = best_feat
        threshold[node] = best_thr
        xv = Xc[:, best_feat][rows].copy()
        mask = np.asarray(xv) <= best_thr
        lrows = rows[mask]
        rrows = rows[~mask]
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
    cdef cnp.ndarray[cnp.int32_t, ndim=1] feat = np.ascontiguousarray(feature, dtype=np.int32)
    cdef cnp.ndarray[double, ndim=1] thr = np.ascontiguousarray(threshold, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] lc = np.ascontiguousarray(left, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] rc = np.ascontiguousarray(right, dtype=np.int32)
    cdef cnp.ndarray[double, ndim=1] val = np.ascontiguousarray(value, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Xc = \
        np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t nrow = Xc.shape[0], r
    cdef int nd
    cdef cnp.ndarray[double, ndim=1] out = np.empty(nrow)
    with nogil:
        for r in range(nrow):
            nd = 0
            while feat[nd] >= 0:
                if Xc[r, feat[nd]] <= thr[nd]:
                    nd = lc[nd]
                else:
                    nd = rc[nd]
            out[r] = val[nd]
    return out
