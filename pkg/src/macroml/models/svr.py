"""epsilon-insensitive support vector regression via the SMO backend."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _backend
from .base import ConvergenceError
from .kernel_ridge import _gram


@dataclass(frozen=True)
class SVRModel:
    beta: np.ndarray  # lambda_j - lambda_j^* for the support vectors
    support: np.ndarray
    intercept: float
    Z_train: np.ndarray
    kernel: str
    sigma: float
    C: float
    eps: float

    @property
    def n_support(self) -> int:
        return int(self.support.size)

    def predict(self, Z_new) -> np.ndarray:
        Z_new = np.atleast_2d(np.asarray(Z_new, dtype=float))
        if self.support.size == 0:
            return np.full(Z_new.shape[0], self.intercept)
        K = _gram(Z_new, self.Z_train[self.support], self.kernel, self.sigma)
        return K @ self.beta + self.intercept

    def kkt_violation(self, Z, y) -> float:
        """Max violation of the dual optimality conditions on (Z, y)."""
        resid = np.asarray(y, dtype=float) - self.predict(Z)
        beta = np.zeros(resid.shape[0])
        beta[self.support] = self.beta
        v = np.zeros_like(resid)
        free = (np.abs(beta) > 0) & (np.abs(beta) < self.C)
        v[free] = np.abs(np.abs(resid[free]) - self.eps)
        at_zero = beta == 0
        v[at_zero] = np.maximum(np.abs(resid[at_zero]) - self.eps, 0.0)
        at_cap = np.abs(beta) >= self.C
        v[at_cap] = np.maximum(self.eps - np.sign(beta[at_cap]) * resid[at_cap], 0.0)
        return float(v.max(initial=0.0))


def fit_svr(
    Z,
    y,
    kernel: str = "rbf",
    C: float = 1.0,
    eps: float = 0.1,
    sigma: float = 1.0,
    tol: float = 1e-6,
    max_iter: int = 0,
) -> SVRModel:
    """Solve the box-constrained dual QP by pairwise SMO updates with a
    deterministic maximal-violating-pair rule; multipliers stay in [0, C] and
    points strictly inside the tube end with zero weight. The intercept comes
    out of the KKT bracket (equivalently, an average over free vectors)."""
    if C <= 0:
        raise ValueError("C must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(Z)) and np.all(np.isfinite(y))):
        raise ValueError("masked/non-finite entries in the estimation sample")
    K = _gram(Z, Z, kernel, sigma)
    beta, b, n_iter, viol = _backend.svr_smo(K, y, C, eps, tol=tol, max_iter=max_iter)
    if viol >= tol:
        raise ConvergenceError(
            f"SMO stopped after {n_iter} iterations with KKT violation {viol:.3e}",
            last_iterate=beta,
            gap=viol,
        )
    support = np.flatnonzero(np.abs(beta) > 1e-12)
    return SVRModel(
        beta=beta[support],
        support=support,
        intercept=float(b),
        Z_train=Z.copy(),
        kernel=kernel,
        sigma=sigma,
        C=C,
        eps=eps,
    )
