"""Least squares and ridge estimators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroml.models import FitError, fit_ols, fit_ridge
from macroml.models.linear import RidgeMode


def _data(seed=0, n=100, p=5, noise=0.2):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, p))
    beta = rng.standard_normal(p)
    y = 1.5 + Z @ beta + noise * rng.standard_normal(n)
    return Z, y, beta


class TestOLS:
    def test_matches_normal_equations(self):
        Z, y, _ = _data()
        m = fit_ols(Z, y)
        A = np.column_stack([np.ones(len(y)), Z])
        ref = np.linalg.solve(A.T @ A, A.T @ y)
        np.testing.assert_allclose(m.intercept, ref[0], atol=1e-10)
        np.testing.assert_allclose(m.coef, ref[1:], atol=1e-10)

    def test_noiseless_exact(self):
        Z, y, beta = _data(noise=0.0)
        m = fit_ols(Z, y)
        np.testing.assert_allclose(m.coef, beta, atol=1e-8)
        np.testing.assert_allclose(m.predict(Z), y, atol=1e-8)

    def test_collinear_column_named(self):
        Z, y, _ = _data()
        Z2 = np.column_stack([Z, Z[:, 0] * 2.0])
        with pytest.raises(FitError, match="collinear") as err:
            fit_ols(Z2, y)
        # one of the two dependent columns must be named
        assert "0" in str(err.value) or "5" in str(err.value)

    def test_more_params_than_rows(self):
        rng = np.random.default_rng(1)
        with pytest.raises(FitError):
            fit_ols(rng.standard_normal((4, 6)), rng.standard_normal(4))

    def test_non_finite_rejected(self):
        Z, y, _ = _data()
        Z[0, 0] = np.nan
        with pytest.raises(ValueError):
            fit_ols(Z, y)


class TestRidge:
    def test_primal_matches_closed_form(self):
        Z, y, _ = _data(seed=2)
        lam = 3.0
        m = fit_ridge(Z, y, lam=lam, mode=RidgeMode.PRIMAL)
        Zc = Z - Z.mean(axis=0)
        yc = y - y.mean()
        ref = np.linalg.solve(Zc.T @ Zc + lam * np.eye(Z.shape[1]), Zc.T @ yc)
        np.testing.assert_allclose(m.coef, ref, atol=1e-10)

    def test_primal_equals_dual(self):
        Z, y, _ = _data(seed=3, n=40, p=8)
        for lam in (0.01, 1.0, 100.0):
            p1 = fit_ridge(Z, y, lam=lam, mode=RidgeMode.PRIMAL)
            p2 = fit_ridge(Z, y, lam=lam, mode=RidgeMode.DUAL)
            np.testing.assert_allclose(p1.coef, p2.coef, atol=1e-8)
            assert abs(p1.intercept - p2.intercept) < 1e-8

    def test_lambda_zero_equals_ols(self):
        Z, y, _ = _data(seed=4)
        r = fit_ridge(Z, y, lam=0.0)
        o = fit_ols(Z, y)
        np.testing.assert_allclose(r.coef, o.coef, atol=1e-8)

    def test_dual_works_when_p_exceeds_n(self):
        rng = np.random.default_rng(5)
        Z = rng.standard_normal((15, 40))
        y = rng.standard_normal(15)
        m = fit_ridge(Z, y, lam=1.0, mode=RidgeMode.DUAL)
        assert np.isfinite(m.coef).all()

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_norm_monotone_in_lambda(self, seed):
        Z, y, _ = _data(seed=seed, n=60, p=6)
        norms = [
            np.linalg.norm(fit_ridge(Z, y, lam=lam).coef)
            for lam in np.logspace(-2, 4, 8)
        ]
        assert all(a >= b - 1e-10 for a, b in zip(norms, norms[1:]))

    def test_negative_lambda_rejected(self):
        Z, y, _ = _data()
        with pytest.raises(ValueError):
            fit_ridge(Z, y, lam=-1.0)
