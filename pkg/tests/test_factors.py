"""Principal-component factor extraction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroml.data.factors import extract_factors


def _panel(T=120, N=20, K_true=3, seed=0, noise=0.1):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((T, K_true))
    L = rng.standard_normal((N, K_true))
    return F @ L.T + noise * rng.standard_normal((T, N))


def test_shapes_and_eigenvalue_order():
    X = _panel()
    fs = extract_factors(X, K=4)
    assert fs.factors.shape == (120, 4)
    assert fs.loadings.shape == (20, 4)
    assert fs.K == 4
    assert np.all(np.diff(fs.eigenvalues) <= 1e-9)


def test_factors_orthogonal():
    fs = extract_factors(_panel(), K=5)
    G = fs.factors.T @ fs.factors
    off = G - np.diag(np.diag(G))
    assert np.abs(off).max() < 1e-8


def test_reconstruction_with_full_rank():
    X = _panel(T=40, N=6, K_true=6, noise=0.0)
    fs = extract_factors(X, K=6)
    np.testing.assert_allclose(fs.factors @ fs.loadings.T, X, atol=1e-8)


def test_low_rank_panel_recovered():
    X = _panel(noise=0.0)
    fs = extract_factors(X, K=5)
    # variance beyond the true rank is numerically zero
    assert fs.eigenvalues[3] < 1e-16 * fs.eigenvalues[0]
    np.testing.assert_allclose(fs.factors[:, :3] @ fs.loadings[:, :3].T, X, atol=1e-6)


def test_sign_convention():
    fs = extract_factors(_panel(seed=3), K=3)
    for k in range(3):
        j = int(np.argmax(np.abs(fs.loadings[:, k])))
        assert fs.loadings[j, k] > 0


def test_k_too_large():
    with pytest.raises(ValueError):
        extract_factors(_panel(T=10, N=4), K=5)


def test_non_finite_rejected():
    X = _panel()
    X[3, 4] = np.nan
    with pytest.raises(ValueError):
        extract_factors(X, K=2)


@given(seed=st.integers(0, 2**31), K=st.integers(1, 5))
@settings(max_examples=25, deadline=None)
def test_projection_identity(seed, K):
    # factors are the projection of the data onto the loadings
    X = _panel(seed=seed)
    fs = extract_factors(X, K=K)
    np.testing.assert_allclose(X @ fs.loadings, fs.factors, atol=1e-8)
