import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betafreeze.matrices import Bidiagonal, TridiagonalSym
from betafreeze.trieig import eig_residual, eigh_tridiagonal, eigvalsh_tridiagonal_batch


def charpoly_roots(T):
    """Eigenvalues of a k<=3 tridiagonal matrix from its characteristic polynomial."""
    d, e = T.diag, T.offdiag
    if T.k == 1:
        return np.array([d[0]])
    if T.k == 2:
        m, q = 0.5 * (d[0] + d[1]), math.hypot(0.5 * (d[0] - d[1]), e[0])
        return np.array([m + q, m - q])
    # det(xI - T) = x^3 - c2 x^2 + c1 x - c0; trigonometric solution of the real cubic
    c2 = d.sum()
    c1 = d[0] * d[1] + d[1] * d[2] + d[0] * d[2] - e[0] ** 2 - e[1] ** 2
    c0 = d[0] * d[1] * d[2] - d[0] * e[1] ** 2 - d[2] * e[0] ** 2
    shift = c2 / 3
    p = c1 - c2**2 / 3
    q = -(2 * c2**3 / 27 - c2 * c1 / 3 + c0)
    if abs(p) < 1e-300:
        return np.full(3, shift + np.cbrt(-q))
    r = 2 * math.sqrt(-p / 3)
    arg = max(-1.0, min(1.0, 3 * q / (p * r)))
    phi = math.acos(arg) / 3
    roots = [shift + r * math.cos(phi - 2 * math.pi * j / 3) for j in range(3)]
    return np.sort(roots)[::-1]


def test_examples():
    assert eigh_tridiagonal(TridiagonalSym([5.0], [])).values.tolist() == [5.0]
    v = eigh_tridiagonal(TridiagonalSym([0, 0], [1 / math.sqrt(2)])).values
    assert v == pytest.approx([0.7071068, -0.7071068], abs=1e-7)
    v = eigh_tridiagonal(TridiagonalSym([2, 2], [math.sqrt(2)])).values
    assert v == pytest.approx([3.4142136, 0.5857864], abs=1e-7)


entries = st.floats(-10, 10, allow_nan=False)


@given(k=st.integers(1, 3), data=st.data())
def test_against_characteristic_polynomial(k, data):
    d = data.draw(st.lists(entries, min_size=k, max_size=k))
    e = data.draw(st.lists(entries, min_size=k - 1, max_size=k - 1))
    T = TridiagonalSym(d, e)
    np.testing.assert_allclose(eigh_tridiagonal(T).values, charpoly_roots(T), atol=1e-10 * max(1.0, T.norm()))


@settings(deadline=None, max_examples=30)
@given(k=st.integers(1, 200), seed=st.integers(0, 2**32 - 1))
def test_vectors_orthonormal_and_trace_identities(k, seed):
    rng = np.random.default_rng(seed)
    T = TridiagonalSym(rng.uniform(-1, 1, k), rng.uniform(-1, 1, k - 1))
    res = eigh_tridiagonal(T, want_vectors=True)
    assert np.all(np.diff(res.values) <= 0)
    np.testing.assert_allclose(res.vectors.T @ res.vectors, np.eye(k), atol=1e-10)
    for i in range(k):
        assert eig_residual(T, res.values[i], res.vectors[:, i]) <= 1e-10 * max(T.norm(), 1e-300)
    assert abs(res.values.sum() - T.diag.sum()) <= 1e-10 * k
    assert abs(np.sum(res.values**2) - T.norm() ** 2) <= 1e-9 * k


def test_values_only_by_default_and_deterministic():
    T = TridiagonalSym(np.arange(6.0), np.ones(5))
    a, b = eigh_tridiagonal(T), eigh_tridiagonal(T)
    assert a.vectors is None
    assert a.values.tobytes() == b.values.tobytes()


def test_residual_examples():
    T = TridiagonalSym([0, 0], [1 / math.sqrt(2)])
    assert eig_residual(T, 0.7071068, [1, 1]) <= 1e-7
    assert eig_residual(T, 0.7071068, [1, 1.1]) > 1e-2
    res = eigh_tridiagonal(T, want_vectors=True)
    assert eig_residual(T, res.values[0], res.vectors[:, 0]) <= 1e-12 * T.norm()
    with pytest.raises(ValueError):
        eig_residual(T, 1.0, [0, 0])
    with pytest.raises(ValueError):
        eig_residual(T, 1.0, [1, 0, 0])


@pytest.mark.parametrize("k", [1, 2, 5, 48, 49, 70])
def test_batch_matches_single(k):
    rng = np.random.default_rng(k)
    d, e = rng.normal(size=(37, k)), rng.normal(size=(37, k - 1))
    batch = eigvalsh_tridiagonal_batch(d, e)
    for row in range(37):
        single = eigh_tridiagonal(TridiagonalSym(d[row], e[row])).values
        np.testing.assert_allclose(batch[row], single, atol=1e-12 * (1 + np.abs(d).max() + 2 * np.abs(e).sum()))


def test_malformed_matrices_rejected():
    with pytest.raises(ValueError):
        TridiagonalSym([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        TridiagonalSym([1.0, np.inf], [0.0])
    with pytest.raises(ValueError):
        Bidiagonal([1.0], [1.0])


def test_bidiagonal_gram_is_dense_product():
    rng = np.random.default_rng(3)
    B = Bidiagonal(rng.uniform(0, 2, 6), rng.uniform(0, 2, 5))
    np.testing.assert_allclose(B.gram().to_dense(), B.to_dense() @ B.to_dense().T, atol=1e-14)
