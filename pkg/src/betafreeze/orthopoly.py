"""Orthonormal Hermite/Laguerre polynomials and the beta = infinity freeze matrices.

The Hermite freeze matrix H has zero diagonal and off-diagonal sqrt(k-j)/sqrt(2),
its eigenvalues are the zeros h_1 > ... > h_k of the degree-k Hermite polynomial
(weight exp(-x^2)). The Laguerre freeze matrix L_gamma = B_gamma B_gamma^T has
eigenvalues l_1 > ... > l_k, the zeros of the Laguerre polynomial L_k^{gamma-1}.

In both cases the eigenvector for a root x is the vector of orthonormal
polynomial values (p_{k-1}(x), ..., p_0(x)), read from the highest degree down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .matrices import Bidiagonal, TridiagonalSym
from .trieig import eigh_tridiagonal

# renormalization threshold for the scaled recurrences used to build eigenvectors
_RESCALE_AT = 1e150


@dataclass(frozen=True)
class FrozenSpectrum:
    roots: np.ndarray
    eigvectors: np.ndarray
    matrix: TridiagonalSym


def _check_size(k: int) -> int:
    if int(k) != k or k < 1:
        raise ValueError(f"matrix size must be a positive integer, got {k!r}")
    return int(k)


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not (np.isfinite(gamma) and gamma > 0.0):
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    return gamma


def _check_x(x: float) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"evaluation point must be finite, got {x!r}")
    return x


def _check_degree(n: int) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    return int(n)


def hermite_orthonormal_eval(n: int, x: float) -> np.ndarray:
    """Values of the orthonormal Hermite polynomials of degree 0..n at ``x``.

    Orthonormal with respect to exp(-x^2) on the real line, positive leading
    coefficients.
    """
    n = _check_degree(n)
    x = _check_x(x)
    out = np.empty(n + 1)
    out[0] = math.pi ** -0.25
    if n >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for m in range(1, n):
        out[m + 1] = (x * out[m] - math.sqrt(m / 2.0) * out[m - 1]) / math.sqrt((m + 1) / 2.0)
    return out


def laguerre_orthonormal_eval(n: int, gamma: float, x: float) -> np.ndarray:
    """Values of the orthonormal Laguerre polynomials of degree 0..n at ``x``.

    Orthonormal with respect to x^gamma exp(-x) on [0, inf). The leading
    coefficients are positive, which is the sign choice that makes the
    polynomial-valued vector an eigenvector of the Laguerre freeze matrix.
    """
    n = _check_degree(n)
    gamma = _check_gamma(gamma)
    x = _check_x(x)
    out = np.empty(n + 1)
    out[0] = math.exp(-0.5 * gammaln(gamma + 1.0))
    if n >= 1:
        out[1] = (x - (gamma + 1.0)) * out[0] / math.sqrt(gamma + 1.0)
    for m in range(1, n):
        out[m + 1] = (
            (x - (2 * m + gamma + 1.0)) * out[m] - math.sqrt(m * (m + gamma)) * out[m - 1]
        ) / math.sqrt((m + 1) * (m + gamma + 1.0))
    return out


def _recurrence_vectors(alpha, b, roots) -> np.ndarray:
    """Columns (p_{k-1}(x), ..., p_0(x)) for each root x, each up to a positive factor.

    Uses x p_m = b[m+1] p_{m+1} + alpha[m] p_m + b[m] p_{m-1}, vectorized over
    roots, rescaling on the fly so large k cannot overflow.
    """
    k = roots.size
    p = np.empty((k, k))
    p[0] = 1.0
    if k > 1:
        p[1] = (roots - alpha[0]) / b[1]
    for m in range(1, k - 1):
        p[m + 1] = ((roots - alpha[m]) * p[m] - b[m] * p[m - 1]) / b[m + 1]
        big = np.abs(p[m + 1]) > _RESCALE_AT
        if np.any(big):
            p[: m + 2, big] /= _RESCALE_AT
    return p[::-1]


def _normalize_columns(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v, axis=0)
    for i in range(v.shape[1]):
        nz = np.flatnonzero(v[:, i])
        if nz.size and v[nz[0], i] < 0:
            v[:, i] = -v[:, i]
    return v


def hermite_freeze_matrix(k: int) -> TridiagonalSym:
    k = _check_size(k)
    return TridiagonalSym(np.zeros(k), np.sqrt(np.arange(k - 1, 0, -1) / 2.0))


def laguerre_freeze_matrix(k: int, gamma: float) -> tuple[TridiagonalSym, Bidiagonal]:
    """The freeze matrix L_gamma and its lower-bidiagonal factor B_gamma."""
    k = _check_size(k)
    gamma = _check_gamma(gamma)
    j = np.arange(1, k + 1)
    B = Bidiagonal(np.sqrt(gamma + k - j), np.sqrt(k - j[:-1]).astype(float))
    return B.gram(), B


def _hermite_recurrence(k: int):
    m = np.arange(k + 1)
    return np.zeros(k + 1), np.sqrt(m / 2.0)


def _laguerre_recurrence(k: int, gamma: float):
    m = np.arange(k + 1)
    return 2.0 * m + gamma + 1.0, np.sqrt(m * (m + gamma))


def hermite_roots(k: int) -> FrozenSpectrum:
    """Zeros of the degree-k Hermite polynomial, descending, with eigenvectors of H."""
    k = _check_size(k)
    H = hermite_freeze_matrix(k)
    w = eigh_tridiagonal(H).values
    # the zero set is symmetric under negation; impose it exactly
    roots = 0.5 * (w - w[::-1])
    alpha, b = _hermite_recurrence(k)
    vecs = _normalize_columns(_recurrence_vectors(alpha, b, roots))
    return FrozenSpectrum(roots, vecs, H)


def laguerre_roots(k: int, gamma: float) -> FrozenSpectrum:
    """Zeros of L_k^{gamma-1}, descending, with eigenvectors of L_gamma."""
    k = _check_size(k)
    gamma = _check_gamma(gamma)
    L, _ = laguerre_freeze_matrix(k, gamma)
    roots = eigh_tridiagonal(L).values
    alpha, b = _laguerre_recurrence(k, gamma)
    vecs = _normalize_columns(_recurrence_vectors(alpha, b, roots))
    return FrozenSpectrum(roots, vecs, L)
