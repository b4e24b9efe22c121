"""Large-beta fluctuation laws for the scaled Hermite and Laguerre spectra.

As beta grows, sqrt(beta) * (lambda_i - mean_i) converges to scale * G_i with G a
centered Gaussian vector. The covariance of G is given by closed formulas in the
orthonormal polynomial values at the frozen roots (``*_fluctuation_model``).

The ``*_covariance_quadform`` functions reach the same covariance by a different
route: G_i is the Rayleigh quotient of the normalized freeze-matrix eigenvector
against the Gaussian residual matrix, so its covariance is read off the
coefficients of each independent residual entry. They use eigenvectors from the
eigensolver, not from the polynomial recurrence, and serve as a cross-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ensembles import HERMITE, LAGUERRE
from .matrices import TridiagonalSym
from .orthopoly import (
    hermite_freeze_matrix,
    hermite_roots,
    laguerre_freeze_matrix,
    laguerre_roots,
)
from .trieig import eigh_tridiagonal


class DegenerateSpectrumError(ValueError):
    """First-order perturbation needs an unperturbed matrix with simple eigenvalues."""


@dataclass(frozen=True)
class FluctuationModel:
    kind: str
    k: int
    means: np.ndarray
    covariance: np.ndarray
    scale: float
    gamma: Optional[float] = None
    roots: np.ndarray = field(default=None, repr=False)

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "k": self.k}
        if self.gamma is not None:
            d["gamma"] = self.gamma
        d["means"] = [float(x) for x in self.means]
        d["covariance"] = [[float(x) for x in row] for row in self.covariance]
        d["scale"] = float(self.scale)
        return d

    def to_json(self, meta: Optional[dict] = None) -> str:
        d = self.to_dict()
        if meta is not None:
            d["meta"] = meta
        return json.dumps(d, indent=2)


def _symmetrize(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + c.T)


def hermite_covariance(v: np.ndarray) -> np.ndarray:
    """Closed-form Hermite covariance from polynomial-valued eigenvectors.

    Column i of ``v`` holds (H_{k-1}(h_i), ..., H_0(h_i)) up to any factor.
    Cov(G_i, G_j) = [sum_l H_l^2(h_i) H_l^2(h_j)
                     + sum_l H_{l+1}(h_i) H_l(h_i) H_{l+1}(h_j) H_l(h_j)]
                    / [sum_l H_l^2(h_i) * sum_l H_l^2(h_j)]
    """
    sq = v**2
    adj = v[:-1] * v[1:]
    norms = sq.sum(axis=0)
    num = sq.T @ sq + adj.T @ adj
    return _symmetrize(num / np.outer(norms, norms))


def laguerre_covariance(v: np.ndarray, gamma: float) -> np.ndarray:
    """Closed-form Laguerre covariance from polynomial-valued eigenvectors.

    Column i of ``v`` holds (L_{k-1}(l_i), ..., L_0(l_i)); P[m] below is the
    degree-m row. The sum runs the leading (gamma+k-1) term plus the four sums
    A_k, B_k, C_k, D_k over l = 1..k-1 with m = k-l.
    """
    k = v.shape[0]
    P = v[::-1]  # P[m, i] = L_m(l_i)
    norms = (P**2).sum(axis=0)
    top = P[k - 1] ** 2
    num = (gamma + k - 1) * np.outer(top, top)
    for l in range(1, k):
        m = k - l
        lo, hi = P[m - 1], P[m]
        lo2, hi2 = lo**2, hi**2
        cross = lo * hi
        w = math.sqrt(gamma + m) * math.sqrt(m)
        num += (gamma + 2 * m - 1) * np.outer(lo2, lo2)                    # A_k
        num += (gamma + 2 * m) * np.outer(cross, cross)                    # B_k
        num += w * (np.outer(lo2, cross) + np.outer(cross, lo2))           # C_k
        num += w * (np.outer(hi2, cross) + np.outer(cross, hi2))           # D_k
    return _symmetrize(2.0 * num / np.outer(norms, norms))


def hermite_fluctuation_model(k: int) -> FluctuationModel:
    spec = hermite_roots(k)
    scale = 1.0 / math.sqrt(2.0 * k)
    return FluctuationModel(HERMITE, k, spec.roots * scale, hermite_covariance(spec.eigvectors),
                            scale, roots=spec.roots)


def laguerre_fluctuation_model(k: int, gamma: float) -> FluctuationModel:
    spec = laguerre_roots(k, gamma)
    scale = 1.0 / k
    return FluctuationModel(LAGUERRE, k, spec.roots * scale,
                            laguerre_covariance(spec.eigvectors, float(gamma)), scale,
                            gamma=float(gamma), roots=spec.roots)


def fluctuation_model(spec) -> FluctuationModel:
    """Model matching an :class:`EnsembleSpec` (Laguerre uses the spec's resolved gamma)."""
    if spec.kind == HERMITE:
        return hermite_fluctuation_model(spec.k)
    return laguerre_fluctuation_model(spec.k, spec.gamma)


def _solver_vectors(T: TridiagonalSym) -> np.ndarray:
    return eigh_tridiagonal(T, want_vectors=True).vectors


def hermite_covariance_quadform(k: int) -> np.ndarray:
    """Cov of G_i = phi_i^T Z phi_i, Z with N(0,1) diagonal and N(0,1/4) off-diagonal."""
    phi = _solver_vectors(hermite_freeze_matrix(k))
    diag_coef = phi**2                    # coefficient of Z[r, r]
    off_coef = 2.0 * phi[:-1] * phi[1:]   # coefficient of Z[r, r+1] (appears twice)
    c = diag_coef.T @ diag_coef + 0.25 * (off_coef.T @ off_coef)
    return _symmetrize(c)


def laguerre_covariance_quadform(k: int, gamma: float) -> np.ndarray:
    """Cov of G_i = sqrt(2) phi_i^T B_gamma Z^T phi_i, Z lower bidiagonal standard normal."""
    L, B = laguerre_freeze_matrix(k, gamma)
    phi = _solver_vectors(L)
    # u = B^T phi; B_gamma Z^T contributes Z[r, c] * phi[r] * u[c]
    u = B.diag[:, None] * phi
    u[:-1] += B.subdiag[:, None] * phi[1:]
    diag_coef = phi * u
    sub_coef = phi[1:] * u[:-1]
    c = 2.0 * (diag_coef.T @ diag_coef + sub_coef.T @ sub_coef)
    return _symmetrize(c)


def first_order_eig(A, B, eps: float) -> np.ndarray:
    """lambda_i(A) + eps * q_i^T B q_i for each eigenpair of A, descending in lambda_i(A)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError(f"A and B must be square and the same shape, got {A.shape} and {B.shape}")
    w, Q = np.linalg.eigh(A)
    w, Q = w[::-1], Q[:, ::-1]
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    if w.size > 1 and np.min(-np.diff(w)) <= 1e-10 * scale:
        raise DegenerateSpectrumError(
            f"A has a repeated eigenvalue (min gap {np.min(-np.diff(w)):.3e}); "
            "first-order formula requires distinct eigenvalues"
        )
    return w + eps * np.einsum("ri,rs,si->i", Q, B, Q)


def airy_edge_diagnostic(k_values) -> list[tuple[int, float, float]]:
    """Rows (k, m_k, t_k) tracking the largest frozen root towards the soft edge.

    m_k = k^(2/3) (h_1/sqrt(2k) - 1) approaches half the first Airy zero;
    t_k = k^(1/3) Var(G_1) / 2 is the edge-scaled variance of the top eigenvalue.
    """
    rows = []
    for k in k_values:
        k = int(k)
        if k < 2:
            raise ValueError(f"edge diagnostic needs k >= 2, got {k}")
        model = hermite_fluctuation_model(k)
        m_k = k ** (2.0 / 3.0) * (model.means[0] - 1.0)
        t_k = k ** (1.0 / 3.0) * model.covariance[0, 0] / 2.0
        rows.append((k, float(m_k), float(t_k)))
    return rows
