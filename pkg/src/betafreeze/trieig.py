"""Symmetric tridiagonal eigensolver.

Single matrices go through LAPACK (``?stemr``/``?stebz`` via scipy). Stacks of
small matrices, the Monte Carlo hot path, are expanded to dense and handed to
the batched ``eigvalsh`` in fixed-size blocks so memory stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .matrices import TridiagonalSym

# above this size the dense batch costs more than a per-matrix tridiagonal solve
_DENSE_BATCH_MAX_K = 48
_DENSE_BATCH_BLOCK = 8192


class EigenSolverError(RuntimeError):
    """The tridiagonal eigensolver failed to converge (an internal defect)."""


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: Optional[np.ndarray] = None


def eigh_tridiagonal(T: TridiagonalSym, want_vectors: bool = False) -> EigenResult:
    """Eigenvalues (descending) and optionally orthonormal eigenvectors of ``T``."""
    if T.k == 1:
        vecs = np.ones((1, 1)) if want_vectors else None
        return EigenResult(T.diag.copy(), vecs)
    try:
        if want_vectors:
            w, v = scipy.linalg.eigh_tridiagonal(T.diag, T.offdiag, eigvals_only=False)
        else:
            w = scipy.linalg.eigh_tridiagonal(T.diag, T.offdiag, eigvals_only=True)
            v = None
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigenSolverError(
            f"tridiagonal eigensolver did not converge for k={T.k}: "
            f"diag={T.diag!r} offdiag={T.offdiag!r}"
        ) from exc
    w = w[::-1].copy()
    if v is not None:
        v = v[:, ::-1].copy()
    return EigenResult(w, v)


def eig_residual(T: TridiagonalSym, value: float, vector) -> float:
    """Relative residual ||T v - value v|| / ||v||."""
    v = np.asarray(vector, dtype=float).reshape(-1)
    if v.size != T.k:
        raise ValueError(f"vector has length {v.size}, matrix is {T.k}x{T.k}")
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("residual undefined for the zero vector")
    return float(np.linalg.norm(T.matvec(v) - value * v) / nv)


def eigvalsh_tridiagonal_batch(diag: np.ndarray, offdiag: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of tridiagonal matrices.

    ``diag`` has shape (n, k) and ``offdiag`` shape (n, k-1). Returns an (n, k)
    array with each row sorted descending.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n, k = diag.shape
    if offdiag.shape != (n, k - 1):
        raise ValueError(f"offdiag shape {offdiag.shape} does not match diag {diag.shape}")
    if k == 1:
        return diag.copy()
    out = np.empty((n, k))
    if k <= _DENSE_BATCH_MAX_K:
        idx = np.arange(k)
        for start in range(0, n, _DENSE_BATCH_BLOCK):
            stop = min(start + _DENSE_BATCH_BLOCK, n)
            dense = np.zeros((stop - start, k, k))
            dense[:, idx, idx] = diag[start:stop]
            dense[:, idx[:-1], idx[1:]] = offdiag[start:stop]
            dense[:, idx[1:], idx[:-1]] = offdiag[start:stop]
            try:
                out[start:stop] = np.linalg.eigvalsh(dense)[:, ::-1]
            except np.linalg.LinAlgError as exc:
                raise EigenSolverError(f"batched eigvalsh failed in rows {start}:{stop}") from exc
    else:
        for row in range(n):
            out[row] = eigh_tridiagonal(TridiagonalSym(diag[row], offdiag[row])).values
    return out
