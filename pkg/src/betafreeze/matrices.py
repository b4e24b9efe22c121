"""Compact storage for symmetric tridiagonal and lower-bidiagonal matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TridiagonalSym:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).reshape(-1)
        e = np.asarray(self.offdiag, dtype=float).reshape(-1)
        if d.size == 0:
            raise ValueError("tridiagonal matrix needs at least one diagonal entry")
        if e.size != d.size - 1:
            raise ValueError(f"offdiag has length {e.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def k(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.offdiag * x[1:]
        y[1:] += self.offdiag * x[:-1]
        return y

    def norm(self) -> float:
        """Frobenius norm (an upper bound for the spectral norm)."""
        return float(np.sqrt(np.sum(self.diag**2) + 2.0 * np.sum(self.offdiag**2)))

    def scaled(self, factor: float) -> "TridiagonalSym":
        return TridiagonalSym(self.diag * factor, self.offdiag * factor)


@dataclass(frozen=True)
class Bidiagonal:
    """Lower bidiagonal matrix: ``diag`` on the main diagonal, ``subdiag`` just below it."""

    diag: np.ndarray
    subdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).reshape(-1)
        s = np.asarray(self.subdiag, dtype=float).reshape(-1)
        if d.size == 0:
            raise ValueError("bidiagonal matrix needs at least one diagonal entry")
        if s.size != d.size - 1:
            raise ValueError(f"subdiag has length {s.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(s))):
            raise ValueError("bidiagonal entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "subdiag", s)

    @property
    def k(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.subdiag, -1)

    def gram(self) -> TridiagonalSym:
        """Return B @ B.T as a tridiagonal matrix."""
        d2 = self.diag**2
        d2[1:] += self.subdiag**2
        return TridiagonalSym(d2, self.diag[:-1] * self.subdiag)


def gram_batch(diag: np.ndarray, subdiag: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise B @ B.T for stacked bidiagonals of shape (n, k) and (n, k-1)."""
    t_diag = diag**2
    t_diag[:, 1:] += subdiag**2
    return t_diag, diag[:, :-1] * subdiag
