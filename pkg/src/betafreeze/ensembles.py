"""Seeded samplers for the tridiagonal beta-Hermite and bidiagonal beta-Laguerre models.

Hermite (size k): (1/sqrt 2) * tridiag with N(0, 2) on the diagonal and
chi_{(k-1)beta}, ..., chi_beta on the off-diagonal; samples are returned scaled
by 1/sqrt(2 k beta).

Laguerre (size k, parameter a > (k-1) beta / 2): L = B B^T with B lower
bidiagonal, diagonal chi_{2a}, chi_{2a-beta}, ..., chi_{2a-(k-1)beta} and
subdiagonal chi_{(k-1)beta}, ..., chi_beta; samples are returned scaled by
1/(k beta).

Monte Carlo batches are split into fixed-size chunks, each driven by its own
generator derived from (seed, chunk index), so results do not depend on how
many worker threads run them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .matrices import Bidiagonal, TridiagonalSym, gram_batch
from .orthopoly import hermite_freeze_matrix, laguerre_freeze_matrix
from .trieig import eigvalsh_tridiagonal_batch

HERMITE = "hermite"
LAGUERRE = "laguerre"

CHUNK_SIZE = 8192
THREADS_ENV = "BETAFREEZE_THREADS"


class SpecError(ValueError):
    """An ensemble specification violates its parameter constraints."""


def resolve_laguerre_params(k, beta, *, a=None, gamma=None, p=None) -> tuple[float, float]:
    """Resolve exactly one of (a, gamma, p) into the pair (a, gamma).

    gamma fixed:  a = (beta/2)(k + gamma - 1)
    p fixed:      gamma = 2(p + 1)/beta, a = p + 1 + (beta/2)(k - 1)
    a given:      gamma = 2a/beta - (k - 1)

    Here p is the power of lambda in the eigenvalue weight lambda^p exp(-lambda/2),
    i.e. p = a - (k-1)beta/2 - 1.
    """
    given = [name for name, v in (("a", a), ("gamma", gamma), ("p", p)) if v is not None]
    if len(given) != 1:
        raise SpecError(f"exactly one of a, gamma, p must be given (got {given or 'none'})")
    k, beta = int(k), float(beta)
    half = 0.5 * beta
    if gamma is not None:
        gamma = float(gamma)
        a = half * (k + gamma - 1)
    elif p is not None:
        p = float(p)
        gamma = 2.0 * (p + 1.0) / beta
        a = p + 1.0 + half * (k - 1)
    else:
        a = float(a)
        gamma = a / half - (k - 1)
    bound = half * (k - 1)
    if not a > bound or not gamma > 0:
        raise SpecError(
            f"Laguerre parameter violates a > (k-1)*beta/2: a={a!r}, (k-1)*beta/2={bound!r} "
            f"(gamma={gamma!r} must be > 0)"
        )
    return a, gamma


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    k: int
    beta: float
    a: Optional[float] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (HERMITE, LAGUERRE):
            raise SpecError(f"unknown ensemble kind {self.kind!r}")
        if int(self.k) != self.k or self.k < 1:
            raise SpecError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise SpecError(f"beta must be positive and finite, got {self.beta!r}")
        object.__setattr__(self, "beta", float(self.beta))
        if self.kind == LAGUERRE:
            if self.a is None or self.gamma is None:
                raise SpecError("Laguerre spec needs resolved a and gamma; use EnsembleSpec.laguerre")
            bound = 0.5 * self.beta * (self.k - 1)
            if not (self.a > bound and self.gamma > 0):
                raise SpecError(
                    f"Laguerre parameter violates a > (k-1)*beta/2: a={self.a!r}, bound={bound!r}"
                )

    @classmethod
    def hermite(cls, k, beta) -> "EnsembleSpec":
        return cls(HERMITE, k, beta)

    @classmethod
    def laguerre(cls, k, beta, *, a=None, gamma=None, p=None) -> "EnsembleSpec":
        a, gamma = resolve_laguerre_params(k, beta, a=a, gamma=gamma, p=p)
        return cls(LAGUERRE, k, beta, a=a, gamma=gamma)

    @property
    def scale(self) -> float:
        """Factor applied to raw matrices: 1/sqrt(2 k beta) or 1/(k beta)."""
        if self.kind == HERMITE:
            return 1.0 / math.sqrt(2.0 * self.k * self.beta)
        return 1.0 / (self.k * self.beta)

    def as_dict(self) -> dict:
        d = {"kind": self.kind, "k": self.k, "beta": self.beta}
        if self.kind == LAGUERRE:
            d["a"] = self.a
            d["gamma"] = self.gamma
        return d


def _check_dof(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise ValueError(f"chi degrees of freedom must be positive, got {r!r}")
    return r


def sample_chi(r, rng: np.random.Generator, size=None):
    """Draw from chi_r as the square root of a Gamma(shape r/2, scale 2) variate."""
    r = _check_dof(r)
    return np.sqrt(rng.gamma(r / 2.0, 2.0, size=size))


# Bernoulli-number coefficients B_2n / (2n (2n-1)) of the log-gamma asymptotic series
_LGAMMA_SERIES = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360)


def _lgamma_half_step(x: float) -> float:
    """log Gamma(x + 1/2) - log Gamma(x), accurate to rounding for all x > 0.

    Subtracting two gammaln values loses about log10(x log x) digits, so for
    large x the leading terms of the two log-gamma expansions are cancelled
    analytically and only the small remainders are formed numerically.
    """
    if x < 20.0:
        return float(gammaln(x + 0.5) - gammaln(x))
    y = x + 0.5
    tail = 0.0
    for n, c in enumerate(_LGAMMA_SERIES):
        p = 2 * n + 1
        tail += c * (y**-p - x**-p)
    return 0.5 * math.log(x) + (x * math.log1p(0.5 / x) - 0.5) + tail


def chi_mean(r: float) -> float:
    """E[chi_r] = sqrt(2) Gamma((r+1)/2) / Gamma(r/2), through the log-gamma difference."""
    r = float(_check_dof(r))
    return math.exp(0.5 * math.log(2.0) + _lgamma_half_step(r / 2.0))


def _require(spec: EnsembleSpec, kind: str):
    if spec.kind != kind:
        raise SpecError(f"expected a {kind} spec, got {spec.kind}")


def hermite_raw_batch(spec: EnsembleSpec, n: int, rng: np.random.Generator):
    """Unscaled Hermite tridiagonals: arrays of shape (n, k) and (n, k-1)."""
    _require(spec, HERMITE)
    k, beta = spec.k, spec.beta
    diag = rng.normal(0.0, math.sqrt(2.0), size=(n, k)) / math.sqrt(2.0)
    dof = beta * np.arange(k - 1, 0, -1)
    off = sample_chi(dof, rng, size=(n, k - 1)) / math.sqrt(2.0) if k > 1 else np.empty((n, 0))
    return diag, off


def laguerre_raw_batch(spec: EnsembleSpec, n: int, rng: np.random.Generator):
    """Unscaled Laguerre bidiagonal factors: arrays of shape (n, k) and (n, k-1)."""
    _require(spec, LAGUERRE)
    k, beta, a = spec.k, spec.beta, spec.a
    diag = sample_chi(2.0 * a - beta * np.arange(k), rng, size=(n, k))
    dof = beta * np.arange(k - 1, 0, -1)
    sub = sample_chi(dof, rng, size=(n, k - 1)) if k > 1 else np.empty((n, 0))
    return diag, sub


def sample_hermite(spec: EnsembleSpec, rng: np.random.Generator, scaled: bool = True) -> TridiagonalSym:
    diag, off = hermite_raw_batch(spec, 1, rng)
    T = TridiagonalSym(diag[0], off[0])
    return T.scaled(spec.scale) if scaled else T


def sample_laguerre_bidiagonal(spec: EnsembleSpec, rng: np.random.Generator) -> Bidiagonal:
    """One unscaled bidiagonal factor B with L = B B^T."""
    diag, sub = laguerre_raw_batch(spec, 1, rng)
    return Bidiagonal(diag[0], sub[0])


def sample_laguerre(spec: EnsembleSpec, rng: np.random.Generator) -> TridiagonalSym:
    """One scaled Laguerre sample B B^T / (k beta), kept tridiagonal."""
    return sample_laguerre_bidiagonal(spec, rng).gram().scaled(spec.scale)


def residual_matrix(sample_unscaled, spec: EnsembleSpec):
    """Deviation of an unscaled sample from sqrt(beta) times the freeze matrix.

    Hermite: ``sample_unscaled`` is the raw tridiagonal; returns T - sqrt(beta) H,
    whose diagonal tends to N(0, 1) and off-diagonal to N(0, 1/4).
    Laguerre: ``sample_unscaled`` is the raw bidiagonal B; returns
    B - sqrt(beta) B_gamma, every entry tending to N(0, 1/2).
    """
    rb = math.sqrt(spec.beta)
    if sample_unscaled.k != spec.k:
        raise ValueError(f"sample is {sample_unscaled.k}x{sample_unscaled.k}, spec has k={spec.k}")
    if spec.kind == HERMITE:
        if not isinstance(sample_unscaled, TridiagonalSym):
            raise TypeError("Hermite residual needs the raw TridiagonalSym sample")
        H = hermite_freeze_matrix(spec.k)
        return TridiagonalSym(sample_unscaled.diag - rb * H.diag, sample_unscaled.offdiag - rb * H.offdiag)
    if not isinstance(sample_unscaled, Bidiagonal):
        raise TypeError("Laguerre residual needs the raw Bidiagonal factor")
    _, Bg = laguerre_freeze_matrix(spec.k, spec.gamma)
    return Bidiagonal(sample_unscaled.diag - rb * Bg.diag, sample_unscaled.subdiag - rb * Bg.subdiag)


def worker_count() -> int:
    cap = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            val = int(raw)
        except ValueError:
            raise SpecError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if val < 1:
            raise SpecError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        cap = min(cap, val)
    return cap


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for chunk ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _chunk_spectra(spec: EnsembleSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == HERMITE:
        diag, off = hermite_raw_batch(spec, n, rng)
        vals = eigvalsh_tridiagonal_batch(diag, off) * spec.scale
    else:
        bd, bs = laguerre_raw_batch(spec, n, rng)
        vals = eigvalsh_tridiagonal_batch(*gram_batch(bd, bs)) * spec.scale
        # B B^T is positive semidefinite; rounding can leave -1e-17 sized values
        np.maximum(vals, 0.0, out=vals)
    return vals


def sample_spectra(spec: EnsembleSpec, n: int, seed: int, workers: Optional[int] = None,
                   chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """Scaled eigenvalues of ``n`` independent samples, shape (n, k), rows descending."""
    if n < 1:
        raise ValueError("need at least one sample")
    sizes = [min(chunk_size, n - s) for s in range(0, n, chunk_size)]
    workers = worker_count() if workers is None else max(1, int(workers))

    def run(i):
        return _chunk_spectra(spec, sizes[i], substream(seed, i))

    if workers == 1 or len(sizes) == 1:
        parts = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(sizes))) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    return np.concatenate(parts, axis=0)


def sample_raw(spec: EnsembleSpec, n: int, seed: int, chunk_size: int = CHUNK_SIZE):
    """Unscaled raw matrices for ``n`` samples, drawn with the same chunked streams as
    :func:`sample_spectra` (same seed gives the same underlying matrices)."""
    draw = hermite_raw_batch if spec.kind == HERMITE else laguerre_raw_batch
    parts = [draw(spec, min(chunk_size, n - s), substream(seed, i))
             for i, s in enumerate(range(0, n, chunk_size))]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
