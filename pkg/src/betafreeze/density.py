"""Level-density curves: Gaussian-mixture approximation, exact beta=2 Hermite density,
semicircle, and density-normalized histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .ensembles import HERMITE
from .fluctuations import FluctuationModel

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianMixture:
    weights: np.ndarray
    mus: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        if not (self.weights.size == self.mus.size == self.sigmas.size):
            raise ValueError("mixture arrays must have equal length")
        if np.any(self.sigmas <= 0):
            raise ValueError("mixture sigmas must be positive")

    @property
    def components(self) -> list[tuple[float, float, float]]:
        return list(zip(self.weights.tolist(), self.mus.tolist(), self.sigmas.tolist()))


def gaussian_mixture(model: FluctuationModel, beta: float) -> GaussianMixture:
    """Equal-weight mixture with component i ~ N(mean_i, (scale^2 Var(G_i)) / beta)."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    sigmas = model.scale * np.sqrt(model.variances) / math.sqrt(beta)
    k = model.k
    return GaussianMixture(np.full(k, 1.0 / k), np.asarray(model.means, dtype=float).copy(), sigmas)


def mixture_pdf(m: GaussianMixture, x):
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - m.mus) / m.sigmas
    out = np.sum(m.weights * np.exp(-0.5 * z * z) / (_SQRT_2PI * m.sigmas), axis=-1)
    return out if out.ndim else float(out)


def mixture_cdf(m: GaussianMixture, x):
    x = np.asarray(x, dtype=float)
    out = np.sum(m.weights * ndtr((x[..., None] - m.mus) / m.sigmas), axis=-1)
    return out if out.ndim else float(out)


def exact_level_density_beta2(k: int, x_scaled):
    """One-eigenvalue density of the k x k beta=2 Hermite ensemble, in the scaled variable.

    With y = 2 sqrt(k) x, the unscaled density is (1/k) sum_{j<k} phi_j(y)^2 where
    phi_j are the orthonormal functions He_j(y) exp(-y^2/4) / sqrt(j! sqrt(2 pi)).
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    s = 2.0 * math.sqrt(k)
    y = s * np.asarray(x_scaled, dtype=float)
    prev = np.zeros_like(y)
    cur = np.exp(-0.25 * y * y) / math.sqrt(_SQRT_2PI)
    acc = cur * cur
    for j in range(1, k):
        nxt = (y * cur - math.sqrt(j - 1) * prev) / math.sqrt(j)
        prev, cur = cur, nxt
        acc = acc + cur * cur
    out = s * acc / k
    return out if out.ndim else float(out)


def semicircle_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.where(np.abs(x) <= 1.0, (2.0 / math.pi) * np.sqrt(np.clip(1.0 - x * x, 0.0, None)), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    n_total: int
    n_below: int
    n_above: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def in_range_fraction(self) -> float:
        return float(self.counts.sum()) / self.n_total

    @property
    def bin_mass(self) -> np.ndarray:
        return self.counts / self.n_total


def build_histogram(samples, nbins: int, range: tuple[float, float]) -> Histogram:
    """Histogram normalized by the total sample count.

    Bins are left-closed and right-open except the last, which is closed. Samples
    outside ``range`` are counted in ``n_below`` / ``n_above`` rather than binned,
    so the density integrates to the in-range fraction (1 when nothing falls outside).
    """
    lo, hi = float(range[0]), float(range[1])
    if nbins < 1:
        raise ValueError("nbins must be at least 1")
    if not lo < hi:
        raise ValueError(f"empty histogram range ({lo}, {hi})")
    x = np.asarray(samples, dtype=float).reshape(-1)
    n_below = int(np.count_nonzero(x < lo))
    n_above = int(np.count_nonzero(x > hi))
    if x.size - n_below - n_above == 0:
        raise ValueError("no samples fall inside the histogram range")
    counts, edges = np.histogram(x, bins=nbins, range=(lo, hi))
    density = counts / (x.size * np.diff(edges))
    return Histogram(edges, density, counts, int(x.size), n_below, n_above)


def default_grid(model: FluctuationModel, npoints: int = 512) -> np.ndarray:
    if model.kind == HERMITE:
        return np.linspace(-1.25, 1.25, npoints)
    return np.linspace(-0.1, 1.5 * float(np.max(model.means)), npoints)


def bin_probabilities_from_cdf(cdf, edges: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Bin masses plus the mass below and above the histogram range."""
    c = np.asarray(cdf(edges), dtype=float)
    return np.diff(c), float(c[0]), float(1.0 - c[-1])


def bin_probabilities_from_pdf(pdf, edges: np.ndarray, order: int = 32,
                               tails: tuple[float, float] = (-np.inf, np.inf)):
    """Bin masses of ``pdf`` by Gauss-Legendre on each bin; tail masses by adaptive quadrature."""
    from scipy.integrate import quad

    nodes, weights = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    pts = 0.5 * (a + b)[:, None] + half[:, None] * nodes
    masses = half * (np.asarray(pdf(pts)) @ weights)
    below = quad(pdf, tails[0], edges[0], limit=200)[0]
    above = quad(pdf, edges[-1], tails[1], limit=200)[0]
    return masses, below, above


def tv_distance(hist: Histogram, masses: np.ndarray, below: float, above: float) -> float:
    """Total variation between the empirical and model bin distributions, tails included."""
    emp_below = hist.n_below / hist.n_total
    emp_above = hist.n_above / hist.n_total
    return 0.5 * float(np.abs(hist.bin_mass - masses).sum()
                       + abs(emp_below - below) + abs(emp_above - above))
