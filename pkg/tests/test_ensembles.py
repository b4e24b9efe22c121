import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from betafreeze.ensembles import (
    EnsembleSpec,
    SpecError,
    chi_mean,
    residual_matrix,
    resolve_laguerre_params,
    sample_chi,
    sample_hermite,
    sample_laguerre,
    sample_laguerre_bidiagonal,
    sample_raw,
    sample_spectra,
    worker_count,
)
from betafreeze.matrices import Bidiagonal, TridiagonalSym
from betafreeze.orthopoly import hermite_roots


def chi_mean_mp(r):
    r = mpmath.mpf(r)
    return float(mpmath.sqrt(2) * mpmath.gamma((r + 1) / 2) / mpmath.gamma(r / 2))


@pytest.mark.parametrize("r,expected", [(1, math.sqrt(2 / math.pi)), (2, math.sqrt(math.pi / 2))])
def test_chi_mean_closed_forms(r, expected):
    assert chi_mean(r) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("r", [0.3, 1, 7.5, 100, 1e4, 1e6, 1e9])
def test_chi_mean_against_mpmath(r):
    assert chi_mean(r) == pytest.approx(chi_mean_mp(r), rel=1e-12)


def test_chi_mean_large_r():
    assert chi_mean(1e4) == pytest.approx(99.99750, abs=5e-6)
    assert chi_mean(1e4) == pytest.approx(100 * (1 - 1 / 4e4), abs=1e-6)


@given(st.floats(100, 1e12))
def test_chi_mean_close_to_sqrt_r(r):
    assert abs(chi_mean(r) - math.sqrt(r)) <= 1 / (2 * math.sqrt(r))


@pytest.mark.parametrize("r", [0, -1.0])
def test_chi_rejects_nonpositive_dof(r):
    with pytest.raises(ValueError):
        chi_mean(r)
    with pytest.raises(ValueError):
        sample_chi(r, np.random.default_rng(0))


def test_chi_draws_nonnegative_and_moments():
    rng = np.random.default_rng(101)
    n = 100_000
    x = sample_chi(1e4, rng, size=n)
    assert np.all(x >= 0)
    # sd of chi_r is about 1/sqrt(2)
    assert abs(x.mean() - chi_mean(1e4)) <= 3 * x.std() / math.sqrt(n)
    y = sample_chi(2.0, rng, size=n) ** 2
    # chi^2_2 has mean 2, variance 4
    assert abs(y.mean() - 2.0) <= 3 * 2 / math.sqrt(n)
    small = sample_chi(0.05, rng, size=1000)
    assert np.all(small >= 0)


def test_hermite_k1_variance():
    spec = EnsembleSpec.hermite(1, 2.0)
    lam = sample_spectra(spec, 100_000, seed=5)[:, 0]
    # N(0,1)/sqrt(2 beta): variance 1/4; se of variance ~ 0.25 sqrt(2/n)
    assert abs(lam.var() - 0.25) <= 3 * 0.25 * math.sqrt(2 / 1e5)


def test_hermite_trace_moments():
    n = 100_000
    spec = EnsembleSpec.hermite(4, 4.0)
    d, _ = sample_raw(spec, n, seed=9)
    tr = d.sum(axis=1) * spec.scale
    var = 1 / (2 * spec.beta)
    assert abs(tr.mean()) <= 3 * math.sqrt(var / n)
    assert tr.var() == pytest.approx(var, rel=0.05)
    # unscaled diagonal entries are N(0, 2)/sqrt(2), variance 1
    assert abs(d.var() - 1.0) <= 3 * math.sqrt(2 / d.size)


def test_laguerre_k1_mean():
    beta = 10.0
    spec = EnsembleSpec.laguerre(1, beta, a=beta)
    lam = sample_spectra(spec, 100_000, seed=6)[:, 0]
    # k beta lambda = chi^2_{2a}; mean 2a/beta = 2, var 4a/beta^2
    assert abs(lam.mean() - 2.0) <= 3 * math.sqrt(4 * spec.a / beta**2 / 1e5)


def test_laguerre_trace_variance():
    spec = EnsembleSpec.laguerre(2, 8.0, gamma=1.0)
    assert spec.a == 8.0
    n = 100_000
    lam = sample_spectra(spec, n, seed=7)
    t = lam.sum(axis=1) * spec.k * spec.beta
    assert t.var() == pytest.approx(4 * spec.a * spec.k, rel=0.05)
    assert np.all(lam >= 0)


def test_single_samples_shapes_and_psd():
    rng = np.random.default_rng(1)
    spec = EnsembleSpec.laguerre(5, 3.0, gamma=0.7)
    T = sample_laguerre(spec, rng)
    assert isinstance(T, TridiagonalSym) and T.k == 5
    assert np.all(np.linalg.eigvalsh(T.to_dense()) >= -1e-14)
    B = sample_laguerre_bidiagonal(spec, rng)
    assert isinstance(B, Bidiagonal) and np.all(B.diag >= 0) and np.all(B.subdiag >= 0)
    H = sample_hermite(EnsembleSpec.hermite(5, 3.0), rng)
    assert H.k == 5


def test_hermite_single_sample_scaling():
    spec = EnsembleSpec.hermite(3, 2.0)
    raw = sample_hermite(spec, np.random.default_rng(4), scaled=False)
    scaled = sample_hermite(spec, np.random.default_rng(4))
    np.testing.assert_allclose(scaled.diag, raw.diag / math.sqrt(12))
    np.testing.assert_allclose(scaled.offdiag, raw.offdiag / math.sqrt(12))


def test_determinism_and_thread_independence(monkeypatch):
    spec = EnsembleSpec.hermite(6, 3.0)
    a = sample_spectra(spec, 20_000, seed=77, workers=1, chunk_size=1000)
    b = sample_spectra(spec, 20_000, seed=77, workers=4, chunk_size=1000)
    assert a.tobytes() == b.tobytes()
    monkeypatch.setenv("BETAFREEZE_THREADS", "2")
    c = sample_spectra(spec, 20_000, seed=77, chunk_size=1000)
    assert a.tobytes() == c.tobytes()
    assert not np.array_equal(a, sample_spectra(spec, 20_000, seed=78, chunk_size=1000))
    assert np.all(np.diff(a, axis=1) <= 0)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("BETAFREEZE_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("BETAFREEZE_THREADS", "0")
    with pytest.raises(SpecError):
        worker_count()


def test_zeroth_order_hermite_limit():
    spec = EnsembleSpec.hermite(4, 1e8)
    lam = sample_spectra(spec, 200, seed=3)
    frozen = hermite_roots(4).roots / math.sqrt(8)
    assert np.max(np.abs(lam - frozen)) <= 1e-3


# parameter resolution


def test_resolve_case_a():
    assert resolve_laguerre_params(4, 4, gamma=1) == (8.0, 1.0)
    for beta, a in zip((4, 6, 8, 10), (8, 12, 16, 20)):
        assert resolve_laguerre_params(4, beta, gamma=1)[0] == a


def test_resolve_case_b():
    # weight power p=1 at beta = 4, 6, 8, 10 gives gamma = 1, 2/3, 1/2, 2/5 and a = 8, 11, 14, 17
    for beta, a, gamma in zip((4, 6, 8, 10), (8, 11, 14, 17), (1, 2 / 3, 1 / 2, 2 / 5)):
        ra, rg = resolve_laguerre_params(4, beta, p=1)
        assert ra == pytest.approx(a, abs=1e-12) and rg == pytest.approx(gamma, abs=1e-15)


@given(k=st.integers(1, 50), beta=st.floats(0.1, 1e4), gamma=st.floats(1e-3, 100))
def test_resolution_round_trips(k, beta, gamma):
    a, g = resolve_laguerre_params(k, beta, gamma=gamma)
    assert g == gamma
    a2, g2 = resolve_laguerre_params(k, beta, a=a)
    assert a2 == a and g2 == pytest.approx(gamma, rel=1e-9, abs=1e-9 * k)
    p = a - (k - 1) * beta / 2 - 1
    a3, g3 = resolve_laguerre_params(k, beta, p=p)
    assert a3 == pytest.approx(a, rel=1e-12) and g3 == pytest.approx(gamma, rel=1e-9, abs=1e-9 * k)


def test_resolution_errors():
    with pytest.raises(SpecError):
        resolve_laguerre_params(4, 4)
    with pytest.raises(SpecError):
        resolve_laguerre_params(4, 4, a=8, gamma=1)
    with pytest.raises(SpecError, match=r"a > \(k-1\)\*beta/2"):
        resolve_laguerre_params(4, 4, a=6.0)
    with pytest.raises(SpecError):
        EnsembleSpec.laguerre(3, 2.0, gamma=-0.1)
    with pytest.raises(SpecError):
        EnsembleSpec.hermite(0, 2.0)
    with pytest.raises(SpecError):
        EnsembleSpec.hermite(2, 0.0)
    with pytest.raises(SpecError):
        EnsembleSpec("laguerre", 2, 1.0)


# residual matrix


def test_residual_matrix_structure():
    spec = EnsembleSpec.hermite(4, 100.0)
    raw = sample_hermite(spec, np.random.default_rng(0), scaled=False)
    Z = residual_matrix(raw, spec)
    np.testing.assert_allclose(Z.diag, raw.diag)
    np.testing.assert_allclose(Z.offdiag, raw.offdiag - 10 * np.sqrt(np.arange(3, 0, -1) / 2))
    lspec = EnsembleSpec.laguerre(3, 100.0, gamma=1.0)
    B = sample_laguerre_bidiagonal(lspec, np.random.default_rng(0))
    Zl = residual_matrix(B, lspec)
    np.testing.assert_allclose(Zl.diag, B.diag - 10 * np.sqrt([3, 2, 1]))
    with pytest.raises(ValueError):
        residual_matrix(raw, EnsembleSpec.hermite(3, 100.0))
    with pytest.raises(TypeError):
        residual_matrix(raw, EnsembleSpec.laguerre(4, 100.0, gamma=1.0))


def test_residual_variances_large_beta():
    n = 10_000
    spec = EnsembleSpec.hermite(4, 1e6)
    d, e = sample_raw(spec, n, seed=31)
    Zd = np.array([residual_matrix(TridiagonalSym(d[i], e[i]), spec).diag for i in range(n)])
    Ze = np.array([residual_matrix(TridiagonalSym(d[i], e[i]), spec).offdiag for i in range(n)])
    assert np.all((Zd.var(axis=0) > 0.95) & (Zd.var(axis=0) < 1.05))
    np.testing.assert_allclose(Ze.var(axis=0), 0.25, rtol=0.05)
