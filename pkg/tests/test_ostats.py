import math

import numpy as np
import pytest
from scipy import integrate, stats

from oracles import beta_pdf
from tsorder.distributions import degenerate, gamma_delta, gamma_nabla, geometric
from tsorder.lattice import DomainError
from tsorder.ostats import (
    OsSpec,
    exponential,
    extreme_max_cdf,
    extreme_max_pdf,
    extreme_min_pdf,
    extreme_min_sf,
    fos_cdf_random_size,
    fos_excluded_mass,
    fos_pdf_random_size,
    os_cdf_random_size,
    os_pdf_random_size,
    quantile_grid,
    spacing_operator,
    uniform,
    weibull,
)

U = quantile_grid()


@pytest.mark.parametrize("n,i", [(3, 1), (5, 2), (8, 7), (12, 4)])
def test_os_degenerate_is_beta(n, i):
    spec = OsSpec(i, uniform(), degenerate("nabla", n))
    got = os_pdf_random_size(spec, U)
    want = np.array([beta_pdf(u, i, n - i) for u in U])
    assert np.max(np.abs(got - want)) < 1e-9


def test_os_integrates_to_one():
    spec = OsSpec(2, exponential(1.0), gamma_nabla(2.0, 0.5))
    val, _ = integrate.quad(lambda x: os_pdf_random_size(spec, x), 0, np.inf, limit=200)
    assert val == pytest.approx(1, abs=1e-6)


def test_os_cdf_derivative_matches_pdf():
    spec = OsSpec(2, weibull(1.5), geometric("nabla", 0.3))
    h = 1e-4
    for x in (0.2, 0.7, 1.3, 2.5):
        fd = (os_cdf_random_size(spec, x + h) - os_cdf_random_size(spec, x - h)) / (2 * h)
        assert fd == pytest.approx(os_pdf_random_size(spec, x), abs=1e-6)


def test_os_cdf_limits_and_classical():
    spec = OsSpec(3, uniform(), degenerate("nabla", 6))
    assert os_cdf_random_size(spec, 1.0) == pytest.approx(1)
    assert os_cdf_random_size(spec, 0.0) == 0
    # P(Bin(5, x) >= 3) by hand
    x = 0.4
    want = sum(math.comb(5, j) * x**j * (1 - x) ** (5 - j) for j in range(3, 6))
    assert os_cdf_random_size(spec, x) == pytest.approx(want, rel=1e-12)
    vals = os_cdf_random_size(spec, np.linspace(0, 1, 50))
    assert np.all(np.diff(vals) >= 0)


def test_os_errors():
    with pytest.raises(DomainError):
        OsSpec(1.5, uniform(), degenerate("nabla", 3))
    with pytest.raises(DomainError):
        os_pdf_random_size(OsSpec(3, uniform(), degenerate("nabla", 3)), 0.5)
    with pytest.raises(DomainError):
        os_pdf_random_size(OsSpec(1.5, uniform(), gamma_delta(2.5, 1.0)), 0.5)


def test_non_strict_conditioning_scales():
    N = geometric("nabla", 0.4)
    a = OsSpec(2, uniform(), N)
    b = OsSpec(2, uniform(), N, strict=False)
    ratio = os_pdf_random_size(a, 0.3) / os_pdf_random_size(b, 0.3)
    assert ratio == pytest.approx(N.sf(1) / N.sf(2), rel=1e-12)


@pytest.mark.parametrize("k,g", [(3.5, 1.5), (4.5, 2.0), (2.5, 0.7), (6.5, 2.5)])
def test_fos_degenerate_is_beta_composition(k, g):
    parent = exponential(2.0)
    spec = OsSpec(g, parent, degenerate("delta", k))
    n = math.ceil(g)
    b = k + 1 - n + 1
    x = parent.quantile(U)
    got = fos_pdf_random_size(spec, x)
    want = np.array([beta_pdf(u, g, b) for u in U]) * parent.pdf(x)
    assert np.max(np.abs(got - want)) < 1e-8


@pytest.mark.parametrize("N", [gamma_delta(2.5, 1.0), gamma_delta(1.5, 0.5), gamma_delta(2.5, 0.5), geometric("delta", 0.4)])
def test_fos_integrates_to_one(N):
    spec = OsSpec(1.5, uniform(), N)
    val, _ = integrate.quad(lambda x: fos_pdf_random_size(spec, x), 0, 1, limit=400)
    assert val == pytest.approx(1, abs=1e-6)


def test_fos_cdf_matches_pdf():
    spec = OsSpec(1.5, uniform(), gamma_delta(2.5, 1.0))
    val, _ = integrate.quad(lambda x: fos_pdf_random_size(spec, x), 0, 0.4)
    assert fos_cdf_random_size(spec, 0.4) == pytest.approx(val, abs=1e-9)


def test_fos_integer_gamma_matches_os_style():
    # gamma = n: Beta(gamma, sigma(k)) mixture, checked on a two-point delta size
    from tsorder.distributions import from_table

    N = from_table("delta", 0.0, [0, 0, 0.5, 0.5])
    spec = OsSpec(2.0, uniform(), N)
    u = np.array([0.1, 0.5, 0.8])
    want = 0.5 * np.array([beta_pdf(x, 2, 2) for x in u]) + 0.5 * np.array([beta_pdf(x, 2, 3) for x in u])
    np.testing.assert_allclose(fos_pdf_random_size(spec, u), want, rtol=1e-10)


def test_fos_excluded_mass():
    spec = OsSpec(1.5, uniform(), gamma_delta(1.5, 1.0))
    ex = fos_excluded_mass(spec)
    assert ex["nonpositive_shape"] == 0
    assert ex["below_gamma"] == pytest.approx(gamma_delta(1.5, 1.0).probs[0])
    with pytest.raises(DomainError):
        OsSpec(1.5, uniform(), gamma_delta(1.5, 1.0), anchor=3)


def test_extremes_degenerate():
    N = degenerate("nabla", 4)
    x = np.linspace(0.05, 0.95, 7)
    np.testing.assert_allclose(extreme_min_sf(N, uniform(), x), (1 - x) ** 3, rtol=1e-12)
    np.testing.assert_allclose(extreme_min_pdf(N, uniform(), x), 3 * (1 - x) ** 2, rtol=1e-12)
    two = degenerate("nabla", 2)
    np.testing.assert_allclose(extreme_max_cdf(two, uniform(), x), x * x, rtol=1e-12)
    np.testing.assert_allclose(extreme_max_pdf(two, uniform(), x), 2 * x, rtol=1e-12)


def test_extremes_against_brute_force():
    N = geometric("nabla", 0.35)
    parent = weibull(2.0)
    x = 0.8
    F = parent.cdf(x)
    k = N.points
    sf = np.sum(N.probs * (1 - F) ** (k - 1))
    cdf = np.sum(N.probs * F**k)
    assert extreme_min_sf(N, parent, x) == pytest.approx(sf, rel=1e-12)
    assert extreme_max_cdf(N, parent, x) == pytest.approx(cdf, rel=1e-12)


def test_extreme_pdfs_integrate():
    N = gamma_nabla(2.0, 0.5)  # P(N=1) > 0 for this law, so use the max
    val, _ = integrate.quad(lambda x: extreme_max_pdf(N, exponential(), x), 0, np.inf, limit=200)
    assert val == pytest.approx(1, abs=1e-6)
    M = degenerate("nabla", 5)
    val, _ = integrate.quad(lambda x: extreme_min_pdf(M, exponential(), x), 0, np.inf, limit=200)
    assert val == pytest.approx(1, abs=1e-6)
    with pytest.raises(DomainError):
        extreme_min_sf(gamma_delta(2.5, 1.0), uniform(), 0.5)


def test_spacings_integer():
    u = np.array([0.1, 0.25, 0.45, 0.7, 0.9])
    assert spacing_operator(u, "nabla", 1, 3) == pytest.approx(0.2)
    assert spacing_operator(u, "nabla", 2, 4) == pytest.approx(0.7 - 2 * 0.45 + 0.25)
    assert spacing_operator(u, "nabla", 1, 1) == pytest.approx(0.1)
    assert spacing_operator(u, "delta", 1, 2) == pytest.approx(0.2)


def test_spacings_iterated():
    u = np.sort(np.random.default_rng(3).uniform(size=9))
    ext = np.concatenate([[0.0], u])
    d = ext.copy()
    for m in range(1, 5):
        d = np.concatenate([[np.nan], np.diff(d)])
        for i in range(m, 10):
            assert spacing_operator(u, "nabla", m, i) == pytest.approx(d[i], abs=1e-14)


def test_spacings_fractional():
    u = np.array([0.1, 0.25, 0.45, 0.7, 0.9])
    from scipy.special import binom

    want = sum((-1) ** j * binom(0.5, j) * u[4 - j - 1] for j in range(3))
    assert spacing_operator(u, "nabla", 0.5, 4) == pytest.approx(want, rel=1e-12)
    # delta: j up to floor(a + i - 1) = 1, position 2.5 - j interpolated; u_0 = 0
    pos = lambda p: np.interp(p, np.arange(6), np.concatenate([[0.0], u]))
    want = sum((-1) ** j * binom(0.5, j) * pos(2.5 - j) for j in range(2))
    assert spacing_operator(u, "delta", 0.5, 2) == pytest.approx(want, rel=1e-12)


def test_spacing_errors():
    u = np.array([0.1, 0.5])
    with pytest.raises(DomainError):
        spacing_operator(u, "nabla", 1, 5)
    with pytest.raises(DomainError):
        spacing_operator(np.array([0.5, 0.1]), "nabla", 1, 1)
    with pytest.raises(ValueError):
        spacing_operator(u, "forward", 1, 1)


def test_quantile_grid():
    assert U.size == 1024 and U[0] == 0.5 / 1024
    assert stats.uniform.ppf(U).max() < 1
