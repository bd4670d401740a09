import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gamma_delta_pmf, gamma_nabla_pmf
from tsorder.distributions import (
    LatticePmf,
    TruncationError,
    degenerate,
    delta_moment,
    from_table,
    gamma_delta,
    gamma_nabla,
    geometric,
    lattice_sum,
    nabla_moment,
    pi,
    read_csv,
    write_csv,
)
from tsorder.lattice import DomainError

DELTA_PARAMS = [(1.5, 0.5), (1.5, 1.0), (2.5, 0.5), (2.5, 1.0)]
NABLA_PARAMS = [(a, b) for a in (1.0, 2.0, 3.5) for b in (0.3, 0.6)]


@pytest.mark.parametrize("a,b", DELTA_PARAMS)
def test_gamma_delta_normalized(a, b):
    X = gamma_delta(a, b)
    assert abs(X.probs.sum() - 1) < 1e-10
    assert X.tail_mass <= 1e-12
    assert X.offset == a - 1


@pytest.mark.parametrize("a,b", NABLA_PARAMS)
def test_gamma_nabla_normalized(a, b):
    X = gamma_nabla(a, b)
    assert abs(X.probs.sum() - 1) < 1e-10
    assert X.tail_mass <= 1e-12


def test_gamma_delta_against_200_digit_oracle():
    X = gamma_delta(2.5, 0.7)
    for m in range(0, 40, 3):
        x = 1.5 + m
        assert X.pmf(x) == pytest.approx(float(gamma_delta_pmf(2.5, 0.7, x)), rel=1e-12)


def test_gamma_nabla_against_200_digit_oracle():
    X = gamma_nabla(3.5, 0.3)
    for x in range(1, 60, 4):
        assert X.pmf(x) == pytest.approx(float(gamma_nabla_pmf(3.5, 0.3, x)), rel=1e-12)


def test_gamma_nabla_small_values():
    X = gamma_nabla(2.0, 0.5)
    np.testing.assert_allclose(X.pmf([1, 2, 3]), [0.25, 0.25, 0.1875], rtol=1e-14)


def test_reductions_to_geometric():
    d = gamma_delta(1.0, 1.0)
    x = np.arange(0, 20)
    np.testing.assert_allclose(d.pmf(x), 2.0 ** -(x + 1.0), rtol=1e-13)
    for p in (0.3, 0.5, 0.7):
        g = geometric("nabla", p)
        n = min(len(g), len(gamma_nabla(1.0, p)))
        np.testing.assert_allclose(g.probs[:n], gamma_nabla(1.0, p).probs[:n], atol=1e-12)
        gd = geometric("delta", p)
        ref = gamma_delta(1.0, p / (1 - p))
        n = min(len(gd), len(ref))
        np.testing.assert_allclose(gd.probs[:n], ref.probs[:n], atol=1e-12)


def test_geometric_simple():
    g = geometric("nabla", 0.5)
    assert g.pmf(1) == 0.5 and g.pmf(2) == 0.25
    assert geometric("delta", 0.5).pmf(0) == 0.5


def test_tail_bound_is_a_bound():
    X = gamma_nabla(3.5, 0.3, eps=1e-6)
    exact_tail = 1 - float(mp.fsum(gamma_nabla_pmf(3.5, 0.3, x, dps=30) for x in range(1, len(X) + 1)))
    assert 0 <= exact_tail <= X.tail_mass * (1 + 1e-6)


def test_parameter_errors():
    with pytest.raises(DomainError):
        gamma_delta(0, 1)
    with pytest.raises(DomainError):
        gamma_nabla(1, 1.0)
    with pytest.raises(DomainError):
        geometric("nabla", 0)
    with pytest.raises(DomainError):
        gamma_nabla(1, 0.5, eps=0)


def test_from_table():
    d = from_table("nabla", 1, [0, 0, 0, 1])
    assert d.pmf(4) == 1
    two = from_table("nabla", 2, [0.5, 0, 0, 0.5])
    assert two.pmf(2) == 0.5 and two.pmf(5) == 0.5 and two.pmf(1) == 0
    with pytest.raises(DomainError):
        from_table("nabla", 1, [-0.1, 1.1])
    with pytest.raises(DomainError):
        from_table("nabla", 1, [])
    with pytest.raises(DomainError):
        from_table("nabla", 1, [0.2, 0.2])
    assert from_table("nabla", 1, [0.2, 0.2], normalize=True).pmf(1) == 0.5


def test_invariants_rejected():
    with pytest.raises(DomainError):
        LatticePmf("nabla", 0.0, [1.0])
    with pytest.raises(DomainError):
        LatticePmf("delta", 0.5, [0.5, 0.4])


def test_degenerate():
    d = degenerate("delta", 2.5)
    assert d.offset == 0.5 and d.pmf(2.5) == 1
    assert degenerate("nabla", 3).cdf(2) == 0 and degenerate("nabla", 3).cdf(3) == 1


def test_cdf_sf():
    g = geometric("nabla", 0.4)
    assert g.cdf(3) == pytest.approx(1 - 0.6**3, rel=1e-12)
    assert g.sf(3) == pytest.approx(0.6**3, rel=1e-10)
    assert g.cdf(0.5) == 0


def test_moments_closed_forms():
    # geometric trials: E[rho] = q/p, E[rho(rho-1)] = 2 q^2/p^2
    g = geometric("nabla", 0.3, eps=1e-16)
    q, p = 0.7, 0.3
    assert delta_moment(g, 1) == pytest.approx(q / p, rel=1e-10)
    assert delta_moment(g, 2) == pytest.approx(2 * q**2 / p**2, rel=1e-10)
    # delta gamma: sigma(x) = alpha + m with m negative binomial of mean alpha/beta
    X = gamma_delta(2.5, 0.5, eps=1e-16)
    assert nabla_moment(X, 1) == pytest.approx(2.5 + 2.5 / 0.5, rel=1e-10)


def test_moments_against_mpmath_series():
    a, b = 1.5, 1.0
    X = gamma_delta(a, b, eps=1e-16)
    with mp.workdps(30):
        ref = mp.nsum(lambda m: mp.rf(a + m, 3) * gamma_delta_pmf(a, b, a - 1 + m, dps=30), [0, mp.inf])
    assert nabla_moment(X, 3) == pytest.approx(float(ref), rel=1e-9)


def test_moment_truncation_error():
    with pytest.raises(TruncationError):
        delta_moment(gamma_nabla(3.5, 0.3, eps=1e-6), 4)
    assert delta_moment(gamma_nabla(3.5, 0.3, eps=1e-6), 4, strict=False) > 0


def test_moment_convention_errors():
    with pytest.raises(DomainError):
        nabla_moment(geometric("nabla", 0.5), 1)
    with pytest.raises(DomainError):
        delta_moment(gamma_delta(2, 1), 1)


def test_pi():
    d = from_table("nabla", 1, [0.2, 0.3, 0.5])
    assert pi(d, 2) == pytest.approx(0.8)
    assert pi(d, 4) == 0


def test_lattice_sum_matches_direct_convolution():
    X = from_table("nabla", 1, [0.2, 0.3, 0.5])
    Y = from_table("nabla", 1, [0.6, 0.4])
    Z = lattice_sum(X, Y)
    brute = {}
    for x, px in zip(X.points, X.probs):
        for y, py in zip(Y.points, Y.probs):
            brute[x + y - 1] = brute.get(x + y - 1, 0) + px * py
    for z, p in brute.items():
        assert Z.pmf(z) == pytest.approx(p, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=1, max_size=12))
def test_table_normalization_property(w):
    X = from_table("nabla", 1, w, normalize=True)
    assert abs(X.probs.sum() + X.tail_mass - 1) <= 1e-9
    assert np.all(np.diff(X.cdf(X.points)) >= -1e-15)


def test_csv_round_trip(tmp_path):
    for X in (gamma_delta(2.5, 0.5), geometric("nabla", 0.3), from_table("nabla", 1, [0.25, 0.75], label="t")):
        path = tmp_path / "x.csv"
        write_csv(X, path)
        Y = read_csv(path)
        assert Y.convention == X.convention and Y.offset == X.offset
        assert np.array_equal(Y.probs, X.probs)
        assert Y.tail_mass == X.tail_mass and Y.tail_ratio == X.tail_ratio
        assert Y.label == X.label


def test_read_bare_csv(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("x,p\n2,0.5\n5,0.5\n")
    Y = read_csv(path, "nabla")
    assert Y.pmf(5) == 0.5 and math.isclose(Y.probs.sum(), 1)
    with pytest.raises(DomainError):
        read_csv(path)
