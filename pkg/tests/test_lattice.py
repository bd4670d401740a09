import math

import mpmath as mp
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tsorder.lattice import (
    DomainError,
    LatticePoint,
    delta_exponential,
    falling_factorial,
    generalized_binomial,
    nabla_exponential,
    rho,
    rising_factorial,
    sigma,
    taylor_monomial,
)


def test_jumps():
    assert sigma(2.5) == 3.5
    assert rho(1) == 0


def test_lattice_point():
    assert LatticePoint(3.5, 0.5).index == 3
    with pytest.raises(DomainError):
        LatticePoint(3.2, 0.5)
    with pytest.raises(DomainError):
        LatticePoint(-0.5, 0.5)


@pytest.mark.parametrize("x,k,want", [(1, 5, 120.0), (2.5, 2, 8.75), (7.3, 0, 1.0)])
def test_rising_examples(x, k, want):
    assert rising_factorial(x, k) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("x,k,want", [(5, 5, 120.0), (3, 5, 0.0), (4.2, 0, 1.0)])
def test_falling_examples(x, k, want):
    assert falling_factorial(x, k) == want


def test_factorials_against_mpmath():
    for x, k in [(0.3, 2.7), (12.5, 3.25), (2.0, 80.0), (150.5, 40.5)]:
        assert rising_factorial(x, k) == pytest.approx(float(mp.rf(x, k)), rel=1e-12)
        assert falling_factorial(x, k) == pytest.approx(float(mp.ff(x, k)), rel=1e-12)


def test_falling_negative_gamma_branch():
    # Gamma(x+1-k) at a negative non-integer argument keeps its sign
    assert falling_factorial(0.5, 2.2) == pytest.approx(float(mp.ff(0.5, 2.2)), rel=1e-12)


def test_factorial_domain_errors():
    with pytest.raises(DomainError):
        rising_factorial(-1.0, 2)
    with pytest.raises(DomainError):
        falling_factorial(-2.0, 1)
    with pytest.raises(DomainError):
        falling_factorial(0.5, 2.5)  # Gamma(-1) pole with non-integer x


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10), st.floats(0, 10))
def test_rising_recurrence(x, k):
    assert rising_factorial(x, k + 1) == pytest.approx(rising_factorial(x, k) * (x + k), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10), st.integers(0, 10))
def test_falling_recurrence(x, k):
    lhs = falling_factorial(x, k + 1)
    rhs = falling_factorial(x, k) * (x - k)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_taylor_monomial():
    assert taylor_monomial("delta", 0, 3.3) == 1
    assert taylor_monomial("nabla", 1, 4.5) == pytest.approx(4.5)
    assert taylor_monomial("delta", 2, 4) == 6
    for x in range(3, 12):
        for k in range(0, x + 1):
            assert taylor_monomial("delta", k, x) >= 0
            assert taylor_monomial("nabla", k, x) >= 0


def test_generalized_binomial_sympy():
    a = sympy.Rational(1, 2)
    assert generalized_binomial(0.5, 2) == -0.125
    for j in range(12):
        assert generalized_binomial(0.5, j) == pytest.approx(float(sympy.binomial(a, j)), rel=1e-14)
    for m in range(8):
        for j in range(m + 1):
            assert generalized_binomial(m, j) == math.comb(m, j)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.integers(1, 20))
def test_pascal(a, j):
    lhs = generalized_binomial(a, j)
    rhs = generalized_binomial(a - 1, j - 1) + generalized_binomial(a - 1, j)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12 * max(1.0, abs(rhs)))


def test_exponentials():
    assert delta_exponential(0, 5) == 1
    assert delta_exponential(1, 2) == 8
    assert nabla_exponential(0.3, 1) == 1
    assert nabla_exponential(0.5, 3) == 4
    with pytest.raises(DomainError):
        nabla_exponential(1.0, 2)
    with pytest.raises(DomainError):
        delta_exponential(-1.0, 2)


def test_exponentials_rebuild_gamma_pmfs():
    from oracles import gamma_delta_pmf, gamma_nabla_pmf

    a, b = 2.5, 0.7
    for m in range(6):
        x = a - 1 + m
        direct = falling_factorial(x, a - 1) * b**a / (math.gamma(a) * delta_exponential(b, x))
        assert direct == pytest.approx(float(gamma_delta_pmf(a, b, x)), rel=1e-12)
    a, b = 2.0, 0.5
    for x in range(1, 8):
        direct = rising_factorial(x, a - 1) * b**a / (math.gamma(a) * nabla_exponential(b, x))
        assert direct == pytest.approx(float(gamma_nabla_pmf(a, b, x)), rel=1e-12)
