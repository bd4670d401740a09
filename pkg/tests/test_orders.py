import json

import numpy as np
import pytest
import sympy
from scipy import stats

from tsorder.distributions import degenerate, from_table, gamma_delta, gamma_nabla, geometric
from tsorder.lattice import DomainError
from tsorder.montecarlo import TABLE_A, TABLE_B, standard_battery
from tsorder.orders import (
    GridLaw,
    check_classical,
    check_D_gamma_Lt_r,
    check_D_i_Lt_r,
    check_d_i_Lt_r,
    check_Lt,
    check_Lt_r,
    check_moment_series,
    check_r_Lt_r,
    confirm,
    current_tol,
    monotonicity_check,
    moment_ratio_series,
    pmf_law,
    ratio_verdict,
    tolerance,
    verdicts_to_json,
    xi_law,
)
from tsorder.transforms import laplace, standard_grid


def _table(probs):
    arr = np.zeros(max(probs))
    for k, p in probs.items():
        arr[k - 1] = p
    return from_table("nabla", 1, arr)


def _sympy_monotone(expr, s, grid, direction):
    """Sign of d/ds expr on the grid (the closed-form ratio oracle)."""
    d = sympy.lambdify(s, sympy.diff(expr, s), "numpy")(grid)
    return bool(np.all(d >= 0)) if direction == "increasing" else bool(np.all(d <= 0))


def test_geometric_lt_r_closed_form():
    s = sympy.symbols("s")
    g = standard_grid("nabla")
    for p1, p2 in [(0.7, 0.3), (0.3, 0.7), (0.5, 0.3)]:
        L1 = sympy.Float(p1) / (p1 + (1 - p1) * s)
        L2 = sympy.Float(p2) / (p2 + (1 - p2) * s)
        want = _sympy_monotone(L1 / L2, s, g, "increasing")
        v = check_Lt_r(geometric("nabla", p1), geometric("nabla", p2))
        assert v.holds == want
    assert check_Lt_r(geometric("nabla", 0.7), geometric("nabla", 0.3)).holds


def test_d1_lt_r_closed_form():
    s = sympy.symbols("s")
    g = standard_grid("nabla")
    for p1, p2 in [(0.7, 0.3), (0.3, 0.7)]:
        d1 = sympy.diff(sympy.Float(p1) / (p1 + (1 - p1) * s), s)
        d2 = sympy.diff(sympy.Float(p2) / (p2 + (1 - p2) * s), s)
        want = _sympy_monotone(d2 / d1, s, g, "decreasing")
        assert check_d_i_Lt_r(geometric("nabla", p1), geometric("nabla", p2), 1).holds == want


def test_reflexive():
    X = gamma_nabla(2.0, 0.3)
    for check in (check_Lt, check_Lt_r, check_r_Lt_r):
        assert check(X, X).holds
    assert check_d_i_Lt_r(X, X, 2).holds
    Y = gamma_delta(2.5, 0.5)
    assert check_d_i_Lt_r(Y, Y, 1.5).holds
    assert check_D_gamma_Lt_r(Y, Y, 1.5).holds
    for order in ("st", "hr", "rh", "lr"):
        assert check_classical(order, X, X).holds


def test_table_fixtures():
    a, b = _table(TABLE_A), _table(TABLE_B)
    assert check_Lt(a, b).holds
    v = check_Lt_r(a, b)
    assert v.fails and 1e-3 < v.max_violation < 2e-3
    assert v.witness[0] < v.witness[1]
    assert check_r_Lt_r(a, b).holds


def test_witness_is_a_real_violation():
    a, b = _table(TABLE_A), _table(TABLE_B)
    v = check_Lt_r(a, b)
    s1, s2, r1, r2 = v.witness
    assert laplace(a)(s1) / laplace(b)(s1) == pytest.approx(r1)
    assert r2 < r1


def test_tolerance_override():
    a, b = _table(TABLE_A), _table(TABLE_B)
    assert current_tol() == 1e-9
    with tolerance(1e-2):
        assert current_tol() == 1e-2
        assert check_Lt_r(a, b).holds
    assert check_Lt_r(a, b).fails
    with pytest.raises(DomainError):
        with tolerance(-1):
            pass


def test_monotonicity_check_edges():
    assert monotonicity_check(np.arange(5.0), "increasing").outcome == "inconclusive"
    assert monotonicity_check(np.arange(10.0), "increasing").outcome == "holds"
    m = monotonicity_check(np.arange(10.0)[::-1], "increasing")
    assert m.outcome == "fails" and 0 <= m.index < 9
    with pytest.raises(ValueError):
        monotonicity_check(np.array([1.0, np.nan] * 5), "increasing")
    with pytest.raises(ValueError):
        monotonicity_check(np.arange(10.0), "up")


def test_underflow_points_are_excluded():
    g = np.linspace(0, 1, 20)
    num = np.where(g < 0.5, 1e-300, g + 1)
    v = ratio_verdict("x", num, np.ones_like(g), "increasing", g)
    assert v.holds and v.extra["excluded_points"] == 10


def test_lt_fails_for_crossing_transforms():
    # degenerate at 2 against geometric(0.3): the transforms cross
    v = check_Lt(degenerate("nabla", 2), geometric("nabla", 0.3))
    assert v.fails


def test_classical_on_pmfs():
    X, Y = geometric("nabla", 0.7), geometric("nabla", 0.3)
    for order in ("st", "hr", "rh", "lr"):
        assert check_classical(order, X, Y).holds
        assert check_classical(order, Y, X).fails


def test_classical_with_zeros():
    two, five = degenerate("nabla", 2), degenerate("nabla", 5)
    assert check_classical("lr", two, five).holds
    assert check_classical("lr", five, two).fails
    assert check_classical("st", two, five).holds


def test_classical_on_densities():
    x = np.linspace(0.01, 10, 400)
    f, g = stats.expon(scale=0.5), stats.expon(scale=1.0)
    law = lambda d: GridLaw(x, d.pdf(x), d.cdf(x), d.sf(x))
    for order in ("st", "hr", "rh", "lr"):
        assert check_classical(order, law(f), law(g)).holds
    with pytest.raises(DomainError):
        check_classical("lr", law(f), GridLaw(x + 1, g.pdf(x), g.cdf(x), g.sf(x)))
    with pytest.raises(ValueError):
        check_classical("icx", law(f), law(g))


def test_mixed_conventions_rejected():
    with pytest.raises(DomainError):
        check_Lt(geometric("nabla", 0.5), geometric("delta", 0.5))
    with pytest.raises(DomainError):
        check_classical("st", degenerate("delta", 0.5), degenerate("delta", 1.0))


def test_pmf_law_truncated_support():
    X = geometric("nabla", 0.5)
    law = pmf_law(X, upto=4)
    np.testing.assert_allclose(law.pdf, [0.5, 0.25, 0.125, 0.0625])


def test_xi_law_links_lt_and_st():
    bat = standard_battery()["nabla"][:6]
    for X in bat:
        for Y in bat:
            lt = check_Lt(X, Y)
            st = check_classical("st", xi_law(Y), xi_law(X))
            assert lt.outcome == st.outcome


def test_d_i_checks_validate():
    X, Y = geometric("nabla", 0.5), geometric("nabla", 0.3)
    with pytest.raises(DomainError):
        check_d_i_Lt_r(X, Y, 1.5)
    with pytest.raises(DomainError):
        check_d_i_Lt_r(X, Y, 0)
    with pytest.raises(DomainError):
        check_D_i_Lt_r(degenerate("nabla", 1), Y, 2)
    v = check_D_i_Lt_r(Y, X, 1)
    assert v.outcome == check_d_i_Lt_r(Y, X, 1).outcome


def test_moment_series_agrees_with_transform():
    delta = standard_battery()["delta"]
    for X in delta:
        for Y in delta:
            if X is Y:
                continue
            for mode, check in (("full", check_Lt_r), ("tail", check_r_Lt_r)):
                ms = check_moment_series(X, Y, mode)
                s, ratio = moment_ratio_series(X, Y, mode)
                assert ms.outcome == check(X, Y, grid=s).outcome


def test_confirm_densifies():
    X, Y = geometric("nabla", 0.7), geometric("nabla", 0.3)
    v = confirm(check_Lt_r, X, Y)
    assert v.holds and v.grid["n"] == 8192
    a, b = _table(TABLE_A), _table(TABLE_B)
    assert confirm(check_Lt_r, a, b).grid["n"] == 512


def test_verdict_json_deterministic(tmp_path):
    X, Y = geometric("nabla", 0.7), geometric("nabla", 0.3)
    vs = [check_Lt_r(X, Y), check_Lt_r(Y, X)]
    path = tmp_path / "v.json"
    text = verdicts_to_json(vs, path)
    assert path.read_text() == text == verdicts_to_json(vs)
    rows = json.loads(text)
    assert rows[1]["outcome"] == "fails" and len(rows[1]["witness"]) == 4
