"""Grid deciders for transform-ratio orders and the classical st/hr/rh/lr orders.

Every decider is a semi-decision on a finite grid: ``holds`` means no
adjacent pair on the grid violates the required monotonicity by more than
the relative tolerance.  Grid densification is available through
:func:`confirm`.
"""

from __future__ import annotations

import json
import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.special import factorial

from ._io import atomic_write
from .distributions import LatticePmf, delta_moment, nabla_moment, pi
from .lattice import DomainError
from .transforms import (
    GRID_SIZE,
    derivative_k,
    fractional_derivative_series,
    laplace,
    psi_density,
    standard_grid,
)

__all__ = [
    "OrderVerdict",
    "GridLaw",
    "MONO_TOL",
    "current_tol",
    "tolerance",
    "TINY",
    "MIN_POINTS",
    "monotonicity_check",
    "ratio_verdict",
    "check_Lt",
    "check_Lt_r",
    "check_r_Lt_r",
    "check_d_i_Lt_r",
    "check_D_i_Lt_r",
    "check_D_gamma_Lt_r",
    "check_classical",
    "pmf_law",
    "xi_law",
    "moment_ratio_series",
    "check_moment_series",
    "confirm",
    "grid_spec",
    "verdicts_to_json",
]

MONO_TOL = 1e-9
_TOL = ContextVar("tsorder_mono_tol", default=MONO_TOL)
TINY = 1e-280
MIN_POINTS = 8
MAX_GRID = 8192

RELATIONS = ("Lt", "Lt-r", "r-Lt-r", "d_i-Lt-r", "D_i-Lt-r", "D_gamma-Lt-r", "st", "hr", "rh", "lr")


def current_tol() -> float:
    """Relative monotonicity tolerance in effect."""
    return _TOL.get()


@contextmanager
def tolerance(rel: float):
    """Run order checks with a different relative tolerance."""
    if not (rel >= 0 and math.isfinite(rel)):
        raise DomainError(f"tolerance must be a finite nonnegative number, got {rel}")
    token = _TOL.set(float(rel))
    try:
        yield
    finally:
        _TOL.reset(token)


def _num(v):
    return None if v is None else float(v)


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of one order check.

    ``witness`` is ``(a1, a2, value1, value2)``: two grid abscissae and the
    compared quantity at each (for pointwise orders a1 == a2 and the values
    are the two functions).
    """

    relation: str
    outcome: str
    witness: tuple | None
    max_violation: float
    grid: dict
    note: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.witness is not None:
            object.__setattr__(self, "witness", tuple(float(v) for v in self.witness))
        object.__setattr__(self, "max_violation", float(self.max_violation))

    @property
    def holds(self) -> bool:
        return self.outcome == "holds"

    @property
    def fails(self) -> bool:
        return self.outcome == "fails"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = None if self.witness is None else [_num(v) for v in self.witness]
        d["max_violation"] = _num(self.max_violation)
        return d


def grid_spec(grid: np.ndarray, kind: str = "custom") -> dict:
    grid = np.asarray(grid, dtype=float)
    return {"kind": kind, "n": int(grid.size), "lo": float(grid[0]), "hi": float(grid[-1])}


@dataclass(frozen=True)
class _Mono:
    outcome: str
    index: int | None
    max_violation: float
    n_valid: int


def monotonicity_check(values, direction: str, tol: float | None = None, valid=None) -> _Mono:
    """Scan adjacent pairs of ``values`` for violations of ``direction``.

    The violation of a pair is its signed step against the direction divided
    by the larger magnitude of the two values.  Points masked out by
    ``valid`` are skipped; fewer than 8 usable points is inconclusive.
    """
    tol = current_tol() if tol is None else tol
    v = np.asarray(values, dtype=float)
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"direction must be increasing or decreasing, got {direction!r}")
    mask = np.ones(v.shape, dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    if np.any(~np.isfinite(v[mask])):
        raise ValueError("non-finite values in monotonicity check")
    idx = np.nonzero(mask)[0]
    if idx.size < MIN_POINTS:
        return _Mono("inconclusive", None, math.nan, int(idx.size))
    a, b = v[idx[:-1]], v[idx[1:]]
    step = (a - b) if direction == "increasing" else (b - a)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        viol = np.where(scale > 0, step / scale, 0.0)
    k = int(np.argmax(viol))
    worst = max(float(viol[k]), 0.0)
    if worst > tol:
        return _Mono("fails", int(idx[k]), worst, int(idx.size))
    return _Mono("holds", None, worst, int(idx.size))


def ratio_verdict(relation, num, den, direction, grid, kind="custom", note="", extra=None) -> OrderVerdict:
    """Monotonicity of num/den over ``grid``; points where either side underflows are excluded."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    valid = (np.abs(num) > TINY) & (np.abs(den) > TINY) & np.isfinite(num) & np.isfinite(den)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(valid, num / np.where(valid, den, 1.0), np.nan)
    m = monotonicity_check(np.where(valid, ratio, 0.0), direction, valid=valid)
    witness = None
    if m.outcome == "fails":
        idx = np.nonzero(valid)[0]
        j = idx[np.searchsorted(idx, m.index) + 1]
        witness = (grid[m.index], grid[j], ratio[m.index], ratio[j])
    excluded = int(grid.size - m.n_valid)
    ex = {"excluded_points": excluded}
    if extra:
        ex.update(extra)
    return OrderVerdict(relation, m.outcome, witness, m.max_violation, grid_spec(grid, kind), note, ex)


def _same_convention(X: LatticePmf, Y: LatticePmf) -> str:
    if X.convention != Y.convention:
        raise DomainError(f"mixed conventions: {X.convention} vs {Y.convention}")
    return X.convention


def _grid(conv, grid, n):
    if grid is None:
        return standard_grid(conv, n), "standard"
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0):
        raise DomainError("grid must be a strictly increasing 1-d array")
    return g, "custom"


def check_Lt(X: LatticePmf, Y: LatticePmf, grid=None, n: int = GRID_SIZE) -> OrderVerdict:
    """X <=_Lt Y: L_X(s) >= L_Y(s) on the grid (relative tolerance)."""
    conv = _same_convention(X, Y)
    g, kind = _grid(conv, grid, n)
    lx, ly = laplace(X)(g), laplace(Y)(g)
    scale = np.maximum(np.abs(lx), np.abs(ly))
    valid = scale > TINY
    with np.errstate(invalid="ignore", divide="ignore"):
        viol = np.where(valid, (ly - lx) / np.where(valid, scale, 1.0), 0.0)
    if valid.sum() < MIN_POINTS:
        return OrderVerdict("Lt", "inconclusive", None, math.nan, grid_spec(g, kind))
    k = int(np.argmax(viol))
    worst = max(float(viol[k]), 0.0)
    if worst > current_tol():
        return OrderVerdict("Lt", "fails", (g[k], g[k], lx[k], ly[k]), worst, grid_spec(g, kind))
    return OrderVerdict("Lt", "holds", None, worst, grid_spec(g, kind))


def check_Lt_r(X: LatticePmf, Y: LatticePmf, grid=None, n: int = GRID_SIZE) -> OrderVerdict:
    """X <=_Lt-r Y: L_X / L_Y increasing."""
    conv = _same_convention(X, Y)
    g, kind = _grid(conv, grid, n)
    return ratio_verdict("Lt-r", laplace(X)(g), laplace(Y)(g), "increasing", g, kind)


def check_r_Lt_r(X: LatticePmf, Y: LatticePmf, grid=None, n: int = GRID_SIZE) -> OrderVerdict:
    """X <=_r-Lt-r Y: (1 - L_X) / (1 - L_Y) increasing."""
    conv = _same_convention(X, Y)
    g, kind = _grid(conv, grid, n)
    return ratio_verdict("r-Lt-r", laplace(X).complement(g), laplace(Y).complement(g), "increasing", g, kind)


def _derivative_values(X: LatticePmf, i, g, lower="all"):
    """|i-th derivative| of the transform: integer termwise, else the fractional series."""
    if float(i).is_integer():
        return np.abs(derivative_k(X, int(i))(g))
    return fractional_derivative_series(X, float(i), lower=lower)(g)


def check_d_i_Lt_r(X: LatticePmf, Y: LatticePmf, i: float, grid=None, n: int = GRID_SIZE) -> OrderVerdict:
    """X <=_d(i)-Lt-r Y: L_Y^(i) / L_X^(i) decreasing.

    Nabla transforms accept integer i only; delta transforms also accept
    real i > 0 through the fractional series.
    """
    conv = _same_convention(X, Y)
    if not i > 0:
        raise DomainError(f"order i must be positive, got {i}")
    if conv == "nabla" and not float(i).is_integer():
        raise DomainError("the differentiated order on nabla transforms needs integer i")
    g, kind = _grid(conv, grid, n)
    return ratio_verdict(
        "d_i-Lt-r", _derivative_values(Y, i, g), _derivative_values(X, i, g), "decreasing", g, kind,
        extra={"i": float(i)},
    )


def check_D_i_Lt_r(N1: LatticePmf, N2: LatticePmf, i: int, grid=None, n: int = GRID_SIZE) -> OrderVerdict:
    """pi_N1^i L_N2^(i) / (pi_N2^i L_N1^(i)) decreasing on (0, 1).

    The pi ratio is a positive constant, so the verdict matches the plain
    d_i order; it is kept for the reported ratio values.
    """
    if N1.convention != "nabla" or N2.convention != "nabla":
        raise DomainError("D_i-Lt-r compares nabla sample-size laws")
    if i < 1 or not float(i).is_integer():
        raise DomainError(f"i must be a positive integer, got {i}")
    p1, p2 = pi(N1, i), pi(N2, i)
    if p1 <= 0 or p2 <= 0:
        raise DomainError(f"zero conditioning probability P(N >= {i})")
    g, kind = _grid("nabla", grid, n)
    num = p1 * np.abs(derivative_k(N2, int(i))(g))
    den = p2 * np.abs(derivative_k(N1, int(i))(g))
    return ratio_verdict(
        "D_i-Lt-r", num, den, "decreasing", g, kind,
        note="constant pi prefactor is monotonicity-neutral", extra={"i": int(i), "pi_ratio": p1 / p2},
    )


def check_D_gamma_Lt_r(
    N1: LatticePmf, N2: LatticePmf, gamma: float, grid=None, n: int = GRID_SIZE, lower: str = "all"
) -> OrderVerdict:
    """pi_N1^g D_g^N2(s) / (pi_N2^g D_g^N1(s)) decreasing on s > 0, D_g the fractional series."""
    if N1.convention != "delta" or N2.convention != "delta":
        raise DomainError("D_gamma-Lt-r compares delta sample-size laws")
    p1, p2 = pi(N1, gamma), pi(N2, gamma)
    if p1 <= 0 or p2 <= 0:
        raise DomainError(f"zero conditioning probability P(N >= {gamma})")
    g, kind = _grid("delta", grid, n)
    num = p1 * fractional_derivative_series(N2, gamma, lower=lower)(g)
    den = p2 * fractional_derivative_series(N1, gamma, lower=lower)(g)
    return ratio_verdict(
        "D_gamma-Lt-r", num, den, "decreasing", g, kind,
        note="constant pi prefactor is monotonicity-neutral", extra={"gamma": float(gamma), "pi_ratio": p1 / p2},
    )


# classical orders ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridLaw:
    """A law tabulated on a grid: density or pmf, cdf and survival."""

    x: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    sf: np.ndarray
    label: str = ""


def pmf_law(X: LatticePmf, upto: float | None = None) -> GridLaw:
    """Tabulate a lattice pmf on its support, optionally cut at ``upto``.

    ``sf`` is P(X > x), ``cdf`` is P(X <= x).
    """
    last = X.last if upto is None else upto
    x = X.offset + np.arange(int(round(last - X.offset)) + 1, dtype=float)
    return GridLaw(x, np.asarray(X.pmf(x)), np.asarray(X.cdf(x)), np.asarray(X.sf(x)), X.label)


def xi_law(X: LatticePmf, grid=None, n: int = GRID_SIZE) -> GridLaw:
    """The mixture variable xi(X) on the transform grid: density psi, survival L, cdf 1 - L."""
    g, _ = _grid(X.convention, grid, n)
    L = laplace(X)
    return GridLaw(g, psi_density(X)(g), L.complement(g), L(g), f"xi({X.label})")


def _common_pmf_laws(X: LatticePmf, Y: LatticePmf) -> tuple[GridLaw, GridLaw]:
    _same_convention(X, Y)
    if abs((X.offset - Y.offset) - round(X.offset - Y.offset)) > 1e-12:
        raise DomainError("support mismatch: lattices are not aligned")
    lo = min(X.offset, Y.offset)
    # beyond a truncated support the pmf is unknown; finite tables are exactly zero there
    open_ends = [Z.last for Z in (X, Y) if Z.tail_mass > 0]
    hi = min(open_ends) if open_ends else max(X.last, Y.last)
    x = lo + np.arange(int(round(hi - lo)) + 1, dtype=float)

    def law(Z):
        return GridLaw(x, np.asarray(Z.pmf(x)), np.asarray(Z.cdf(x)), np.asarray(Z.sf(x)), Z.label)

    return law(X), law(Y)


def _pairwise_ratio_check(relation, f, g, x) -> OrderVerdict:
    """g/f increasing via f(x2) g(x1) <= f(x1) g(x2) for all x1 < x2 (handles zeros)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    active = (f > TINY) | (g > TINY)
    idx = np.nonzero(active)[0]
    if idx.size < 2:
        return OrderVerdict(relation, "inconclusive", None, math.nan, grid_spec(x))
    fa, ga = f[idx], g[idx]
    lhs = np.outer(ga, fa)  # g(x1) f(x2) at [1, 2]
    rhs = lhs.T             # f(x1) g(x2)
    scale = np.maximum(lhs, rhs)
    with np.errstate(invalid="ignore", divide="ignore"):
        viol = np.where(scale > 0, (lhs - rhs) / scale, 0.0)
    viol = np.triu(viol, 1)
    k = int(np.argmax(viol))
    a, b = divmod(k, idx.size)
    worst = max(float(viol[a, b]), 0.0)
    if worst > current_tol():
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = ga[a] / fa[a] if fa[a] > 0 else math.inf
            r2 = ga[b] / fa[b] if fa[b] > 0 else math.inf
        return OrderVerdict(relation, "fails", (x[idx[a]], x[idx[b]], r1, r2), worst, grid_spec(x))
    return OrderVerdict(relation, "holds", None, worst, grid_spec(x))


def check_classical(order: str, f, g) -> OrderVerdict:
    """Classical comparison X <=_order Y, X having law ``f`` and Y law ``g``.

    ``f`` and ``g`` are :class:`GridLaw` tables on a common grid, or two
    lattice pmfs of the same convention.
    st: sf_X <= sf_Y; hr: sf_Y/sf_X increasing; rh: cdf_Y/cdf_X increasing;
    lr: g/f increasing.
    """
    if order not in ("st", "hr", "rh", "lr"):
        raise ValueError(f"unknown classical order {order!r}")
    if isinstance(f, LatticePmf) and isinstance(g, LatticePmf):
        f, g = _common_pmf_laws(f, g)
    if not (isinstance(f, GridLaw) and isinstance(g, GridLaw)):
        raise TypeError("check_classical needs two GridLaw tables or two LatticePmf")
    if f.x.shape != g.x.shape or np.any(np.abs(f.x - g.x) > 1e-12 * np.maximum(1, np.abs(f.x))):
        raise DomainError("support mismatch: laws are tabulated on different grids")
    x = f.x
    if order == "st":
        scale = np.maximum(np.abs(f.sf), np.abs(g.sf))
        with np.errstate(invalid="ignore", divide="ignore"):
            viol = np.where(scale > TINY, (f.sf - g.sf) / scale, 0.0)
        k = int(np.argmax(viol))
        worst = max(float(viol[k]), 0.0)
        if worst > current_tol():
            return OrderVerdict("st", "fails", (x[k], x[k], f.sf[k], g.sf[k]), worst, grid_spec(x))
        return OrderVerdict("st", "holds", None, worst, grid_spec(x))
    a, b = {"hr": (f.sf, g.sf), "rh": (f.cdf, g.cdf), "lr": (f.pdf, g.pdf)}[order]
    if np.all(a > TINY) and np.all(b > TINY):
        return ratio_verdict(order, b, a, "increasing", x, "custom")
    return _pairwise_ratio_check(order, a, b, x)


# moment series ------------------------------------------------------------

K_MAX = 40
SERIES_TAIL_TOL = 1e-9


def _moments(X: LatticePmf, kmax: int) -> np.ndarray:
    m = delta_moment if X.convention == "nabla" else nabla_moment
    return np.array([m(X, k, strict=False) for k in range(kmax + 1)])


def moment_ratio_series(X: LatticePmf, Y: LatticePmf, mode: str = "full", grid=None, kmax: int = K_MAX):
    """Ratio of moment-generated series on the grid points where they converge.

    full: sum_k (-s)^k mu_k / k! for X over the same for Y (the transform
    ratio); tail: the same sums started at k = 1, i.e. (1 - L_X)/(1 - L_Y).
    Moments are those of the stored (truncated) pmfs.  Returns
    ``(s, ratio)`` restricted to the points where the first omitted term is
    below 1e-9 of the partial sum and cancellation stays harmless.
    """
    conv = _same_convention(X, Y)
    if mode not in ("full", "tail"):
        raise ValueError(f"mode must be full or tail, got {mode!r}")
    g, _ = _grid(conv, grid, GRID_SIZE)
    k = np.arange(kmax + 2, dtype=float)
    fact = factorial(k)
    start = 0 if mode == "full" else 1
    keep = np.ones(g.size, dtype=bool)
    sums = []
    for Z in (X, Y):
        mu = _moments(Z, kmax + 1)
        with np.errstate(over="ignore", invalid="ignore"):
            terms = (-g[:, None]) ** k[None, :] * mu[None, :] / fact[None, :]
        head = terms[:, start : kmax + 1]
        total = head.sum(axis=1)
        nxt = np.abs(terms[:, kmax + 1])
        big = np.abs(head).max(axis=1)
        ok = np.isfinite(total) & (nxt < SERIES_TAIL_TOL * np.abs(total)) & (big * 1e-16 < 1e-10 * np.abs(total))
        keep &= ok
        sums.append(-total if mode == "tail" else total)
    s = g[keep]
    return s, sums[0][keep] / sums[1][keep]


def check_moment_series(X: LatticePmf, Y: LatticePmf, mode: str = "full", grid=None, kmax: int = K_MAX) -> OrderVerdict:
    """Lt-r (full) or r-Lt-r (tail) decided from the moment series."""
    s, ratio = moment_ratio_series(X, Y, mode, grid, kmax)
    relation = "Lt-r" if mode == "full" else "r-Lt-r"
    if s.size < MIN_POINTS:
        return OrderVerdict(relation, "inconclusive", None, math.nan, {"kind": "moment", "n": int(s.size)},
                            "moment series does not converge on enough grid points")
    v = ratio_verdict(relation, ratio, np.ones_like(ratio), "increasing", s, "moment")
    return v


# densification and export -------------------------------------------------

def confirm(check: Callable[..., OrderVerdict], *args, start: int = GRID_SIZE, stop: int = MAX_GRID, **kw) -> OrderVerdict:
    """Rerun a standard-grid check with the grid doubled up to ``stop`` points.

    Returns the first failing verdict, otherwise the verdict on the
    densest grid.
    """
    n = start
    v = None
    while n <= stop:
        v = check(*args, n=n, **kw)
        if v.outcome != "holds":
            return v
        n *= 2
    return v


def verdicts_to_json(records, path=None) -> str:
    """Deterministic JSON dump (sorted keys, no timestamps); written atomically if ``path``."""
    rows = [r.to_dict() if isinstance(r, OrderVerdict) else r for r in records]
    text = json.dumps(rows, sort_keys=True, indent=2, allow_nan=True) + "\n"
    if path is not None:
        atomic_write(path, text)
    return text
