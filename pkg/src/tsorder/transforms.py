"""Discrete Laplace transforms of lattice pmfs and the quantities built on them.

Delta pmfs (support N_{alpha-1}) are transformed as E[(1 + s)^(-sigma(X))]
on s > 0, nabla pmfs (support N_1) as E[(1 - s)^(rho(X))] on 0 < s < 1.
All derivatives are taken term by term on the stored series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import betainc, gammaln

from .distributions import LatticePmf, TruncationError
from .lattice import DomainError, falling_factorial_vec, rising_factorial_vec

__all__ = [
    "TransformFn",
    "GRID_SIZE",
    "standard_grid",
    "laplace",
    "derivative_k",
    "fractional_derivative_series",
    "lstar_lstarstar",
    "psi_density",
    "reliability_sequence",
    "reliability_matrix",
    "compound_laplace",
    "SERIES_RTOL",
    "NumericalBreakdown",
]

GRID_SIZE = 512
DELTA_GRID = (1e-4, 1e4)
NABLA_GRID = (1e-4, 1 - 1e-4)
SERIES_RTOL = 1e-8
_BLOCK = 512

DOMAINS = {"delta": (0.0, math.inf), "nabla": (0.0, 1.0)}


class NumericalBreakdown(ArithmeticError):
    """A computed quantity violates a structural property it must have."""


def standard_grid(convention: str, n: int = GRID_SIZE) -> np.ndarray:
    """Evaluation grid: log-spaced on [1e-4, 1e4] (delta), uniform on [1e-4, 1 - 1e-4] (nabla)."""
    if convention == "delta":
        return np.geomspace(*DELTA_GRID, n)
    if convention == "nabla":
        return np.linspace(*NABLA_GRID, n)
    raise DomainError(f"unknown convention {convention!r}")


@dataclass(frozen=True, eq=False)
class TransformFn:
    """A real function of the transform argument with its domain.

    The domain is the open interval of the convention; the endpoints where
    the series still converges (s = 0, and s = 1 for nabla) are accepted
    too so limits can be taken exactly.
    """

    func: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    kind: str
    source: LatticePmf | None = None
    complement_func: Callable[[np.ndarray], np.ndarray] | None = None

    def _check(self, s):
        s = np.asarray(s, dtype=float)
        lo, hi = self.domain
        if np.any(np.isnan(s)) or np.any(s < lo) or np.any(s > hi):
            raise DomainError(f"{self.kind}: argument outside [{lo}, {hi}]")
        return s

    def __call__(self, s):
        s = self._check(s)
        out = self.func(np.atleast_1d(s))
        return float(out[0]) if s.ndim == 0 else out

    def complement(self, s):
        """1 - value, computed without cancellation when the series allows it."""
        s = self._check(s)
        flat = np.atleast_1d(s)
        out = self.complement_func(flat) if self.complement_func is not None else 1.0 - self.func(flat)
        return float(out[0]) if s.ndim == 0 else out


def _log_base(convention: str, s: np.ndarray) -> np.ndarray:
    """log of the per-unit factor: -log(1+s) (delta) or log(1-s) (nabla)."""
    with np.errstate(divide="ignore"):
        return -np.log1p(s) if convention == "delta" else np.log1p(-s)


def _series(X: LatticePmf, coef: np.ndarray, expo: np.ndarray, s: np.ndarray) -> np.ndarray:
    """sum_x p(x) coef(x) base(s)^expo(x), evaluated blockwise in log space."""
    keep = (X.probs > 0) & (coef != 0)
    p = X.probs[keep]
    c = coef[keep]
    e = expo[keep]
    out = np.zeros(s.shape, dtype=float)
    if p.size == 0:
        return out
    sign = np.sign(c)
    logw = np.log(p) + np.log(np.abs(c))
    for lo in range(0, s.size, _BLOCK):
        lb = _log_base(X.convention, s[lo : lo + _BLOCK])[:, None]
        with np.errstate(invalid="ignore"):
            z = e[None, :] * lb
        z = np.where(e[None, :] == 0, 0.0, z)
        out[lo : lo + _BLOCK] = (sign[None, :] * np.exp(logw[None, :] + z)).sum(axis=1)
    return out


def _tail_check(X: LatticePmf, coef_fn, expo_shift: float, s: np.ndarray, values: np.ndarray, what: str):
    """Raise when the truncated tail can move the series by more than SERIES_RTOL."""
    if X.tail_mass == 0 or s.size == 0:
        return
    s0 = float(np.min(s))
    lb = float(_log_base(X.convention, np.array([s0]))[0])
    jump = 1.0 if X.convention == "delta" else -1.0

    def weight(x):
        e = x + jump + expo_shift
        return np.abs(coef_fn(x)) * np.exp(np.where(e == 0, 0.0, e * lb))

    bound = X.tail_weighted_bound(weight)
    ref = float(np.abs(values[np.argmin(s)]))
    if bound > SERIES_RTOL * ref:
        raise TruncationError(
            f"{what} of {X.label}: tail bound {bound:.3g} exceeds {SERIES_RTOL:g} of value {ref:.3g} at s={s0:g}"
        )


def laplace(X: LatticePmf) -> TransformFn:
    """Delta or nabla discrete Laplace transform of ``X``."""
    expo = X.jumps
    ones = np.ones_like(expo)

    def f(s):
        return _series(X, ones, expo, s)

    def comp(s):
        # 1 - L(s) = sum p (1 - base^e); the cut tail would add at most tail_mass
        keep = X.probs > 0
        e = expo[keep]
        p = X.probs[keep]
        out = np.empty(s.shape)
        for lo in range(0, s.size, _BLOCK):
            lb = _log_base(X.convention, s[lo : lo + _BLOCK])[:, None]
            with np.errstate(invalid="ignore"):
                z = np.where(e[None, :] == 0, 0.0, e[None, :] * lb)
            out[lo : lo + _BLOCK] = (-np.expm1(z) * p[None, :]).sum(axis=1)
        return out

    return TransformFn(f, DOMAINS[X.convention], "laplace", X, comp)


def _require_laplace(T) -> LatticePmf:
    if isinstance(T, LatticePmf):
        return T
    if not isinstance(T, TransformFn) or T.kind != "laplace" or T.source is None:
        raise DomainError("expected a Laplace transform of a lattice pmf")
    return T.source


def _derivative_coef(X: LatticePmf, i: int):
    if X.convention == "nabla":
        return lambda x: falling_factorial_vec(x - 1.0, i)
    return lambda x: rising_factorial_vec(x + 1.0, i)


def derivative_k(T, i: int, check_tail: bool = True) -> TransformFn:
    """i-th derivative of a discrete Laplace transform, term by term (signed).

    Nabla: (-1)^i sum rho(k)^(i, falling) (1-t)^(rho(k)-i) P(k).
    Delta: (-1)^i sum sigma(x)^(i, rising) (1+t)^(-sigma(x)-i) P(x).
    """
    X = _require_laplace(T)
    if i < 0 or int(i) != i:
        raise DomainError(f"derivative order must be a nonnegative integer, got {i}")
    i = int(i)
    coef_fn = _derivative_coef(X, i)
    coef = coef_fn(X.points)
    if X.convention == "nabla":
        expo = X.jumps - i
        shift = -i
    else:
        expo = X.jumps + i
        shift = i
    sgn = -1.0 if i % 2 else 1.0

    def f(s):
        vals = _series(X, coef, expo, s)
        if check_tail:
            _tail_check(X, coef_fn, shift, s, vals, f"derivative {i}")
        return sgn * vals

    return TransformFn(f, DOMAINS[X.convention], f"derivative({i})", X)


def fractional_derivative_series(X: LatticePmf, gamma: float, lower: str = "all", check_tail: bool = True) -> TransformFn:
    """Real series sum sigma(k)^(gamma, rising) (1+t)^(-sigma(k)-gamma) P(k) of a delta pmf.

    This is (-1)^gamma times the order-gamma derivative of the delta
    transform; the unit-modulus prefactor is never formed.  ``lower="all"``
    sums over the whole support (agrees with the integer derivatives);
    ``lower="gamma"`` keeps only support points k >= gamma.
    """
    if X.convention != "delta":
        raise DomainError("the fractional derivative series is defined for delta pmfs")
    if not gamma > 0:
        raise DomainError(f"fractional order must be positive, got {gamma}")
    if lower not in ("all", "gamma"):
        raise ValueError(f"lower must be 'all' or 'gamma', got {lower!r}")
    mask = np.ones(len(X), dtype=bool) if lower == "all" else X.points >= gamma - 1e-12
    if not np.any(mask & (X.probs > 0)):
        raise DomainError(f"no support mass at or above gamma={gamma}")

    def coef_fn(x):
        return rising_factorial_vec(x + 1.0, gamma)

    coef = np.where(mask, coef_fn(X.points), 0.0)
    expo = X.jumps + gamma

    def f(s):
        vals = _series(X, coef, expo, s)
        if check_tail:
            _tail_check(X, coef_fn, gamma, s, vals, f"fractional series {gamma:g}")
        return vals

    return TransformFn(f, DOMAINS["delta"], f"fractional({gamma:g})", X)


def _lattice_offset(X: LatticePmf, offset) -> float:
    """Offset of the delta lattice X is viewed on; defaults to its own."""
    if X.convention != "delta" or offset is None:
        return X.offset if X.convention == "delta" else 0.0
    shift = X.offset - float(offset)
    if shift < -1e-12 or abs(shift - round(shift)) > 1e-9:
        raise DomainError(f"{X.label} does not live on the lattice with offset {offset:g}")
    return float(offset)


def lstar_lstarstar(X: LatticePmf, offset: float | None = None) -> tuple[TransformFn, TransformFn]:
    """Transforms of the cdf and of the survival function of ``X``.

    Delta: L / (s (1+s)^(alpha-1)) and (1 - L) / (s (1+s)^(alpha-1)),
    alpha - 1 being the lattice offset (the pmf's own unless ``offset`` puts
    X on a coarser-started common lattice).  Nabla: L / s and (1 - L) / s.
    """
    L = laplace(X)
    c = _lattice_offset(X, offset)

    def scale(s):
        return s * (1.0 + s) ** c

    def star(s):
        return L.func(s) / scale(s)

    def starstar(s):
        return L.complement_func(s) / scale(s)

    dom = (math.nextafter(0.0, 1.0), DOMAINS[X.convention][1])
    return TransformFn(star, dom, "lstar", X), TransformFn(starstar, dom, "lstarstar", X)


def psi_density(X: LatticePmf) -> TransformFn:
    """psi_X = -L'_X, the density of the mixture variable xi(X).

    On the nabla domain it integrates to 1 - P(X = 1); atoms at 1 do not
    contribute to the continuous part.
    """
    d1 = derivative_k(X, 1)

    def f(s):
        return -d1.func(s)

    return TransformFn(f, DOMAINS[X.convention], "psi", X)


def compound_laplace(N: LatticePmf, X: LatticePmf) -> TransformFn:
    """Nabla transform of the random lattice sum of N copies of X.

    L_X(s) * L_N(1 - L_X(s)), the random-sum identity for rho-additive sums.
    """
    if N.convention != "nabla" or X.convention != "nabla":
        raise DomainError("compound transform needs nabla N and X")
    LN, LX = laplace(N), laplace(X)

    def f(s):
        lx = LX.func(s)
        return lx * LN.func(np.clip(LX.complement_func(s), 0.0, 1.0))

    return TransformFn(f, DOMAINS["nabla"], "laplace", None)


def _nb_tail_nabla(X: LatticePmf, s: float, nmax: int) -> np.ndarray:
    """R(1..nmax) for a nabla pmf by differentiating the geometric-sum series.

    (1 - L(s)) / s = sum_j (1 - s)^j S(j), S(j) = P(rho(X) > j); the
    (n-1)-th derivative is taken term by term.
    """
    j = np.arange(0, len(X) - 1, dtype=float)
    # S(j) = P(rho(X) > j) = mass strictly beyond point j + 1, tail included
    S = np.cumsum(X.probs[::-1])[::-1][1:] + X.tail_mass
    out = np.zeros(nmax)
    if j.size == 0 or s == 0:
        return out
    ls, l1s = math.log(s), math.log1p(-s) if s < 1 else -math.inf
    for n in range(1, nmax + 1):
        m = n - 1
        jj = j[j >= m]
        if jj.size == 0:
            break
        Sj = S[j >= m]
        # s^n/(n-1)! * j^(m, falling) (1-s)^(j-m) = s * C(j, m) s^m (1-s)^(j-m)
        logc = gammaln(jj + 1) - gammaln(m + 1) - gammaln(jj - m + 1)
        with np.errstate(invalid="ignore"):
            z = np.where(jj - m == 0, 0.0, (jj - m) * l1s)
        out[m] = float(np.sum(Sj * np.exp(logc + n * ls + z)))
    return out


def _nb_tail_delta(X: LatticePmf, s: float, nmax: int, c: float) -> np.ndarray:
    """R(1..nmax) for a delta pmf by the Leibniz rule on (1+s)^(-c) (1 - L(s)) / s.

    With eta = s / (1 + s) (all terms nonnegative when c >= 0):
    R(n) = sum_{j<n} c^(j, rising)/j! eta^j (1-eta)^c  E[I_eta(n - j, sigma(X))].
    """
    eta = s / (1.0 + s)
    keep = X.probs > 0
    sig = X.jumps[keep]
    p = X.probs[keep]
    n = np.arange(1, nmax + 1, dtype=float)
    # E[I_eta(m, sigma)] for m = 1..nmax
    ib = betainc(n[:, None], sig[None, :], eta) @ p
    ib = ib + X.tail_mass  # truncated atoms only push mass upward
    ib = np.minimum(ib, 1.0)
    # w[j] = c^(j, rising)/j! eta^j (1-eta)^c by recurrence, so negative c keeps its signs
    w = np.empty(nmax)
    w[0] = (1.0 - eta) ** c
    for j in range(1, nmax):
        w[j] = w[j - 1] * (c + j - 1) / j * eta
    out = np.zeros(nmax)
    for k in range(nmax):
        # R(k+1) = sum_{j=0}^{k} w[j] ib[k - j]
        out[k] = float(np.dot(w[: k + 1], ib[k::-1]))
    return out


def reliability_sequence(
    X: LatticePmf, s: float, nmax: int, strict: bool = True, offset: float | None = None
) -> np.ndarray:
    """R_s^X(0..nmax) from the derivatives of the survival transform.

    R(0) = 1 and R(n) = (-1)^(n-1) s^n / (n-1)! d^(n-1)/ds^(n-1) L**(s).
    ``offset`` selects the delta lattice as in :func:`lstar_lstarstar`.
    With ``strict`` a sequence that increases in n by more than 1e-9 or
    leaves [0, 1] raises :class:`NumericalBreakdown`.
    """
    lo, hi = DOMAINS[X.convention]
    if not lo < s < hi:
        raise DomainError(f"s={s} outside the {X.convention} domain")
    if not 1 <= nmax <= 64:
        raise DomainError("nmax must lie in 1..64")
    if X.convention == "nabla":
        body = _nb_tail_nabla(X, s, nmax)
    else:
        body = _nb_tail_delta(X, s, nmax, _lattice_offset(X, offset))
    R = np.concatenate([[1.0], body])
    if strict:
        inc = np.diff(R)
        if np.any(inc > 1e-9) or np.any(R < -1e-12) or np.any(R > 1 + 1e-9):
            k = int(np.argmax(inc))
            raise NumericalBreakdown(
                f"reliability sequence of {X.label} at s={s:g} is not a survival sequence "
                f"(R({k + 1}) - R({k}) = {inc[k]:.3g})"
            )
    return R


def reliability_matrix(X: LatticePmf, s_grid, nmax: int, offset: float | None = None) -> np.ndarray:
    """R_s^X(n) for s on a grid (rows) and n = 0..nmax (columns), no checks."""
    rows = [reliability_sequence(X, float(s), nmax, strict=False, offset=offset) for s in np.asarray(s_grid)]
    return np.vstack(rows)
