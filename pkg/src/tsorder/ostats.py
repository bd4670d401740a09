"""Order statistics and fractional order statistics under a random sample size.

A nabla sample-size variable N draws a sample of rho(N) = N - 1 parent
variates; the i-th order statistic density mixes the classical densities
through the derivatives of the nabla transform of N.  The fractional case
uses a delta sample-size variable and Beta(gamma, .) compositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import betainc, gammaln

from ._io import write_csv
from .distributions import LatticePmf, pi
from .lattice import DomainError, generalized_binomial
from .transforms import derivative_k, laplace

__all__ = [
    "ContinuousDist",
    "uniform",
    "exponential",
    "weibull",
    "OsSpec",
    "quantile_grid",
    "os_pdf_random_size",
    "os_cdf_random_size",
    "fos_pdf_random_size",
    "fos_cdf_random_size",
    "fos_excluded_mass",
    "extreme_min_sf",
    "extreme_min_pdf",
    "extreme_max_cdf",
    "extreme_max_pdf",
    "spacing_operator",
    "curve_to_csv",
]

QGRID_SIZE = 1024


@dataclass(frozen=True, eq=False)
class ContinuousDist:
    """Absolutely continuous parent law backed by a frozen scipy distribution."""

    dist: object
    label: str

    def pdf(self, x):
        return self.dist.pdf(x)

    def cdf(self, x):
        return self.dist.cdf(x)

    def sf(self, x):
        return self.dist.sf(x)

    def quantile(self, u):
        return self.dist.ppf(u)

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.dist.support()
        return float(lo), float(hi)


def uniform(a: float = 0.0, b: float = 1.0) -> ContinuousDist:
    if not b > a:
        raise DomainError("uniform needs a < b")
    return ContinuousDist(stats.uniform(loc=a, scale=b - a), f"uniform({a:g},{b:g})")


def exponential(rate: float = 1.0) -> ContinuousDist:
    if not rate > 0:
        raise DomainError("exponential rate must be positive")
    return ContinuousDist(stats.expon(scale=1.0 / rate), f"exponential({rate:g})")


def weibull(shape: float, scale: float = 1.0) -> ContinuousDist:
    if not (shape > 0 and scale > 0):
        raise DomainError("weibull shape and scale must be positive")
    return ContinuousDist(stats.weibull_min(shape, scale=scale), f"weibull({shape:g},{scale:g})")


def quantile_grid(n: int = QGRID_SIZE) -> np.ndarray:
    """Midpoints u = (k + 1/2)/n of a uniform partition of (0, 1)."""
    return (np.arange(n) + 0.5) / n


@dataclass(frozen=True, eq=False)
class OsSpec:
    """Order-statistic problem: index, parent law and sample-size law.

    A nabla ``size_dist`` selects the integer case (index i); a delta one
    selects the fractional case (index gamma, anchor n = ceil(gamma)).
    ``strict`` conditions the integer case on N >= i + 1, the event on
    which a sample of rho(N) variates has an i-th order statistic; with
    ``strict=False`` the conditioning probability is P(N >= i).
    """

    index: float
    parent: ContinuousDist
    size_dist: LatticePmf
    anchor: int | None = None
    strict: bool = True

    def __post_init__(self):
        if self.size_dist.convention == "nabla":
            if self.index < 1 or not float(self.index).is_integer():
                raise DomainError(f"order-statistic index must be a positive integer, got {self.index}")
            if self.anchor is not None:
                raise DomainError("the anchor n applies to the fractional case only")
        else:
            if not self.index > 0:
                raise DomainError(f"fractional index must be positive, got {self.index}")
            n = math.ceil(self.index)
            if self.anchor is None:
                object.__setattr__(self, "anchor", n)
            elif not (self.anchor - 1 < self.index <= self.anchor):
                raise DomainError(f"anchor n={self.anchor} must satisfy n - 1 < gamma <= n")

    @property
    def fractional(self) -> bool:
        return self.size_dist.convention == "delta"

    @property
    def conditioning(self) -> float:
        """The conditioning probability pi."""
        if self.fractional:
            return pi(self.size_dist, self.index)
        i = int(self.index)
        return pi(self.size_dist, i + 1 if self.strict else i)


def _integer(spec: OsSpec) -> int:
    if spec.fractional:
        raise DomainError("integer order-statistic formula needs a nabla sample size")
    p = spec.conditioning
    if p <= 0:
        raise DomainError(f"no sample-size mass where the {int(spec.index)}-th order statistic exists")
    return int(spec.index)


def os_pdf_random_size(spec: OsSpec, x):
    """Density of the i-th order statistic of a sample of random size rho(N).

    (-1)^i F^(i-1) f M^(i)(F) / (pi (i-1)!), M the nabla transform of N.
    """
    i = _integer(spec)
    x = np.asarray(x, dtype=float)
    F = np.clip(spec.parent.cdf(x), 0.0, 1.0)
    f = spec.parent.pdf(x)
    M = derivative_k(spec.size_dist, i)(np.atleast_1d(F)).reshape(F.shape)
    val = (-1.0) ** i * M * F ** (i - 1) * f / (spec.conditioning * math.factorial(i - 1))
    return float(val) if val.ndim == 0 else val


def os_cdf_random_size(spec: OsSpec, x):
    """Mixture of the conditional binomial-sum cdfs P(Bin(rho(k), F) >= i) over N."""
    i = _integer(spec)
    N = spec.size_dist
    x = np.asarray(x, dtype=float)
    F = np.clip(np.atleast_1d(spec.parent.cdf(x)), 0.0, 1.0)
    rho = N.jumps
    keep = (rho >= i) & (N.probs > 0)
    cond = stats.binom.sf(i - 1, rho[keep][None, :], F[:, None])
    val = (cond @ N.probs[keep]) / spec.conditioning
    val = np.clip(val, 0.0, 1.0).reshape(np.shape(x))
    return float(val) if val.ndim == 0 else val


def _fos_terms(spec: OsSpec):
    if not spec.fractional:
        raise DomainError("fractional order-statistic formula needs a delta sample size")
    N = spec.size_dist
    g = float(spec.index)
    keep = (N.points >= g - 1e-12) & (N.probs > 0)
    m = N.jumps[keep] - spec.anchor + 1.0
    if not np.all(m > 0):
        raise DomainError("non-positive Beta parameter in the fractional series")
    p = spec.conditioning
    if p <= 0 or not np.any(keep):
        raise DomainError(f"no sample-size mass at or above gamma={g}")
    return g, m, N.probs[keep], p


def fos_excluded_mass(spec: OsSpec) -> dict:
    """Sample-size mass that does not enter the fractional series."""
    N = spec.size_dist
    m = N.jumps - spec.anchor + 1.0
    return {
        "nonpositive_shape": float(N.probs[m <= 0].sum()),
        "below_gamma": float(N.probs[N.points < spec.index - 1e-12].sum()),
    }


def fos_pdf_random_size(spec: OsSpec, x):
    """Density of the gamma-th fractional order statistic.

    f F^(g-1) / (pi Gamma(g) Fbar^(g+1)) * sum_k Gamma(m+g)/Gamma(m) (1+t)^(-m-g) P(k),
    t = F/Fbar, m = sigma(k) - n + 1, summed over support points k >= g.
    """
    g, m, p, norm = _fos_terms(spec)
    x = np.asarray(x, dtype=float)
    F = np.atleast_1d(np.clip(spec.parent.cdf(x), 0.0, 1.0))
    Fb = np.atleast_1d(np.clip(spec.parent.sf(x), 0.0, 1.0))
    f = np.atleast_1d(spec.parent.pdf(x))
    out = np.zeros(F.shape)
    inside = (F > 0) & (Fb > 0)
    # log(1 + t) = -log(Fbar) since 1 + F/Fbar = 1/Fbar
    log1pt = -np.log(Fb[inside])
    logc = gammaln(m + g) - gammaln(m) + np.log(p)
    pref = (g - 1) * np.log(F[inside]) - (g + 1) * np.log(Fb[inside]) - gammaln(g) - math.log(norm)
    logterms = logc[None, :] - (m[None, :] + g) * log1pt[:, None] + pref[:, None]
    out[inside] = f[inside] * np.exp(logterms).sum(axis=1)
    out = out.reshape(np.shape(x))
    return float(out) if out.ndim == 0 else out


def fos_cdf_random_size(spec: OsSpec, x):
    """Beta-mixture cdf sum_k P(k) I_F(g, m) / pi."""
    g, m, p, norm = _fos_terms(spec)
    x = np.asarray(x, dtype=float)
    F = np.atleast_1d(np.clip(spec.parent.cdf(x), 0.0, 1.0))
    val = (betainc(g, m[None, :], F[:, None]) @ p) / norm
    val = np.clip(val, 0.0, 1.0).reshape(np.shape(x))
    return float(val) if val.ndim == 0 else val


# random extremes ------------------------------------------------------------

def _nabla_size(N: LatticePmf):
    if N.convention != "nabla":
        raise DomainError("random extremes take a nabla sample-size law")


def _shape(x, v):
    v = v.reshape(np.shape(x))
    return float(v) if v.ndim == 0 else v


def extreme_min_sf(N: LatticePmf, parent: ContinuousDist, x):
    """Survival of the minimum of rho(N) variates: L_N(F(x))."""
    _nabla_size(N)
    F = np.atleast_1d(np.clip(parent.cdf(np.asarray(x, float)), 0.0, 1.0))
    return _shape(x, laplace(N)(F))


def extreme_min_pdf(N: LatticePmf, parent: ContinuousDist, x):
    """-f(x) L'_N(F(x))."""
    _nabla_size(N)
    x = np.asarray(x, float)
    F = np.atleast_1d(np.clip(parent.cdf(x), 0.0, 1.0))
    return _shape(x, -np.atleast_1d(parent.pdf(x)) * derivative_k(N, 1)(F))


def extreme_max_cdf(N: LatticePmf, parent: ContinuousDist, x):
    """F(x) L_N(Fbar(x)) = E[F(x)^N]."""
    _nabla_size(N)
    x = np.asarray(x, float)
    F = np.atleast_1d(np.clip(parent.cdf(x), 0.0, 1.0))
    Fb = np.atleast_1d(np.clip(parent.sf(x), 0.0, 1.0))
    return _shape(x, F * laplace(N)(Fb))


def extreme_max_pdf(N: LatticePmf, parent: ContinuousDist, x):
    """d/dx of F L_N(Fbar) = f [L_N(Fbar) - F L'_N(Fbar)]."""
    _nabla_size(N)
    x = np.asarray(x, float)
    F = np.atleast_1d(np.clip(parent.cdf(x), 0.0, 1.0))
    Fb = np.atleast_1d(np.clip(parent.sf(x), 0.0, 1.0))
    f = np.atleast_1d(parent.pdf(x))
    return _shape(x, f * (laplace(N)(Fb) - F * derivative_k(N, 1)(Fb)))


# spacings -------------------------------------------------------------------

def _at(u_ext: np.ndarray, pos: float) -> float:
    """u at a possibly fractional position, linear between neighbours; u_0 = 0."""
    top = u_ext.size - 1
    if pos < -1e-12 or pos > top + 1e-12:
        raise DomainError(f"position {pos:g} outside 0..{top}")
    pos = min(max(pos, 0.0), float(top))
    lo = math.floor(pos + 1e-12)
    w = pos - lo
    if w < 1e-12:
        return float(u_ext[lo])
    return float((1 - w) * u_ext[lo] + w * u_ext[lo + 1])


def spacing_operator(u, kind: str, order: float, i: float) -> float:
    """Difference of the given order of ordered uniforms u_1 < ... < u_{n-1} at index i.

    Integer order m: sum_j (-1)^j C(m, j) u_{i-j} (nabla) or u_{i+m-j} (delta),
    j = 0..m.  Non-integer order a: sum_{j=0}^{i-2} (-1)^j C(a, j) u_{i-j}
    (nabla) and sum_{j=0}^{floor(a+i-1)} (-1)^j C(a, j) u_{i+a-j} (delta),
    non-integer positions interpolated linearly.  u_0 = 0.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise DomainError("u must be a nonempty 1-d sequence")
    if np.any(u <= 0) or np.any(u >= 1) or np.any(np.diff(u) <= 0):
        raise DomainError("u must be strictly increasing inside (0, 1)")
    if kind not in ("nabla", "delta"):
        raise ValueError(f"kind must be nabla or delta, got {kind!r}")
    if not order > 0:
        raise DomainError("order must be positive")
    u_ext = np.concatenate([[0.0], u])
    if float(order).is_integer():
        m = int(order)
        if not float(i).is_integer():
            raise DomainError("integer-order differences need an integer index")
        i = int(i)
        shift = 0 if kind == "nabla" else m
        return float(sum((-1) ** j * generalized_binomial(m, j) * _at(u_ext, i + shift - j) for j in range(m + 1)))
    a = float(order)
    if kind == "nabla":
        if not float(i).is_integer() or i < math.ceil(a) + 1:
            raise DomainError(f"fractional nabla difference needs integer i >= {math.ceil(a) + 1}")
        i = int(i)
        return float(sum((-1) ** j * generalized_binomial(a, j) * _at(u_ext, i - j) for j in range(i - 1)))
    top = math.floor(a + i - 1 + 1e-12)
    if top < 0:
        raise DomainError("empty fractional delta sum")
    return float(sum((-1) ** j * generalized_binomial(a, j) * _at(u_ext, i + a - j) for j in range(top + 1)))


def curve_to_csv(path, parent: ContinuousDist, u, values, meta: dict | None = None) -> None:
    """Write a curve as ``u,x,value`` rows, x = Q(u)."""
    u = np.asarray(u, dtype=float)
    x = parent.quantile(u)
    rows = [(float(a), float(b), float(c)) for a, b, c in zip(u, x, np.asarray(values, float))]
    write_csv(path, ["u", "x", "value"], rows, meta)
