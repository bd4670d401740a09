"""Probability mass functions on offset unit lattices.

A :class:`LatticePmf` stores the head of a (possibly infinite) pmf on
``N_offset`` together with a bound on the truncated mass.  Infinite families
keep a geometric ratio bound for their tail so weighted tail sums
(moments, transform derivatives) can be bounded as well.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from ._io import atomic_write
from .lattice import DomainError, falling_factorial_vec, rising_factorial_vec

__all__ = [
    "LatticePmf",
    "TruncationError",
    "gamma_delta",
    "gamma_nabla",
    "geometric",
    "from_table",
    "degenerate",
    "lattice_sum",
    "nabla_moment",
    "delta_moment",
    "pi",
    "read_csv",
    "write_csv",
]

EPS_TRUNC = 1e-12
NORM_TOL = 1e-9
MOMENT_RTOL = 1e-8
_CHUNK = 256
_MAX_TERMS = 200_000


class TruncationError(ArithmeticError):
    """The truncated tail dominates the requested quantity."""


@dataclass(frozen=True, eq=False)
class LatticePmf:
    """pmf on ``offset, offset + 1, ...`` with a bound on the truncated tail.

    ``tail_ratio`` is an upper bound on p(x + 1) / p(x) beyond the stored
    support (None for finite tables).
    """

    convention: str
    offset: float
    probs: np.ndarray
    tail_mass: float = 0.0
    label: str = ""
    tail_ratio: float | None = None
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.convention not in ("delta", "nabla"):
            raise DomainError(f"unknown convention {self.convention!r}")
        probs = np.array(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise DomainError("empty pmf table")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise DomainError("pmf entries must be finite and nonnegative")
        if self.convention == "nabla" and self.offset != 1:
            raise DomainError("nabla pmfs live on N_1 (offset must be 1)")
        if self.convention == "delta" and not self.offset > -1:
            raise DomainError("delta pmfs need offset alpha - 1 > -1")
        if self.tail_mass < 0:
            raise DomainError("negative tail mass")
        total = probs.sum() + self.tail_mass
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"pmf mass {total!r} is not 1 within {NORM_TOL}")
        if self.tail_ratio is not None and not 0 <= self.tail_ratio < 1:
            raise DomainError("tail ratio must lie in [0, 1)")
        probs.setflags(write=False)
        pts = self.offset + np.arange(probs.size, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.probs.size

    @property
    def last(self) -> float:
        return float(self.points[-1])

    @property
    def jumps(self) -> np.ndarray:
        """sigma(x) for delta pmfs, rho(x) for nabla pmfs."""
        return self.points + 1.0 if self.convention == "delta" else self.points - 1.0

    def pmf(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        idx = np.rint(x - self.offset)
        on = (np.abs(x - self.offset - idx) < 1e-12) & (idx >= 0) & (idx < self.probs.size)
        out = np.where(on, self.probs[np.clip(idx, 0, self.probs.size - 1).astype(int)], 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x) -> np.ndarray | float:
        """P(X <= x) over the stored support."""
        cs = np.cumsum(self.probs)
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.points, x + 1e-12, side="right") - 1
        out = np.where(idx >= 0, cs[np.clip(idx, 0, None)], 0.0)
        return float(out) if out.ndim == 0 else out

    def sf(self, x) -> np.ndarray | float:
        """P(X > x), the truncated tail included."""
        x = np.asarray(x, dtype=float)
        rev = np.cumsum(self.probs[::-1])[::-1]
        idx = np.searchsorted(self.points, x + 1e-12, side="right")
        out = np.where(idx < self.probs.size, rev[np.clip(idx, 0, self.probs.size - 1)], 0.0)
        out = out + self.tail_mass
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return float(np.dot(self.points, self.probs))

    def tail_weighted_bound(self, weight) -> float:
        """Bound on sum over the truncated tail of p(x) * weight(x).

        ``weight`` must be nondecreasing-then-eventually-dominated by the
        geometric decay; it is evaluated on the lattice past the last point.
        """
        if self.tail_mass == 0:
            return 0.0
        if self.tail_ratio is None:
            return self.tail_mass * float(weight(np.array([self.last + 1.0]))[0])
        r = self.tail_ratio
        p_last = self.probs[-1] if self.probs[-1] > 0 else self.tail_mass
        total = 0.0
        start = 1
        while start < _MAX_TERMS:
            j = np.arange(start, start + 4096, dtype=float)
            terms = p_last * np.exp(j * math.log(r) if r > 0 else -np.inf * j) * weight(self.last + j)
            terms = np.nan_to_num(terms, nan=0.0)
            total += float(terms.sum())
            if terms[-1] <= 1e-18 * max(total, 1e-300) and terms[-1] <= terms[0]:
                break
            start += 4096
        return total

    def with_label(self, label: str) -> "LatticePmf":
        return LatticePmf(self.convention, self.offset, self.probs, self.tail_mass, label, self.tail_ratio)


def _negbin_head(alpha: float, q: float, eps: float):
    """Head of p(m) = Gamma(m + alpha) / (Gamma(alpha) m!) (1 - q)^alpha q^m, m >= 0.

    Stops once the geometric tail bound drops to ``eps``.
    """
    log_norm = alpha * math.log1p(-q) - gammaln(alpha)
    logq = math.log(q)
    chunks = []
    start = 0
    while True:
        m = np.arange(start, start + _CHUNK, dtype=float)
        logp = gammaln(m + alpha) - gammaln(m + 1) + log_norm + m * logq
        p = np.exp(logp)
        ratio = (alpha + m) / (m + 1) * q
        # sup of the term ratio past m: (alpha+m)/(m+1) is monotone towards 1
        sup_ratio = np.maximum(ratio, q)
        with np.errstate(divide="ignore"):
            bound = np.where(sup_ratio < 1, p * sup_ratio / (1 - sup_ratio), np.inf)
        hit = np.nonzero(bound <= eps)[0]
        if hit.size:
            k = hit[0]
            chunks.append(p[: k + 1])
            head = np.concatenate(chunks)
            # the bound can overshoot the true remainder; keep the smaller so the mass stays 1
            rem = 1.0 - math.fsum(head)
            tail = min(float(bound[k]), rem) if rem > 0 else float(bound[k])
            return head, tail, float(sup_ratio[k])
        chunks.append(p)
        start += _CHUNK
        if start > _MAX_TERMS:
            raise TruncationError("pmf tail does not reach the truncation tolerance")


def _check_eps(eps):
    if not 0 < eps < 1:
        raise DomainError(f"truncation tolerance must lie in (0, 1), got {eps}")


def gamma_delta(alpha: float, beta: float, eps: float = EPS_TRUNC) -> LatticePmf:
    """Delta discrete gamma pmf on N_{alpha-1}.

    p(x) = x^(alpha-1, falling) beta^alpha / (Gamma(alpha) (1 + beta)^(x+1)).
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"gamma_delta needs alpha > 0 and beta > 0, got ({alpha}, {beta})")
    _check_eps(eps)
    probs, tail, ratio = _negbin_head(alpha, 1.0 / (1.0 + beta), eps)
    return LatticePmf("delta", alpha - 1.0, probs, tail, f"gamma_delta({alpha:g},{beta:g})", ratio)


def gamma_nabla(alpha: float, beta: float, eps: float = EPS_TRUNC) -> LatticePmf:
    """Nabla discrete gamma pmf on N_1.

    p(x) = x^(alpha-1, rising) beta^alpha (1 - beta)^(x-1) / Gamma(alpha).
    """
    if not (alpha > 0 and 0 < beta < 1):
        raise DomainError(f"gamma_nabla needs alpha > 0 and 0 < beta < 1, got ({alpha}, {beta})")
    _check_eps(eps)
    probs, tail, ratio = _negbin_head(alpha, 1.0 - beta, eps)
    return LatticePmf("nabla", 1.0, probs, tail, f"gamma_nabla({alpha:g},{beta:g})", ratio)


def geometric(convention: str, p: float, eps: float = EPS_TRUNC) -> LatticePmf:
    """Geometric law: trials to first success (nabla, N_1) or failures before it (delta, N_0)."""
    if not 0 < p < 1:
        raise DomainError(f"geometric needs 0 < p < 1, got {p}")
    _check_eps(eps)
    q = 1.0 - p
    # smallest M with q^(M+1) <= eps
    m_last = max(0, math.ceil(math.log(eps) / math.log(q)) - 1)
    m = np.arange(m_last + 1, dtype=float)
    probs = p * q**m
    tail = q ** (m_last + 1)
    offset = 1.0 if convention == "nabla" else 0.0
    if convention not in ("delta", "nabla"):
        raise DomainError(f"unknown convention {convention!r}")
    return LatticePmf(convention, offset, probs, tail, f"geometric:{convention}({p:g})", q)


def from_table(convention: str, offset: float, probs, label: str = "table", normalize: bool = False) -> LatticePmf:
    """Finite pmf from a probability table indexed from ``offset``.

    A mass deficit up to the normalization tolerance is kept as tail mass;
    larger deficits are an error unless ``normalize`` is set.
    """
    probs = np.asarray(probs, dtype=float).ravel()
    if probs.size == 0:
        raise DomainError("empty pmf table")
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise DomainError("pmf table has negative or non-finite mass")
    total = probs.sum()
    if total <= 0:
        raise DomainError("pmf table has zero mass")
    if normalize:
        probs = probs / total
        total = 1.0
    if total > 1 + NORM_TOL:
        raise DomainError(f"pmf table mass {total!r} exceeds 1")
    if total > 1:
        probs = probs / total
        total = 1.0
    tail = max(0.0, 1.0 - total)
    if tail > NORM_TOL:
        raise DomainError(f"pmf table mass deficit {tail:.3g} exceeds {NORM_TOL}; pass normalize=True")
    if convention == "nabla":
        offset = float(offset)
        if offset != 1.0:
            if offset > 1 and float(offset).is_integer():
                probs = np.concatenate([np.zeros(int(offset) - 1), probs])
                offset = 1.0
            else:
                raise DomainError("nabla tables must start on the integer lattice N_1")
    return LatticePmf(convention, float(offset), probs, tail, label, None)


def degenerate(convention: str, x: float, offset: float | None = None) -> LatticePmf:
    """Point mass at ``x``."""
    if convention == "nabla":
        offset = 1.0
    elif offset is None:
        offset = x - math.floor(x) if x >= 0 else x
    m = x - offset
    if m < -1e-12 or abs(m - round(m)) > 1e-12:
        raise DomainError(f"{x} is not on the lattice N_{offset}")
    probs = np.zeros(int(round(m)) + 1)
    probs[-1] = 1.0
    return LatticePmf(convention, float(offset), probs, 0.0, f"degenerate:{convention}({x:g})")


def lattice_sum(x: LatticePmf, y: LatticePmf) -> LatticePmf:
    """Law of the lattice sum of independent nabla variables.

    The sum keeps support N_1 with rho(Z) = rho(X) + rho(Y), so nabla
    transforms multiply.
    """
    if x.convention != "nabla" or y.convention != "nabla":
        raise DomainError("lattice_sum is defined for nabla variables")
    probs = np.convolve(x.probs, y.probs)
    tail = x.tail_mass + y.tail_mass - x.tail_mass * y.tail_mass
    # mass lost to rounding in the convolution goes to the tail bound
    tail = max(tail, 1.0 - probs.sum())
    ratios = [r for r in (x.tail_ratio, y.tail_ratio) if r is not None]
    ratio = max(ratios) if ratios else None
    return LatticePmf("nabla", 1.0, probs, tail, f"({x.label})+({y.label})", ratio)


def _moment(X: LatticePmf, k: int, weight, strict: bool) -> float:
    if k < 0 or int(k) != k:
        raise DomainError(f"moment order must be a nonnegative integer, got {k}")
    value = float(np.dot(weight(X.points), X.probs)) + (X.tail_mass if k == 0 else 0.0)
    if strict and k > 0:
        tail = X.tail_weighted_bound(weight)
        if tail > MOMENT_RTOL * abs(value):
            raise TruncationError(
                f"order-{k} moment of {X.label}: tail bound {tail:.3g} exceeds "
                f"{MOMENT_RTOL:g} of value {value:.6g}"
            )
    return value


def nabla_moment(X: LatticePmf, k: int, strict: bool = True) -> float:
    """E[sigma(X)^(k, rising)] for a delta variable."""
    if X.convention != "delta":
        raise DomainError("nabla moments are defined for delta variables")
    return _moment(X, k, lambda x: rising_factorial_vec(x + 1.0, k), strict)


def delta_moment(X: LatticePmf, k: int, strict: bool = True) -> float:
    """E[rho(X)^(k, falling)] for a nabla variable."""
    if X.convention != "nabla":
        raise DomainError("delta moments are defined for nabla variables")
    return _moment(X, k, lambda x: falling_factorial_vec(x - 1.0, k), strict)


def pi(X: LatticePmf, threshold: float) -> float:
    """P(X >= threshold), counting the truncated tail as upper-tail mass."""
    keep = X.points >= threshold - 1e-12
    return float(X.probs[keep].sum() + X.tail_mass)


def write_csv(X: LatticePmf, path) -> None:
    """Two-column ``x,p`` table; metadata goes in leading ``#`` lines."""
    buf = io.StringIO()
    buf.write(f"# convention={X.convention}\n# offset={X.offset!r}\n# tail_mass={X.tail_mass!r}\n")
    buf.write(f"# label={X.label}\n")
    if X.tail_ratio is not None:
        buf.write(f"# tail_ratio={X.tail_ratio!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "p"])
    for x, p in zip(X.points, X.probs):
        w.writerow([repr(float(x)), repr(float(p))])
    atomic_write(path, buf.getvalue())


def read_csv(path, convention: str | None = None) -> LatticePmf:
    """Inverse of :func:`write_csv`; also accepts bare ``x,p`` files."""
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
                continue
            if line.strip():
                rows.append(line)
    reader = csv.reader(rows)
    data = []
    for row in reader:
        try:
            data.append((float(row[0]), float(row[1])))
        except ValueError:
            continue  # header
    if not data:
        raise DomainError(f"no pmf rows in {path}")
    conv = convention or meta.get("convention")
    if conv is None:
        raise DomainError("pmf table convention unknown; pass convention=")
    data.sort()
    xs = np.array([d[0] for d in data])
    ps = np.array([d[1] for d in data])
    offset = xs[0] if conv == "delta" else 1.0
    if conv == "delta" and "offset" in meta:
        offset = float(meta["offset"])
    idx = np.rint(xs - offset)
    if np.any(np.abs(xs - offset - idx) > 1e-9) or np.any(idx < 0):
        raise DomainError("table points are not on the lattice")
    probs = np.zeros(int(idx.max()) + 1)
    probs[idx.astype(int)] = ps
    label = meta.get("label", Path(path).stem)
    if "tail_mass" in meta:
        # a file we wrote: keep the recorded tail bound and decay ratio
        ratio = float(meta["tail_ratio"]) if "tail_ratio" in meta else None
        return LatticePmf(conv, offset, probs, float(meta["tail_mass"]), label, ratio)
    return from_table(conv, offset, probs, label=label)
