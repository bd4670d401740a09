"""Shared-frailty cluster likelihoods and the N_s(X) hazard-rate comparison.

Two kernels link a frailty law to the conditional survival of a cluster
with summed cumulative hazard H:

* ``lattice`` (default): the frailty's own discrete transform, so the
  cluster survival is L_U(H).  For a delta frailty the conditional joint
  survival given U = u is (1 + H)^(-sigma(u)); nabla frailties need H in (0, 1).
* ``exponential``: proportional frailty, conditional cumulative hazard
  u * H, so the survival is E[exp(-U H)].
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import LatticePmf
from .lattice import DomainError
from .orders import GridLaw, OrderVerdict, check_classical
from .transforms import derivative_k, laplace, reliability_sequence

__all__ = [
    "Baseline",
    "ClusterData",
    "cluster_survival",
    "cluster_likelihood",
    "ns_hazard_compare",
    "read_clusters_csv",
    "KERNELS",
]

KERNELS = ("lattice", "exponential")
MAX_EVENTS = 64


@dataclass(frozen=True)
class Baseline:
    """Exponential (rate) or Weibull (shape, scale) baseline hazard."""

    kind: str = "exponential"
    rate: float = 1.0
    shape: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exponential", "weibull"):
            raise DomainError(f"unknown baseline {self.kind!r}")
        if not (self.rate > 0 and self.shape > 0 and self.scale > 0):
            raise DomainError("baseline parameters must be positive")

    def hazard(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "exponential":
            return np.full(t.shape, self.rate)
        return self.shape / self.scale * (t / self.scale) ** (self.shape - 1)

    def cum_hazard(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "exponential":
            return self.rate * t
        return (t / self.scale) ** self.shape


@dataclass(frozen=True, eq=False)
class ClusterData:
    """One cluster: times y_j, event indicators delta_j, covariate rows x_j."""

    times: np.ndarray
    events: np.ndarray
    covariates: np.ndarray | None = None
    baseline: Baseline = field(default_factory=Baseline)
    beta: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        d = np.asarray(self.events, dtype=int).ravel()
        if t.size == 0 or t.size != d.size:
            raise DomainError("times and events must be nonempty and equally long")
        if np.any(t <= 0) or not np.all(np.isfinite(t)):
            raise DomainError("times must be positive and finite")
        if np.any((d != 0) & (d != 1)):
            raise DomainError("event indicators must be 0 or 1")
        x = None
        b = None
        if self.covariates is not None:
            x = np.asarray(self.covariates, dtype=float).reshape(t.size, -1)
            b = np.zeros(x.shape[1]) if self.beta is None else np.asarray(self.beta, dtype=float).ravel()
            if b.size != x.shape[1]:
                raise DomainError("beta length does not match the covariate columns")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "events", d)
        object.__setattr__(self, "covariates", x)
        object.__setattr__(self, "beta", b)

    @property
    def n_events(self) -> int:
        return int(self.events.sum())

    def _risk(self):
        if self.covariates is None:
            return np.ones(self.times.size)
        return np.exp(self.covariates @ self.beta)

    def hazards(self) -> np.ndarray:
        """Conditional hazards h_j(y_j) = h0(y_j) exp(x_j beta)."""
        return self.baseline.hazard(self.times) * self._risk()

    def cum_hazards(self) -> np.ndarray:
        return self.baseline.cum_hazard(self.times) * self._risk()


def _check_kernel(frailty: LatticePmf, kernel: str, H: float):
    if kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    if kernel == "lattice" and frailty.convention == "nabla" and not 0 < H < 1:
        raise DomainError(f"nabla frailty transform needs H in (0, 1), got {H:g}")
    if H < 0:
        raise DomainError("negative cumulative hazard")


def _exp_kernel(frailty: LatticePmf, d: int, H: float) -> float:
    """E[U^d exp(-U H)] summed in log space over the positive atoms."""
    u = frailty.points
    p = frailty.probs
    keep = p > 0
    if d > 0:
        keep &= u > 0
    if not np.any(keep):
        return 0.0
    u, p = u[keep], p[keep]
    logt = np.log(p) - u * H + (d * np.log(u) if d > 0 else 0.0)
    top = logt.max()
    return float(math.exp(top) * np.exp(logt - top).sum())


def cluster_survival(data: ClusterData, frailty: LatticePmf, kernel: str = "lattice") -> float:
    """Joint survival of the cluster: the frailty transform at the summed cumulative hazard."""
    H = float(data.cum_hazards().sum())
    _check_kernel(frailty, kernel, H)
    if kernel == "lattice":
        return float(laplace(frailty)(H))
    return _exp_kernel(frailty, 0, H)


def cluster_likelihood(data: ClusterData, frailty: LatticePmf, kernel: str = "lattice") -> float:
    """prod_j h_j^delta_j * (-1)^d L^(d)(sum_j H_j), d the number of events."""
    d = data.n_events
    if d > MAX_EVENTS:
        raise DomainError(f"{d} events exceed the derivative order limit {MAX_EVENTS}")
    H = float(data.cum_hazards().sum())
    _check_kernel(frailty, kernel, H)
    hz = float(np.prod(data.hazards()[data.events == 1])) if d else 1.0
    if kernel == "lattice":
        val = (-1.0) ** d * float(derivative_k(frailty, d, check_tail=False)(H))
    else:
        val = _exp_kernel(frailty, d, H)
    return hz * val


def ns_hazard_compare(
    X: LatticePmf, Y: LatticePmf, s_grid, nmax: int = 16, offset=None, start: int = 0
) -> OrderVerdict:
    """N_s(X) <=_hr N_s(Y) at every s of ``s_grid`` (R^Y/R^X increasing in n).

    ``offset`` puts two delta variables on one lattice (see ``reliability_sequence``).
    ``start`` = 1 drops the n = 0 -> 1 step, where R(0) = 1 for every law.
    Fails if any s fails; the per-s outcomes are kept in ``extra``.
    """
    if X.convention != Y.convention:
        raise DomainError("mixed conventions")
    per_s = {}
    first_fail = None
    n = np.arange(nmax + 1, dtype=float)
    for s in np.atleast_1d(np.asarray(s_grid, dtype=float)):
        rx = reliability_sequence(X, float(s), nmax, strict=False, offset=offset)
        ry = reliability_sequence(Y, float(s), nmax, strict=False, offset=offset)
        k = n[start:]
        rx, ry = rx[start:], ry[start:]
        zero = np.zeros_like(k)
        v = check_classical("hr", GridLaw(k, zero, 1 - rx, rx), GridLaw(k, zero, 1 - ry, ry))
        per_s[repr(float(s))] = v.outcome
        if v.fails and first_fail is None:
            first_fail = (float(s), v)
    outcomes = set(per_s.values())
    spec = {"kind": "reliability", "n": nmax + 1 - start, "start": start, "s": [float(s) for s in np.atleast_1d(s_grid)]}
    if first_fail is not None:
        s, v = first_fail
        return OrderVerdict("hr", "fails", v.witness, v.max_violation, spec, f"fails at s={s:g}", {"per_s": per_s})
    outcome = "inconclusive" if "inconclusive" in outcomes else "holds"
    return OrderVerdict("hr", outcome, None, 0.0, spec, "", {"per_s": per_s})


def read_clusters_csv(path, baseline: Baseline | None = None, beta=None) -> dict:
    """Clusters from rows ``cluster,time,event[,x1,x2,...]`` keyed by cluster id."""
    baseline = baseline or Baseline()
    groups: dict[str, list] = {}
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    if not rows:
        raise DomainError(f"no rows in {path}")
    if rows[0] and rows[0][0].strip().lower() in ("cluster", "cluster_id", "id"):
        rows = rows[1:]
    for r in rows:
        if len(r) < 3:
            raise DomainError(f"cluster row needs at least 3 columns: {r}")
        groups.setdefault(r[0].strip(), []).append([float(v) for v in r[1:]])
    out = {}
    for cid, recs in groups.items():
        a = np.array(recs, dtype=float)
        cov = a[:, 2:] if a.shape[1] > 2 else None
        out[cid] = ClusterData(a[:, 0], a[:, 1].astype(int), cov, baseline, beta if cov is not None else None)
    return out
