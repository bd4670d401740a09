"""Simulation oracles, the standard battery and the theorem-implication suite.

Random streams come from numpy's PCG64 seeded through ``SeedSequence``:
replications are cut into fixed-size chunks, chunk c uses the c-th spawned
child, so results do not depend on how many worker threads run them
(``TSORDER_THREADS``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import __version__
from .distributions import (
    LatticePmf,
    delta_moment,
    degenerate,
    from_table,
    gamma_delta,
    gamma_nabla,
    geometric,
    lattice_sum,
    nabla_moment,
)
from .frailty import ns_hazard_compare
from .lattice import DomainError
from .orders import (
    TINY,
    GridLaw,
    OrderVerdict,
    check_classical,
    check_D_i_Lt_r,
    check_d_i_Lt_r,
    check_Lt,
    check_Lt_r,
    check_moment_series,
    moment_ratio_series,
    check_r_Lt_r,
    current_tol,
    grid_spec,
    ratio_verdict,
)
from .ostats import (
    ContinuousDist,
    OsSpec,
    exponential,
    extreme_min_pdf,
    extreme_min_sf,
    os_pdf_random_size,
)
from .transforms import (
    compound_laplace,
    derivative_k,
    laplace,
    lstar_lstarstar,
    reliability_matrix,
    standard_grid,
)

__all__ = [
    "SimConfig",
    "SimulationError",
    "RNG_NAME",
    "sample_lattice",
    "EmpiricalSample",
    "simulate_os",
    "simulate_fos",
    "EmpiricalTransform",
    "simulate_compound",
    "simulate_convolution",
    "ks_statistic",
    "ks_critical",
    "BATTERY_EPS",
    "standard_battery",
    "battery_pairs",
    "THEOREMS",
    "INFORMATIONAL",
    "verify_theorem",
    "TheoremReport",
]

RNG_NAME = "numpy.PCG64 via SeedSequence.spawn"
CHUNK = 10_000
MIN_ACCEPT = 1e-3


class SimulationError(RuntimeError):
    """Simulation cannot produce a usable sample."""


@dataclass(frozen=True)
class SimConfig:
    seed: int = 20240601
    replications: int = 100_000
    strict_conditioning: bool = True
    histogram_bins: int = 50

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.replications < 1 or self.histogram_bins < 1:
            raise DomainError("replications and histogram_bins must be positive")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TSORDER_THREADS", "1")))
    except ValueError:
        return 1


def _chunked(cfg: SimConfig, work, salt: int = 0) -> list:
    """Run ``work(rng, size)`` over fixed chunks; order of results is the chunk order."""
    n_chunks = math.ceil(cfg.replications / CHUNK)
    seqs = np.random.SeedSequence([cfg.seed, salt]).spawn(n_chunks)
    sizes = [min(CHUNK, cfg.replications - c * CHUNK) for c in range(n_chunks)]

    def run(c):
        return work(np.random.Generator(np.random.PCG64(seqs[c])), sizes[c])

    threads = _threads()
    if threads == 1 or n_chunks == 1:
        return [run(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(run, range(n_chunks)))


def sample_lattice(X: LatticePmf, rng, size=None, return_tail_hits: bool = False):
    """Inverse-cdf draws from the stored support; draws past it land on the last point."""
    cdf = np.cumsum(X.probs)
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    hits = int(np.sum(idx >= X.probs.size))
    idx = np.minimum(idx, X.probs.size - 1)
    out = X.points[idx]
    if size is None:
        out = float(out)
    return (out, hits) if return_tail_hits else out


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """Simulated order statistics; ``u`` = F(x), +inf marks a missing statistic."""

    u: np.ndarray
    x: np.ndarray
    draws: int
    accepted: int
    tail_hits: int

    @property
    def acceptance(self) -> float:
        return self.accepted / self.draws

    def histogram(self, bins: int):
        """Density histogram on the u scale over the finite values."""
        fin = self.u[np.isfinite(self.u)]
        counts, edges = np.histogram(fin, bins=bins, range=(0.0, 1.0))
        dens = counts / (max(self.accepted, 1) * np.diff(edges))
        return counts, edges, dens


def _sizes(N: LatticePmf, rng, size):
    return sample_lattice(N, rng, size, return_tail_hits=True)


def simulate_os(spec: OsSpec, cfg: SimConfig) -> EmpiricalSample:
    """Draw N, keep it if the conditioning event holds, sort rho(N) parent variates, record the i-th.

    In non-strict mode N = i is accepted although its sample of i - 1 has no
    i-th order statistic; those draws are recorded as missing (+inf).
    """
    if spec.fractional:
        raise DomainError("simulate_os needs a nabla sample size")
    i = int(spec.index)
    thr = i + 1 if cfg.strict_conditioning else i

    def work(rng, size):
        n, hits = _sizes(spec.size_dist, rng, size)
        acc = n[n >= thr - 1e-9]
        u = np.full(acc.size, np.inf)
        for k in np.unique(acc):
            sel = np.nonzero(acc == k)[0]
            m = int(round(k)) - 1
            if m < i:
                continue
            draws = rng.random((sel.size, m))
            u[sel] = np.partition(draws, i - 1, axis=1)[:, i - 1]
        return u, size, hits

    parts = _chunked(cfg, work, salt=1)
    return _collect(parts, spec.parent)


def simulate_fos(spec: OsSpec, cfg: SimConfig) -> EmpiricalSample:
    """Draw N; when N >= gamma record Q(U), U ~ Beta(gamma, sigma(N) - n + 1)."""
    if not spec.fractional:
        raise DomainError("simulate_fos needs a delta sample size")
    g, n = float(spec.index), spec.anchor

    def work(rng, size):
        k, hits = _sizes(spec.size_dist, rng, size)
        acc = k[k >= g - 1e-12]
        b = acc + 1.0 - n + 1.0
        if np.any(b <= 0):
            raise SimulationError("non-positive Beta parameter in the fractional simulator")
        return rng.beta(g, b), size, hits

    parts = _chunked(cfg, work, salt=2)
    return _collect(parts, spec.parent)


def _collect(parts, parent: ContinuousDist) -> EmpiricalSample:
    u = np.concatenate([p[0] for p in parts])
    draws = sum(p[1] for p in parts)
    hits = sum(p[2] for p in parts)
    if u.size < MIN_ACCEPT * draws:
        raise SimulationError(f"conditioning acceptance {u.size / draws:.2g} below {MIN_ACCEPT:g}")
    x = np.where(np.isfinite(u), parent.quantile(np.where(np.isfinite(u), u, 0.5)), np.inf)
    return EmpiricalSample(u, x, draws, int(u.size), hits)


def ks_critical(n: int, coef: float = 1.63) -> float:
    """Asymptotic one-sample KS critical value, alpha about 0.01."""
    return coef / math.sqrt(n)


def ks_statistic(samples, cdf) -> float:
    """sup |ECDF - cdf| over raw samples; +inf samples count in n and never below x."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    fin = s[np.isfinite(s)]
    if fin.size == 0:
        return float(abs(0.0 - 0.0))
    F = np.asarray(cdf(fin), dtype=float)
    k = np.arange(1, fin.size + 1)
    d_plus = np.max(k / n - F)
    d_minus = np.max(F - (k - 1) / n)
    return float(max(d_plus, d_minus, 0.0))


@dataclass(frozen=True, eq=False)
class EmpiricalTransform:
    s: np.ndarray
    values: np.ndarray
    replications: int

    def max_deviation(self, analytic) -> float:
        return float(np.max(np.abs(self.values - np.asarray(analytic))))


def _empirical_nabla_transform(rho_total: np.ndarray, s: np.ndarray) -> np.ndarray:
    # mean of (1 - s)^rho over the sample, grouped by distinct rho values
    vals, counts = np.unique(rho_total, return_counts=True)
    with np.errstate(divide="ignore"):
        lb = np.log1p(-s)
    z = np.where(vals[None, :] == 0, 0.0, vals[None, :] * lb[:, None])
    return (np.exp(z) * counts[None, :]).sum(axis=1) / rho_total.size


def simulate_compound(N: LatticePmf, X: LatticePmf, cfg: SimConfig, s=None) -> EmpiricalTransform:
    """Empirical nabla transform of the lattice sum of N independent copies of X."""
    if N.convention != "nabla" or X.convention != "nabla":
        raise DomainError("compound simulation needs nabla N and X")
    s = standard_grid("nabla") if s is None else np.asarray(s, dtype=float)

    def work(rng, size):
        n = sample_lattice(N, rng, size).astype(np.int64)
        draws = sample_lattice(X, rng, int(n.sum())) - 1.0
        owner = np.repeat(np.arange(size), n)
        return np.bincount(owner, weights=draws, minlength=size)

    rho = np.concatenate(_chunked(cfg, work, salt=3))
    return EmpiricalTransform(s, _empirical_nabla_transform(np.rint(rho).astype(np.int64), s), cfg.replications)


def simulate_convolution(X1: LatticePmf, X2: LatticePmf, cfg: SimConfig, s=None) -> EmpiricalTransform:
    """Empirical nabla transform of the lattice sum of independent X1 and X2."""
    s = standard_grid("nabla") if s is None else np.asarray(s, dtype=float)

    def work(rng, size):
        return (sample_lattice(X1, rng, size) - 1.0) + (sample_lattice(X2, rng, size) - 1.0)

    rho = np.concatenate(_chunked(cfg, work, salt=4))
    return EmpiricalTransform(s, _empirical_nabla_transform(np.rint(rho).astype(np.int64), s), cfg.replications)


# standard battery -------------------------------------------------------------

BATTERY_EPS = 1e-16
TABLE_A = {2: 0.375, 3: 0.625}
TABLE_B = {2: 0.25, 3: 0.25, 4: 0.5}


def _table(probs: dict, label: str) -> LatticePmf:
    top = max(probs)
    arr = np.zeros(top)
    for k, p in probs.items():
        arr[k - 1] = p
    return from_table("nabla", 1, arr, label=label)


@lru_cache(maxsize=4)
def standard_battery(eps: float = BATTERY_EPS) -> dict:
    """Battery members by convention.

    Infinite families are cut at ``eps`` (default 1e-16) so order-4
    moments and derivatives at s = 0 are not dominated by the cut tail.
    """
    nabla = [geometric("nabla", p, eps) for p in (0.3, 0.5, 0.7)]
    nabla += [gamma_nabla(a, b, eps) for a in (1.0, 2.0, 3.5) for b in (0.3, 0.6)]
    nabla += [degenerate("nabla", n) for n in (2, 3, 5, 8)]
    nabla += [_table(TABLE_A, "table_a"), _table(TABLE_B, "table_b")]
    delta = [gamma_delta(a, b, eps) for a in (1.5, 2.5) for b in (0.5, 1.0)]
    return {"nabla": tuple(nabla), "delta": tuple(delta)}


def battery_pairs(battery: dict, convention: str | None = None):
    """All ordered pairs of distinct members within each convention."""
    out = []
    for conv in ("nabla", "delta"):
        if convention not in (None, conv):
            continue
        mem = battery[conv]
        out += [(x, y) for x in mem for y in mem if x is not y]
    return out


# theorem suite ----------------------------------------------------------------

S_SET = {"nabla": (0.1, 0.5, 0.9), "delta": (0.5, 1.0, 2.0)}
NMAX = 16
COMPOUND_SUMMANDS = ((geometric, ("nabla", 0.5)), (gamma_nabla, (2.0, 0.6)))


@dataclass
class TheoremReport:
    theorem: str
    records: list = field(default_factory=list)
    header: dict = field(default_factory=dict)

    def add(self, x, y, premise: str, conclusion: str, iff: bool = False, **info):
        if "inconclusive" in (premise, conclusion) or "n/a" in (premise, conclusion):
            status = "inconclusive" if "n/a" not in (premise, conclusion) else "not-applicable"
        elif premise == "holds" and conclusion == "fails":
            status = "inconsistent"
        elif iff and premise != conclusion:
            status = "inconsistent"
        else:
            status = "consistent"
        rec = {"x": x, "y": y, "premise": premise, "conclusion": conclusion, "iff": iff, "status": status}
        rec.update(info)
        self.records.append(rec)

    @property
    def summary(self) -> dict:
        counted = [r for r in self.records if r["status"] != "not-applicable"]
        n = len(counted)
        inc = sum(r["status"] == "inconsistent" for r in counted)
        inconc = sum(r["status"] == "inconclusive" for r in counted)
        return {
            "records": n,
            "inconsistent": inc,
            "inconclusive": inconc,
            "inconclusive_rate": (inconc / n) if n else 0.0,
            "premise_holds": sum(r["premise"] == "holds" for r in counted),
            "passed": inc == 0,
        }

    @property
    def passed(self) -> bool:
        return self.summary["passed"]

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "header": self.header, "summary": self.summary, "records": self.records}


def _outcome(v: OrderVerdict) -> str:
    return v.outcome


def _pointwise_le(a, b, grid, relation) -> OrderVerdict:
    """a <= b on the grid with relative tolerance."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        viol = np.where(scale > TINY, (a - b) / scale, 0.0)
    k = int(np.argmax(viol))
    worst = max(float(viol[k]), 0.0)
    if worst > current_tol():
        return OrderVerdict(relation, "fails", (grid[k], grid[k], a[k], b[k]), worst, grid_spec(grid))
    return OrderVerdict(relation, "holds", None, worst, grid_spec(grid))


def _seq_law(R: np.ndarray) -> GridLaw:
    n = np.arange(R.size, dtype=float)
    return GridLaw(n, np.zeros_like(n), 1.0 - R, R)


def _common_offset(X: LatticePmf, Y: LatticePmf):
    """Start of the delta lattice both variables live on; None if there is none."""
    if X.convention != "delta":
        return 0.0
    d = X.offset - Y.offset
    if abs(d - round(d)) > 1e-9:
        return None
    return min(X.offset, Y.offset)


def _thm_5_1(rep, battery, cfg):
    for X, Y in battery_pairs(battery):
        c = _common_offset(X, Y)
        if c is None:
            rep.add(X.label, Y.label, "n/a", "n/a")
            continue
        prem = check_classical("st", X, Y)
        outs = []
        for s in S_SET[X.convention]:
            rx = reliability_matrix(X, [s], NMAX, offset=c)[0]
            ry = reliability_matrix(Y, [s], NMAX, offset=c)[0]
            outs.append(check_classical("st", _seq_law(rx), _seq_law(ry)).outcome)
        concl = "fails" if "fails" in outs else ("inconclusive" if "inconclusive" in outs else "holds")
        rep.add(X.label, Y.label, prem.outcome, concl)


def _thm_5_3(rep, battery, cfg):
    for X, Y in battery_pairs(battery):
        c = _common_offset(X, Y)
        if c is None:
            rep.add(X.label, Y.label, "n/a", "n/a", iff=True)
            continue
        g = standard_grid(X.convention)
        prem = check_Lt(X, Y, grid=g)
        sx = lstar_lstarstar(X, c)[1](g)
        sy = lstar_lstarstar(Y, c)[1](g)
        concl = _pointwise_le(sx, sy, g, "Lstarstar")
        rep.add(X.label, Y.label, prem.outcome, concl.outcome, iff=True)


def _thm_5_4(rep, battery, cfg):
    for X, Y in battery_pairs(battery):
        for mode, check in (("full", check_Lt_r), ("tail", check_r_Lt_r)):
            ms = check_moment_series(X, Y, mode)
            if ms.outcome == "inconclusive":
                rep.add(X.label, Y.label, "inconclusive", "inconclusive", iff=True, mode=mode)
                continue
            s, _ = moment_ratio_series(X, Y, mode)
            tv = check(X, Y, grid=s)
            rep.add(X.label, Y.label, ms.outcome, tv.outcome, iff=True, mode=mode, grid_points=int(s.size))


def _mean(X: LatticePmf) -> float:
    return delta_moment(X, 1) if X.convention == "nabla" else nabla_moment(X, 1)


def _thm_5_6(rep, battery, cfg):
    for X, Y in battery_pairs(battery):
        lt = check_Lt(X, Y)
        rep.add(X.label, Y.label, check_Lt_r(X, Y).outcome, lt.outcome, premise_relation="Lt-r")
        rep.add(X.label, Y.label, check_r_Lt_r(X, Y).outcome, lt.outcome, premise_relation="r-Lt-r")
        mx, my = _mean(X), _mean(Y)
        concl = "holds" if mx <= my + 1e-8 else "fails"
        rep.add(X.label, Y.label, lt.outcome, concl, premise_relation="Lt", conclusion_relation="mean")


def _thm_5_6_atom(rep, battery, cfg):
    """r-Lt-r => Lt for nabla pairs with P(X = 1) >= P(Y = 1).

    The nabla transform keeps L(1) = P(X = 1), so the increasing ratio
    (1 - L_X)/(1 - L_Y) is only bounded by (1 - P(X=1))/(1 - P(Y=1)).
    Informational; pairs outside the atom condition are not applicable.
    """
    for X, Y in battery_pairs(battery):
        if X.convention == "nabla" and X.pmf(1) < Y.pmf(1) - 1e-12:
            rep.add(X.label, Y.label, "n/a", "n/a")
            continue
        rep.add(X.label, Y.label, check_r_Lt_r(X, Y).outcome, check_Lt(X, Y).outcome)


def _thm_5_7(rep, battery, cfg):
    holding = [(X, Y) for X, Y in battery_pairs(battery, "nabla") if check_Lt_r(X, Y).holds]
    partners = holding[:: max(1, len(holding) // 10)][:10]
    for X1, Y1 in holding:
        for X2, Y2 in partners:
            v = check_Lt_r(lattice_sum(X1, X2), lattice_sum(Y1, Y2))
            rep.add(f"{X1.label}+{X2.label}", f"{Y1.label}+{Y2.label}", "holds", v.outcome)


def _thm_5_8(rep, battery, cfg):
    g = standard_grid("nabla")
    summands = [f(*a, BATTERY_EPS) for f, a in COMPOUND_SUMMANDS]
    for N1, N2 in battery_pairs(battery, "nabla"):
        for X in summands:
            lx = laplace(X)
            u = np.clip(lx.complement(g), 0.0, 1.0)
            l1, l2 = compound_laplace(N1, X)(g), compound_laplace(N2, X)(g)
            c1 = u + lx(g) * laplace(N1).complement(u)
            c2 = u + lx(g) * laplace(N2).complement(u)
            rep.add(N1.label, N2.label, check_Lt_r(N1, N2).outcome,
                    ratio_verdict("Lt-r", l1, l2, "increasing", g).outcome, summand=X.label, relation="Lt-r")
            rep.add(N1.label, N2.label, check_r_Lt_r(N1, N2).outcome,
                    ratio_verdict("r-Lt-r", c1, c2, "increasing", g).outcome, summand=X.label, relation="r-Lt-r")


def _parent_grid(parent: ContinuousDist):
    g = standard_grid("nabla")
    return g, parent.quantile(g)


def _thm_5_9a(rep, battery, cfg):
    parent = exponential(1.0)
    g, x = _parent_grid(parent)
    for N1, N2 in battery_pairs(battery, "nabla"):
        for i in (1, 2):
            s1, s2 = OsSpec(i, parent, N1), OsSpec(i, parent, N2)
            if s1.conditioning <= 0 or s2.conditioning <= 0:
                rep.add(N1.label, N2.label, "n/a", "n/a", iff=True, i=i)
                continue
            prem = check_D_i_Lt_r(N1, N2, i)
            concl = ratio_verdict("lr", os_pdf_random_size(s2, x), os_pdf_random_size(s1, x), "decreasing", x)
            rep.add(N1.label, N2.label, prem.outcome, concl.outcome, iff=True, i=i)


def _min_law(N, parent, x):
    F = parent.cdf(x)
    return GridLaw(x, extreme_min_pdf(N, parent, x), laplace(N).complement(F), extreme_min_sf(N, parent, x), N.label)


def _thm_6_3(order):
    def run(rep, battery, cfg):
        parent = exponential(1.0)
        g, x = _parent_grid(parent)
        for N1, N2 in battery_pairs(battery, "nabla"):
            m1, m2 = _min_law(N1, parent, x), _min_law(N2, parent, x)
            if order == "a":
                prem = check_d_i_Lt_r(N1, N2, 1)
                concl = check_classical("lr", m2, m1)
                rep.add(N1.label, N2.label, prem.outcome, concl.outcome, iff=True)
            elif order == "c":
                rep.add(N1.label, N2.label, check_Lt_r(N1, N2).outcome, check_classical("hr", m2, m1).outcome)
            else:
                rep.add(N1.label, N2.label, check_r_Lt_r(N1, N2).outcome, check_classical("rh", m2, m1).outcome)

    return run


def _thm_6_2(rep, battery, cfg, start=0):
    for conv in ("nabla", "delta"):
        g = standard_grid(conv)
        mats = {}

        def mat(Z, c):
            if (id(Z), c) not in mats:
                mats[id(Z), c] = reliability_matrix(Z, g, NMAX, c)
            return mats[id(Z), c]

        for X, Y in battery_pairs(battery, conv):
            c = _common_offset(X, Y)
            if c is None:
                rep.add(X.label, Y.label, "n/a", "n/a")
                continue
            rx, ry = mat(X, c), mat(Y, c)
            outs = []
            for n in range(1, NMAX + 1):
                a, b = rx[:, n], ry[:, n]
                if not np.any(a > TINY) or not np.any(b > TINY):
                    continue  # identically zero column: constant ratio
                outs.append(ratio_verdict("d-Lt-r", a, b, "decreasing", g).outcome)
            prem = "fails" if "fails" in outs else ("holds" if outs and "inconclusive" not in outs else "inconclusive")
            concl = ns_hazard_compare(Y, X, S_SET[conv], NMAX, offset=c, start=start)
            rep.add(X.label, Y.label, prem, concl.outcome)


def _thm_6_1(rep, battery, cfg):
    """Frailty populations under the lattice kernel, exponential baseline rate 1.

    Population survival is L_U(t); the premise d^(n)-Lt-r of the frailties
    is compared with hr (n = 0) and lr (n = 1) of the populations on the
    delta grid, and each population is checked by simulation (KS).
    """
    from .frailty import Baseline

    base = Baseline("exponential", rate=1.0)
    t = standard_grid("delta")
    small = SimConfig(cfg.seed, min(cfg.replications, 20_000))
    ks_ok = {}
    for k, U in enumerate(battery["delta"]):
        def work(rng, size, U=U):
            u = sample_lattice(U, rng, size)
            v = 1.0 - rng.random(size)
            return (v ** (-1.0 / (u + 1.0)) - 1.0) / base.rate

        T = np.concatenate(_chunked(small, work, salt=100 + k))
        L = laplace(U)
        D = ks_statistic(T, lambda z: L.complement(np.maximum(base.cum_hazard(z), 0.0)))
        ks_ok[U.label] = D < ks_critical(T.size)
    z = np.zeros_like(t)
    for U1, U2 in battery_pairs(battery, "delta"):
        for n, cls in ((0, "hr"), (1, "lr")):
            if n == 0:
                prem = ratio_verdict("d0-Lt-r", laplace(U2)(t), laplace(U1)(t), "decreasing", t)
                f = lambda U: GridLaw(t, z, 1 - laplace(U)(base.cum_hazard(t)), laplace(U)(base.cum_hazard(t)))
            else:
                prem = check_d_i_Lt_r(U1, U2, 1, grid=t)
                f = lambda U: GridLaw(t, base.hazard(t) * np.abs(derivative_k(U, 1)(base.cum_hazard(t))), z, z)
            concl = check_classical(cls, f(U2), f(U1))
            sim = "holds" if ks_ok[U1.label] and ks_ok[U2.label] else "fails"
            rep.add(U1.label, U2.label, prem.outcome, concl.outcome if sim == "holds" else "fails", iff=True,
                    n=n, simulation_ks=sim)


THEOREMS = {
    "5.1": _thm_5_1,
    "5.3": _thm_5_3,
    "5.4-consistency": _thm_5_4,
    "5.6": _thm_5_6,
    "5.7": _thm_5_7,
    "5.8": _thm_5_8,
    "5.9a": _thm_5_9a,
    "6.1": _thm_6_1,
    "6.2": _thm_6_2,
    "5.6-atom": _thm_5_6_atom,
    "6.2-n1": lambda rep, battery, cfg: _thm_6_2(rep, battery, cfg, start=1),
    "6.3a": _thm_6_3("a"),
    "6.3c": _thm_6_3("c"),
    "6.3d": _thm_6_3("d"),
}


# restricted variants that isolate the failing step; not part of the literal statements
INFORMATIONAL = ("5.6-atom", "6.2-n1")


def run_header(cfg: SimConfig) -> dict:
    return {
        "version": __version__,
        "seed": cfg.seed,
        "rng": RNG_NAME,
        "replications": cfg.replications,
        "grid": {"nabla": grid_spec(standard_grid("nabla"), "standard"), "delta": grid_spec(standard_grid("delta"), "standard")},
        "tolerances": {"monotonicity_rel": current_tol(), "underflow": TINY, "battery_eps": BATTERY_EPS},
    }


def verify_theorem(theorem: str, battery: dict | None = None, cfg: SimConfig | None = None) -> TheoremReport:
    """Wire a theorem's premise and conclusion checks across the battery pairs."""
    if theorem not in THEOREMS:
        raise DomainError(f"unknown theorem id {theorem!r}; known: {sorted(THEOREMS)}")
    battery = standard_battery() if battery is None else battery
    if not any(len(v) > 1 for v in battery.values()):
        raise DomainError("battery needs at least two members of one convention")
    cfg = cfg or SimConfig()
    rep = TheoremReport(theorem, header=run_header(cfg))
    THEOREMS[theorem](rep, battery, cfg)
    return rep
