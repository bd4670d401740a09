"""Command-line front end.

Every subcommand builds a run configuration (the same dictionary a JSON
config file holds), validates it against :data:`CONFIG_SCHEMA` and runs it.
Exit codes: 0 success, 2 a checked order or theorem fails, 1 numerical or
I/O error, 64 malformed configuration, 65 domain violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import nullcontext

import jsonschema
import numpy as np

from . import __version__
from ._io import atomic_write, csv_text
from .distributions import (
    EPS_TRUNC,
    LatticePmf,
    degenerate,
    gamma_delta,
    gamma_nabla,
    geometric,
    read_csv,
    write_csv,
)
from .lattice import DomainError
from .montecarlo import (
    BATTERY_EPS,
    INFORMATIONAL,
    THEOREMS,
    SimConfig,
    ks_critical,
    ks_statistic,
    run_header,
    simulate_compound,
    simulate_fos,
    simulate_os,
    standard_battery,
    verify_theorem,
)
from .orders import (
    RELATIONS,
    TINY,
    check_classical,
    check_D_gamma_Lt_r,
    check_D_i_Lt_r,
    check_d_i_Lt_r,
    check_Lt,
    check_Lt_r,
    check_r_Lt_r,
    confirm,
    current_tol,
    grid_spec,
    tolerance,
)
from .ostats import (
    ContinuousDist,
    OsSpec,
    exponential,
    fos_cdf_random_size,
    fos_excluded_mass,
    fos_pdf_random_size,
    os_cdf_random_size,
    os_pdf_random_size,
    quantile_grid,
    uniform,
    weibull,
)
from .transforms import (
    DELTA_GRID,
    DOMAINS,
    GRID_SIZE,
    NABLA_GRID,
    compound_laplace,
    derivative_k,
    fractional_derivative_series,
    laplace,
    lstar_lstarstar,
    psi_density,
    standard_grid,
)

EXIT_OK, EXIT_ERROR, EXIT_FAILS, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 64, 65

COMMANDS = ("transform", "order-check", "os-pdf", "fos-pdf", "simulate", "verify", "battery")
TRANSFORM_KINDS = ("laplace", "complement", "derivative", "fractional", "lstar", "lstarstar", "psi")
SIM_KINDS = ("os", "fos", "compound")
BATTERIES = ("standard", "geometric-gamma")
THEOREM_IDS = tuple(THEOREMS)
LITERAL_THEOREMS = tuple(t for t in THEOREMS if t not in INFORMATIONAL)


def _when(command, required):
    return {"if": {"properties": {"command": {"const": command}}}, "then": {"required": required}}


CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "tsorder run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["command"],
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "x": {"type": "string", "description": "distribution spec, e.g. geometric:nabla:0.7"},
        "y": {"type": "string"},
        "size": {"type": "string", "description": "sample-size law N"},
        "summand": {"type": "string", "description": "summand law X of a compound sum"},
        "parent": {"type": "string", "description": "exponential:rate, uniform[:a:b] or weibull:k[:scale]"},
        "relation": {"enum": list(RELATIONS)},
        "kind": {"enum": sorted(set(TRANSFORM_KINDS) | set(SIM_KINDS))},
        "i": {"type": "integer", "minimum": 0},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "anchor": {"type": "integer", "minimum": 1},
        "strict": {"type": "boolean"},
        "confirm": {"type": "boolean"},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 2, "maximum": 8192},
                "lo": {"type": "number"},
                "hi": {"type": "number"},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "monotonicity_rel": {"type": "number", "minimum": 0},
                "truncation_eps": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "replications": {"type": "integer", "minimum": 1},
        "bins": {"type": "integer", "minimum": 1},
        "theorems": {"type": "array", "items": {"enum": list(THEOREM_IDS)}, "minItems": 1, "uniqueItems": True},
        "battery": {"enum": list(BATTERIES)},
        "out": {"type": "string"},
        "export": {"type": "string", "description": "directory for battery table CSVs"},
        "format": {"enum": ["csv", "json"]},
    },
    "allOf": [
        _when("transform", ["x"]),
        _when("order-check", ["relation", "x", "y"]),
        _when("os-pdf", ["i", "size", "parent"]),
        _when("fos-pdf", ["gamma", "size", "parent"]),
        _when("simulate", ["kind", "size"]),
    ],
}


class UsageError(Exception):
    """Malformed command line or configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def validate_config(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"config {where}: {exc.message}") from None
    return cfg


# spec parsing -----------------------------------------------------------------

def _floats(args, family, counts):
    if len(args) not in counts:
        raise UsageError(f"{family} takes {' or '.join(map(str, counts))} parameters, got {len(args)}")
    try:
        return [float(a) for a in args]
    except ValueError:
        raise UsageError(f"{family}: non-numeric parameter in {':'.join(args)}") from None


def _convention(family, value):
    if value not in ("nabla", "delta"):
        raise UsageError(f"{family}: convention must be nabla or delta, got {value!r}")
    return value


def parse_dist(text: str, eps: float = EPS_TRUNC) -> LatticePmf:
    """Lattice pmf from ``family:params`` mini-syntax.

    geometric:CONV:p, gamma_nabla:a:b, gamma_delta:a:b, degenerate:CONV:x,
    table:PATH[:CONV].
    """
    family, _, rest = text.partition(":")
    if family == "table":
        if not rest:
            raise UsageError("table needs a path")
        path, conv = rest, None
        head, _, tail = rest.rpartition(":")
        if head and tail in ("nabla", "delta"):
            path, conv = head, tail
        try:
            return read_csv(path, conv)
        except OSError as exc:
            raise UsageError(f"cannot read table {path}: {exc.strerror}") from None
    args = rest.split(":") if rest else []
    if family == "geometric":
        if not args:
            raise UsageError("geometric needs a convention and p")
        conv = _convention(family, args[0])
        (p,) = _floats(args[1:], family, (1,))
        return geometric(conv, p, eps)
    if family in ("gamma_nabla", "gamma_delta"):
        a, b = _floats(args, family, (2,))
        return (gamma_nabla if family == "gamma_nabla" else gamma_delta)(a, b, eps)
    if family == "degenerate":
        if not args:
            raise UsageError("degenerate needs a convention and a point")
        conv = _convention(family, args[0])
        (x,) = _floats(args[1:], family, (1,))
        return degenerate(conv, x)
    raise UsageError(f"unknown distribution family {family!r}")


def parse_parent(text: str) -> ContinuousDist:
    """exponential[:rate], uniform[:a:b], weibull:k[:scale]."""
    family, _, rest = text.partition(":")
    args = rest.split(":") if rest else []
    if family == "exponential":
        vals = _floats(args, family, (0, 1))
        rate = vals[0] if vals else 1.0
        if not rate > 0:
            raise DomainError("exponential rate must be positive")
        return exponential(rate)
    if family == "uniform":
        vals = _floats(args, family, (0, 2))
        a, b = vals if vals else (0.0, 1.0)
        if not a < b:
            raise DomainError("uniform needs a < b")
        return uniform(a, b)
    if family == "weibull":
        vals = _floats(args, family, (1, 2))
        if min(vals) <= 0:
            raise DomainError("weibull parameters must be positive")
        return weibull(*vals)
    raise UsageError(f"unknown parent family {family!r}")


# shared pieces ----------------------------------------------------------------

def _grid(cfg: dict, convention: str):
    """Standard grid unless ``grid`` overrides n and/or the interval (same spacing rule)."""
    over = cfg.get("grid") or {}
    n = over.get("n", GRID_SIZE)
    if "lo" not in over and "hi" not in over:
        return standard_grid(convention, n), "standard"
    lo0, hi0 = DELTA_GRID if convention == "delta" else NABLA_GRID
    lo, hi = over.get("lo", lo0), over.get("hi", hi0)
    dlo, dhi = DOMAINS[convention]
    if not (dlo < lo < hi < dhi) or not math.isfinite(hi):
        raise DomainError(f"grid [{lo}, {hi}] must lie strictly inside the {convention} domain")
    g = np.geomspace(lo, hi, n) if convention == "delta" else np.linspace(lo, hi, n)
    return g, "custom"


def _eps(cfg):
    return (cfg.get("tolerances") or {}).get("truncation_eps", EPS_TRUNC)


def _header(cfg: dict, grid=None, **extra) -> dict:
    h = {
        "version": __version__,
        "command": cfg["command"],
        "seed": cfg.get("seed", SimConfig.seed),
        "grid": grid if grid is not None else "none",
        "tolerances": {"monotonicity_rel": current_tol(), "underflow": TINY, "truncation_eps": _eps(cfg)},
    }
    h.update(extra)
    return h


def _csv_meta(header: dict) -> dict:
    return {k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v) for k, v in header.items()}


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _emit(cfg: dict, text: str, out=None):
    """Write atomically to ``out`` (or the config's), else print."""
    out = out or cfg.get("out")
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _emit_table(cfg, header, columns, rows):
    if cfg.get("format", "csv") == "json":
        body = {"header": header, "columns": columns, "rows": [[float(v) for v in r] for r in rows]}
        _emit(cfg, _json_text(body))
    else:
        _emit(cfg, csv_text(columns, rows, _csv_meta(header)))


def _note(msg: str):
    print(msg, file=sys.stderr)


# commands ---------------------------------------------------------------------

def cmd_transform(cfg: dict) -> int:
    X = parse_dist(cfg["x"], _eps(cfg))
    g, kind = _grid(cfg, X.convention)
    what = cfg.get("kind", "laplace")
    if what not in TRANSFORM_KINDS:
        raise UsageError(f"transform kind must be one of {TRANSFORM_KINDS}")
    if what == "laplace":
        vals = laplace(X)(g)
    elif what == "complement":
        vals = laplace(X).complement(g)
    elif what == "derivative":
        if "i" not in cfg:
            raise UsageError("derivative needs i")
        vals = derivative_k(X, cfg["i"])(g)
    elif what == "fractional":
        if "gamma" not in cfg:
            raise UsageError("fractional needs gamma")
        vals = fractional_derivative_series(X, cfg["gamma"])(g)
    elif what == "psi":
        vals = psi_density(X)(g)
    else:
        star, starstar = lstar_lstarstar(X)
        vals = (star if what == "lstar" else starstar)(g)
    header = _header(cfg, grid_spec(g, kind), distribution=X.label, kind=what)
    _emit_table(cfg, header, ["s", "value"], list(zip(g.tolist(), np.asarray(vals, float).tolist())))
    return EXIT_OK


def _order_verdict(cfg: dict, X: LatticePmf, Y: LatticePmf):
    rel = cfg["relation"]
    if rel in ("st", "hr", "rh", "lr"):
        return check_classical(rel, X, Y), None
    g, _ = _grid(cfg, X.convention)
    checks = {
        "Lt": (check_Lt, ()),
        "Lt-r": (check_Lt_r, ()),
        "r-Lt-r": (check_r_Lt_r, ()),
        "d_i-Lt-r": (check_d_i_Lt_r, (cfg.get("i", 1),)),
        "D_i-Lt-r": (check_D_i_Lt_r, (cfg.get("i", 1),)),
        "D_gamma-Lt-r": (check_D_gamma_Lt_r, (cfg.get("gamma"),)),
    }
    fn, extra = checks[rel]
    if rel == "D_gamma-Lt-r" and cfg.get("gamma") is None:
        raise UsageError("D_gamma-Lt-r needs gamma")
    if cfg.get("confirm") and "grid" not in cfg:
        return confirm(fn, X, Y, *extra), g
    return fn(X, Y, *extra, grid=g), g


def cmd_order_check(cfg: dict) -> int:
    eps = _eps(cfg)
    X, Y = parse_dist(cfg["x"], eps), parse_dist(cfg["y"], eps)
    if X.convention != Y.convention:
        raise DomainError("x and y must share a convention")
    v, g = _order_verdict(cfg, X, Y)
    header = _header(cfg, v.grid, x=X.label, y=Y.label)
    print(f"{X.label} <={v.relation} {Y.label}: {v.outcome} (max violation {v.max_violation:.3g})")
    if cfg.get("out"):
        _emit(cfg, _json_text({"header": header, "verdict": v.to_dict()}))
    return EXIT_FAILS if v.fails else EXIT_OK


def _os_spec(cfg: dict, fractional: bool) -> OsSpec:
    N = parse_dist(cfg["size"], _eps(cfg))
    parent = parse_parent(cfg.get("parent", "uniform"))
    if fractional:
        if N.convention != "delta":
            raise DomainError("fos-pdf needs a delta sample-size law")
        return OsSpec(cfg["gamma"], parent, N, anchor=cfg.get("anchor"))
    if N.convention != "nabla":
        raise DomainError("os-pdf needs a nabla sample-size law")
    if cfg["i"] < 1:
        raise DomainError("order-statistic index must be at least 1")
    return OsSpec(cfg["i"], parent, N, strict=cfg.get("strict", True))


def _curve(cfg: dict, spec: OsSpec, values, **extra) -> int:
    u = quantile_grid()
    x = spec.parent.quantile(u)
    header = _header(cfg, {"kind": "quantile-midpoints", "n": int(u.size)}, size=spec.size_dist.label,
                     parent=spec.parent.label, index=float(spec.index), conditioning=spec.conditioning, **extra)
    rows = list(zip(u.tolist(), x.tolist(), np.asarray(values(x), float).tolist()))
    _emit_table(cfg, header, ["u", "x", "value"], rows)
    return EXIT_OK


def cmd_os_pdf(cfg: dict) -> int:
    spec = _os_spec(cfg, fractional=False)
    if spec.conditioning <= 0:
        raise DomainError(f"P(N >= {int(spec.index) + int(spec.strict)}) is zero")
    return _curve(cfg, spec, lambda x: os_pdf_random_size(spec, x), strict=spec.strict)


def cmd_fos_pdf(cfg: dict) -> int:
    spec = _os_spec(cfg, fractional=True)
    excl = fos_excluded_mass(spec)
    return _curve(cfg, spec, lambda x: fos_pdf_random_size(spec, x), anchor=spec.anchor, excluded_mass=excl)


def _sim_config(cfg: dict) -> SimConfig:
    return SimConfig(
        seed=cfg.get("seed", SimConfig.seed),
        replications=cfg.get("replications", SimConfig.replications),
        strict_conditioning=cfg.get("strict", True),
        histogram_bins=cfg.get("bins", SimConfig.histogram_bins),
    )


def cmd_simulate(cfg: dict) -> int:
    sim = _sim_config(cfg)
    kind = cfg["kind"]
    if kind not in SIM_KINDS:
        raise UsageError(f"simulate kind must be one of {SIM_KINDS}")
    if kind == "compound":
        N = parse_dist(cfg["size"], _eps(cfg))
        X = parse_dist(cfg.get("summand", cfg.get("x", "")), _eps(cfg))
        g, gk = _grid(cfg, "nabla")
        emp = simulate_compound(N, X, sim, g)
        ana = compound_laplace(N, X)(g)
        dev = emp.max_deviation(ana)
        header = _header(cfg, grid_spec(g, gk), size=N.label, summand=X.label, replications=sim.replications,
                         max_deviation=dev, bound=5 / math.sqrt(sim.replications))
        _emit_table(cfg, header, ["s", "empirical", "analytic"], list(zip(g.tolist(), emp.values.tolist(), ana.tolist())))
        _note(f"compound transform: max deviation {dev:.3g} (bound {5 / math.sqrt(sim.replications):.3g})")
        return EXIT_OK
    if kind == "os":
        cfg.setdefault("i", 1)
        spec = _os_spec(cfg, fractional=False)
        sample = simulate_os(spec, sim)
        cdf = lambda x: os_cdf_random_size(spec, x)
    else:
        if "gamma" not in cfg:
            raise UsageError("simulate fos needs gamma")
        spec = _os_spec(cfg, fractional=True)
        sample = simulate_fos(spec, sim)
        cdf = lambda x: fos_cdf_random_size(spec, x)
    D = ks_statistic(sample.x, cdf)
    crit = ks_critical(sample.accepted)
    counts, edges, dens = sample.histogram(sim.histogram_bins)
    header = _header(cfg, {"kind": "u-histogram", "n": sim.histogram_bins}, size=spec.size_dist.label,
                     parent=spec.parent.label, index=float(spec.index), replications=sim.replications,
                     accepted=sample.accepted, tail_hits=sample.tail_hits, ks=D, ks_critical=crit)
    rows = [(float(a), float(b), int(c), float(d)) for a, b, c, d in zip(edges[:-1], edges[1:], counts, dens)]
    if cfg.get("format", "csv") == "json":
        _emit(cfg, _json_text({"header": header, "columns": ["u_lo", "u_hi", "count", "density"], "rows": rows}))
    else:
        _emit(cfg, csv_text(["u_lo", "u_hi", "count", "density"], rows, _csv_meta(header)))
    print(f"KS {D:.4g} (critical {crit:.4g}, accepted {sample.accepted}/{sample.draws})", file=sys.stderr)
    return EXIT_OK


def named_battery(name: str) -> dict:
    bat = standard_battery(BATTERY_EPS)
    if name == "standard":
        return bat
    keep = [Z for Z in bat["nabla"] if Z.label.startswith(("geometric", "gamma"))]
    return {"nabla": tuple(keep), "delta": bat["delta"]}


def cmd_verify(cfg: dict) -> int:
    ids = cfg.get("theorems") or list(LITERAL_THEOREMS)
    bat = named_battery(cfg.get("battery", "standard"))
    sim = _sim_config(cfg)
    reports = {t: verify_theorem(t, bat, sim) for t in ids}
    header = run_header(sim)
    header["battery"] = cfg.get("battery", "standard")
    body = {
        "header": header,
        "theorems": {t: {"summary": r.summary, "records": r.records} for t, r in reports.items()},
        "informational": sorted(t for t in ids if t in INFORMATIONAL),
    }
    _emit(cfg, _json_text(body))
    failed = []
    for t, r in reports.items():
        s = r.summary
        tag = " (informational)" if t in INFORMATIONAL else ""
        _note(f"{t}{tag}: {s['records']} records, {s['inconsistent']} inconsistent, "
              f"inconclusive rate {s['inconclusive_rate']:.3f}")
        if not r.passed and t not in INFORMATIONAL:
            failed.append(t)
    return EXIT_FAILS if failed else EXIT_OK


def cmd_battery(cfg: dict) -> int:
    from pathlib import Path

    bat = named_battery(cfg.get("battery", "standard"))
    members = []
    export = Path(cfg["export"]) if cfg.get("export") else None
    if export is not None:
        export.mkdir(parents=True, exist_ok=True)
    for conv in ("nabla", "delta"):
        for Z in bat[conv]:
            row = {"label": Z.label, "convention": conv, "offset": Z.offset, "support_points": len(Z),
                   "tail_mass": Z.tail_mass, "mean": Z.mean()}
            if export is not None:
                name = "".join(c if c.isalnum() else "_" for c in Z.label).strip("_") + ".csv"
                write_csv(Z, export / name)
                row["file"] = name
            members.append(row)
    header = _header(cfg, None, battery=cfg.get("battery", "standard"), battery_eps=BATTERY_EPS)
    _emit(cfg, _json_text({"header": header, "members": members}))
    return EXIT_OK


HANDLERS = {
    "transform": cmd_transform,
    "order-check": cmd_order_check,
    "os-pdf": cmd_os_pdf,
    "fos-pdf": cmd_fos_pdf,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "battery": cmd_battery,
}


def run(cfg: dict) -> int:
    """Validate and execute one run configuration; returns the exit status."""
    validate_config(cfg)
    tol = (cfg.get("tolerances") or {}).get("monotonicity_rel")
    with tolerance(tol) if tol is not None else nullcontext():
        return HANDLERS[cfg["command"]](dict(cfg))


# argument parsing -------------------------------------------------------------

def _common(p, grid=False, sim=False, out=True):
    if out:
        p.add_argument("--out", help="output file (written atomically); default stdout")
        p.add_argument("--format", choices=["csv", "json"])
    if grid:
        p.add_argument("--grid-n", type=int, help="grid points (default 512)")
        p.add_argument("--grid-lo", type=float)
        p.add_argument("--grid-hi", type=float)
    if sim:
        p.add_argument("--seed", type=int)
        p.add_argument("--replications", type=int)
    p.add_argument("--tol", type=float, help="relative monotonicity tolerance (default 1e-9)")
    p.add_argument("--eps", type=float, help="truncation epsilon for infinite families (default 1e-12)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tsorder", description="Transform-based stochastic orders on discrete time scales.")
    ap.add_argument("--version", action="version", version=f"tsorder {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="execute a JSON run configuration")
    p.add_argument("config")

    sub.add_parser("schema", help="print the JSON schema of run configurations")

    p = sub.add_parser("transform", help="tabulate a transform on a grid")
    p.add_argument("--x", required=True)
    p.add_argument("--kind", choices=TRANSFORM_KINDS, default="laplace")
    p.add_argument("--i", type=int, help="derivative order")
    p.add_argument("--gamma", type=float, help="fractional order")
    _common(p, grid=True)

    p = sub.add_parser("order-check", help="decide X <=_relation Y")
    p.add_argument("--relation", required=True, choices=RELATIONS)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--confirm", action="store_true", help="repeat on doubled grids up to 8192 points")
    _common(p, grid=True)

    p = sub.add_parser("os-pdf", help="density of the i-th order statistic under a random sample size")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--size", required=True)
    p.add_argument("--parent", default="uniform")
    p.add_argument("--non-strict", action="store_true", help="condition on N >= i instead of N >= i + 1")
    _common(p)

    p = sub.add_parser("fos-pdf", help="density of a fractional order statistic")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--anchor", type=int)
    p.add_argument("--size", required=True)
    p.add_argument("--parent", default="uniform")
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo histogram or compound transform")
    p.add_argument("--kind", choices=SIM_KINDS, required=True)
    p.add_argument("--size", required=True)
    p.add_argument("--parent", default="uniform")
    p.add_argument("--summand", help="summand law for --kind compound")
    p.add_argument("--i", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--bins", type=int)
    p.add_argument("--non-strict", action="store_true")
    _common(p, grid=True, sim=True)

    p = sub.add_parser("verify", help="run the theorem-implication suite")
    p.add_argument("--theorem", action="append", choices=THEOREM_IDS + ("all",),
                   help="repeatable; default all literal statements")
    p.add_argument("--battery", choices=BATTERIES, default="standard")
    _common(p, sim=True)

    p = sub.add_parser("battery", help="list (and optionally export) the test battery")
    p.add_argument("--battery", choices=BATTERIES, default="standard")
    p.add_argument("--export", help="directory for table CSVs")
    _common(p)
    return ap


_PLAIN = ("x", "y", "size", "summand", "parent", "relation", "kind", "i", "gamma", "anchor", "seed",
          "replications", "bins", "battery", "out", "export", "format")


def config_from_args(ns: argparse.Namespace) -> dict:
    cfg = {"command": ns.command}
    for key in _PLAIN:
        val = getattr(ns, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(ns, "non_strict", False):
        cfg["strict"] = False
    if getattr(ns, "confirm", False):
        cfg["confirm"] = True
    grid = {k: getattr(ns, f"grid_{k}") for k in ("n", "lo", "hi") if getattr(ns, f"grid_{k}", None) is not None}
    if grid:
        cfg["grid"] = grid
    tol = {}
    if getattr(ns, "tol", None) is not None:
        tol["monotonicity_rel"] = ns.tol
    if getattr(ns, "eps", None) is not None:
        tol["truncation_eps"] = ns.eps
    if tol:
        cfg["tolerances"] = tol
    theorems = getattr(ns, "theorem", None)
    if theorems:
        cfg["theorems"] = list(THEOREM_IDS) if "all" in theorems else list(dict.fromkeys(theorems))
    return cfg


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"{path}: top level must be an object")
    return cfg


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        if ns.command == "schema":
            sys.stdout.write(_json_text(CONFIG_SCHEMA))
            return EXIT_OK
        cfg = load_config(ns.config) if ns.command == "run" else config_from_args(ns)
        return run(cfg)
    except UsageError as exc:
        _note(f"usage error: {exc}")
        return EXIT_USAGE
    except DomainError as exc:
        _note(f"domain error: {exc}")
        return EXIT_DOMAIN
    except (ArithmeticError, RuntimeError, OSError, ValueError) as exc:
        _note(f"error: {type(exc).__name__}: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
