"""Run configuration: YAML ingestion, validation, defaults and round-trip dump.

Every block is optional; an empty document yields the default run (fused
silica, two-tone modulation of the first ultraviolet resonance at Omega/5 and
Omega/6, delta_n = 1e-3 at 0.65 um, tau = 42 fs, 0.4-2.0 um sweep).
"""
from __future__ import annotations

import difflib
import io
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from .errors import ConfigError
from .medium import FS_TO_UM, MediumSpec, Resonance, eps_for_delta_n, fused_silica
from .modulation import ModulationSpec
from .propagators import MIXING_MODES

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SweepSpec:
    kind: str  # "lambda" or "k"
    lo: float
    hi: float
    points: int


@dataclass(frozen=True)
class GridSpec:
    k_min: float
    k_max: float
    points: int


@dataclass(frozen=True)
class OutputSpec:
    csv: str = "spectrum.csv"
    peaks: str = "peaks.json"


@dataclass(frozen=True)
class FlagSpec:
    mixing_mode: str = "analytic"
    include_subleading: bool = False
    threads: int = 1


@dataclass(frozen=True)
class FiberRun:
    delta: float = 1e-3
    modes: Tuple[Tuple[int, int], ...] = ((0, 0), (1, 0), (1, 1))
    k_min: float = 1.0
    k_max: float = 25.0
    points: int = 200


@dataclass(frozen=True)
class OracleRun:
    omega: float = 1.0
    eps: float = 1e-3
    nu: float = 2.0
    tau: float = 3.0
    t_i: float = -6.0
    t_f: float = 6.0
    t_prime: float = 0.7
    points: int = 121


@dataclass(frozen=True)
class RateRun:
    A_spot: float = 250.0
    repetition_rate: float = 1e6


@dataclass(frozen=True)
class RunConfig:
    medium: MediumSpec
    modulation: ModulationSpec
    sweep: SweepSpec
    processes: Tuple[tuple, ...]
    outputs: OutputSpec = OutputSpec()
    flags: FlagSpec = FlagSpec()
    branches: GridSpec = GridSpec(0.01, 25.0, 500)
    fiber: FiberRun = FiberRun()
    oracle: OracleRun = OracleRun()
    rate: RateRun = RateRun()


_KEYS = {
    "": {"schema", "medium", "modulation", "sweep", "processes", "outputs", "flags",
         "branches", "fiber", "oracle", "rate"},
    "medium": {"name", "resonances"},
    "modulation": {"target_m", "eps", "delta_n_at_lambda", "nu1", "nu2", "single_tone", "tau_fs", "tau_um"},
    "modulation.delta_n_at_lambda": {"delta_n", "lambda_um"},
    "sweep": {"lambda_min_um", "lambda_max_um", "k_min", "k_max", "points"},
    "processes": {"intra", "inter"},
    "outputs": {"csv", "peaks"},
    "flags": {"mixing_mode", "include_subleading", "threads"},
    "branches": {"k_min", "k_max", "points"},
    "fiber": {"delta", "modes", "k_min", "k_max", "points"},
    "oracle": {"omega", "eps", "nu", "tau", "t_i", "t_f", "t_prime", "points"},
    "rate": {"A_spot", "repetition_rate"},
}


def _check_keys(block: dict, path: str):
    if not isinstance(block, dict):
        raise ConfigError(path or "<root>", "must be a mapping")
    allowed = _KEYS[path]
    for key in block:
        if key not in allowed:
            hint = difflib.get_close_matches(str(key), sorted(allowed), n=1)
            where = f"{path}.{key}" if path else str(key)
            raise ConfigError(where, "is not a recognised key"
                              + (f" (did you mean '{hint[0]}'?)" if hint else ""))


def _num(block, key, path, default=None, positive=False, nonneg=False, integer=False):
    v = block.get(key, default)
    where = f"{path}.{key}"
    if v is None:
        return None
    if isinstance(v, str):
        # YAML 1.1 reads exponents without a sign (1.0e6) as strings
        try:
            v = float(v)
        except ValueError:
            raise ConfigError(where, "must be a number") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(where, "must be a number")
    if integer:
        if int(v) != v:
            raise ConfigError(where, "must be an integer")
        v = int(v)
    else:
        v = float(v)
    if not np.isfinite(v):
        raise ConfigError(where, "must be finite")
    if positive and not v > 0:
        raise ConfigError(where, "must be > 0")
    if nonneg and v < 0:
        raise ConfigError(where, "must be >= 0")
    return v


def _medium(block) -> MediumSpec:
    _check_keys(block, "medium")
    name = str(block.get("name", "fused-silica"))
    res = block.get("resonances")
    if res is None:
        if name != "fused-silica":
            raise ConfigError("medium.resonances", "required for a custom medium")
        return fused_silica()
    if not isinstance(res, list) or not res:
        raise ConfigError("medium.resonances", "must be a non-empty list")
    out = []
    for j, r in enumerate(res):
        p = f"medium.resonances[{j}]"
        if not isinstance(r, dict):
            raise ConfigError(p, "must be a mapping")
        keys = set(r)
        if keys == {"lambda_um", "B"}:
            lam = _num(r, "lambda_um", p, positive=True)
            B = _num(r, "B", p, nonneg=True)
            out.append(Resonance.from_sellmeier(lam, B))
        elif keys == {"omega", "g"}:
            out.append(Resonance(_num(r, "omega", p, positive=True), _num(r, "g", p, nonneg=True)))
        else:
            raise ConfigError(p, "needs either {lambda_um, B} or {omega, g}")
    try:
        return MediumSpec(tuple(out), name)
    except ValueError as e:
        raise ConfigError("medium.resonances", str(e)) from None


def _modulation(block, medium: MediumSpec) -> ModulationSpec:
    _check_keys(block, "modulation")
    p = "modulation"
    m = _num(block, "target_m", p, 2, integer=True)
    if not 1 <= m <= medium.N:
        raise ConfigError("modulation.target_m", f"must lie in 1..{medium.N}")
    if "tau_fs" in block and "tau_um" in block:
        raise ConfigError(p, "give only one of tau_fs and tau_um")
    if "tau_um" in block:
        tau = _num(block, "tau_um", p, positive=True)
    else:
        tau = _num(block, "tau_fs", p, 42.0, positive=True) * FS_TO_UM
    Om = medium.resonances[m - 1].omega_res
    nu1 = _num(block, "nu1", p, Om / 5, positive=True)
    single = block.get("single_tone", False)
    if not isinstance(single, bool):
        raise ConfigError("modulation.single_tone", "must be true or false")
    nu2 = None if single else _num(block, "nu2", p, Om / 6, positive=True)
    if "eps" in block and "delta_n_at_lambda" in block:
        raise ConfigError(p, "give only one of eps and delta_n_at_lambda")
    if "eps" in block:
        eps = _num(block, "eps", p, nonneg=True)
    else:
        dn = block.get("delta_n_at_lambda", {"delta_n": 1e-3, "lambda_um": 0.65})
        _check_keys(dn, "modulation.delta_n_at_lambda")
        q = "modulation.delta_n_at_lambda"
        target = _num(dn, "delta_n", q, 1e-3, nonneg=True)
        lam = _num(dn, "lambda_um", q, 0.65, positive=True)
        try:
            eps = eps_for_delta_n(medium, m, target, lam)
        except Exception as e:  # stop band, zero coupling, pole
            raise ConfigError(q, str(e)) from None
    return ModulationSpec(eps, nu1, nu2, tau, m)


def _sweep(block) -> SweepSpec:
    _check_keys(block, "sweep")
    p = "sweep"
    has_l = any(k in block for k in ("lambda_min_um", "lambda_max_um"))
    has_k = any(k in block for k in ("k_min", "k_max"))
    if has_l and has_k:
        raise ConfigError(p, "wavelength and k ranges are mutually exclusive")
    pts = _num(block, "points", p, 4000, integer=True)
    if pts < 3:
        raise ConfigError("sweep.points", "must be >= 3")
    if has_k:
        lo, hi = _num(block, "k_min", p, positive=True), _num(block, "k_max", p, positive=True)
        kind = "k"
    else:
        lo = _num(block, "lambda_min_um", p, 0.4, positive=True)
        hi = _num(block, "lambda_max_um", p, 2.0, positive=True)
        kind = "lambda"
    if lo is None or hi is None or not lo < hi:
        raise ConfigError(p, "needs min < max")
    return SweepSpec(kind, lo, hi, pts)


def _processes(block, medium) -> Tuple[tuple, ...]:
    _check_keys(block, "processes")
    intra = block.get("intra", [1])
    inter = block.get("inter", [[1, 0]])
    nb = medium.N + 1
    out = []
    for j, a in enumerate(intra or []):
        if not isinstance(a, int) or not 0 <= a < nb:
            raise ConfigError(f"processes.intra[{j}]", f"must be a branch index in 0..{nb - 1}")
        out.append(("intra", a))
    for j, pr in enumerate(inter or []):
        where = f"processes.inter[{j}]"
        if not (isinstance(pr, list) and len(pr) == 2 and all(isinstance(x, int) for x in pr)):
            raise ConfigError(where, "must be a pair [alpha, alpha']")
        if not all(0 <= x < nb for x in pr):
            raise ConfigError(where, f"branch indices must lie in 0..{nb - 1}")
        if pr[0] == pr[1]:
            raise ConfigError(where, "needs two distinct branches")
        out.append(("inter", pr[0], pr[1]))
    if not out:
        raise ConfigError("processes", "at least one process is required")
    return tuple(out)


def _grid(block, path, default: GridSpec) -> GridSpec:
    _check_keys(block, path)
    g = GridSpec(_num(block, "k_min", path, default.k_min, nonneg=True),
                 _num(block, "k_max", path, default.k_max, positive=True),
                 _num(block, "points", path, default.points, integer=True))
    if not g.k_min < g.k_max or g.points < 2:
        raise ConfigError(path, "needs k_min < k_max and points >= 2")
    return g


def from_dict(doc: Optional[Dict[str, Any]]) -> RunConfig:
    """Validate a parsed document and apply defaults."""
    doc = {} if doc is None else doc
    _check_keys(doc, "")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError("schema", f"unsupported version {schema!r} (expected {SCHEMA_VERSION})")
    medium = _medium(doc.get("medium") or {})
    mod = _modulation(doc.get("modulation") or {}, medium)
    sweep = _sweep(doc.get("sweep") or {})
    procs = _processes(doc.get("processes") or {}, medium)
    ob = doc.get("outputs") or {}
    _check_keys(ob, "outputs")
    outputs = OutputSpec(str(ob.get("csv", "spectrum.csv")), str(ob.get("peaks", "peaks.json")))
    fb = doc.get("flags") or {}
    _check_keys(fb, "flags")
    mode = fb.get("mixing_mode", "analytic")
    if mode not in MIXING_MODES:
        raise ConfigError("flags.mixing_mode", f"must be one of {', '.join(MIXING_MODES)}")
    sub = fb.get("include_subleading", False)
    if not isinstance(sub, bool):
        raise ConfigError("flags.include_subleading", "must be true or false")
    threads = _num(fb, "threads", "flags", 1, integer=True)
    if threads < 1:
        raise ConfigError("flags.threads", "must be >= 1")
    flags = FlagSpec(mode, sub, threads)
    branches = _grid(doc.get("branches") or {}, "branches", GridSpec(0.01, 25.0, 500))
    fib = doc.get("fiber") or {}
    _check_keys(fib, "fiber")
    d = FiberRun()
    modes = fib.get("modes", [list(m) for m in d.modes])
    if not (isinstance(modes, list) and all(isinstance(m, list) and len(m) == 2
                                            and all(isinstance(x, int) and x >= 0 for x in m) for m in modes)):
        raise ConfigError("fiber.modes", "must be a list of [n, m] pairs of nonnegative integers")
    fiber = FiberRun(_num(fib, "delta", "fiber", d.delta, nonneg=True), tuple(tuple(m) for m in modes),
                     _num(fib, "k_min", "fiber", d.k_min, positive=True),
                     _num(fib, "k_max", "fiber", d.k_max, positive=True),
                     _num(fib, "points", "fiber", d.points, integer=True))
    orc = doc.get("oracle") or {}
    _check_keys(orc, "oracle")
    o = OracleRun()
    oracle = OracleRun(*(_num(orc, f, "oracle", getattr(o, f), integer=(f == "points"))
                         for f in ("omega", "eps", "nu", "tau", "t_i", "t_f", "t_prime", "points")))
    if not oracle.t_i < oracle.t_prime < oracle.t_f:
        raise ConfigError("oracle", "needs t_i < t_prime < t_f")
    rb = doc.get("rate") or {}
    _check_keys(rb, "rate")
    rate = RateRun(_num(rb, "A_spot", "rate", 250.0, nonneg=True),
                   _num(rb, "repetition_rate", "rate", 1e6, nonneg=True))
    return RunConfig(medium, mod, sweep, procs, outputs, flags, branches, fiber, oracle, rate)


def load_config(source=None) -> RunConfig:
    """Load from a path, ``"-"``/None for stdin, or a text stream."""
    try:
        if source is None or source == "-":
            text = sys.stdin.read()
        elif isinstance(source, io.IOBase) or hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise ConfigError("", f"cannot read config: {e}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError("", f"malformed YAML: {e}") from None
    return from_dict(doc)


def to_dict(cfg: RunConfig) -> Dict[str, Any]:
    """Fully resolved document; loading it reproduces ``cfg`` exactly."""
    m = cfg.modulation
    mod = {"target_m": m.target_m, "eps": m.eps, "nu1": m.nu1}
    if m.nu2 is None:
        mod["single_tone"] = True
    else:
        mod["nu2"] = m.nu2
    mod["tau_um"] = m.tau
    sw = cfg.sweep
    sweep = ({"lambda_min_um": sw.lo, "lambda_max_um": sw.hi} if sw.kind == "lambda"
             else {"k_min": sw.lo, "k_max": sw.hi})
    sweep["points"] = sw.points
    return {
        "schema": SCHEMA_VERSION,
        "medium": {"name": cfg.medium.name,
                   "resonances": [{"omega": r.omega_res, "g": r.g} for r in cfg.medium.resonances]},
        "modulation": mod,
        "sweep": sweep,
        "processes": {"intra": [p[1] for p in cfg.processes if p[0] == "intra"],
                      "inter": [[p[1], p[2]] for p in cfg.processes if p[0] == "inter"]},
        "outputs": {"csv": cfg.outputs.csv, "peaks": cfg.outputs.peaks},
        "flags": {"mixing_mode": cfg.flags.mixing_mode, "include_subleading": cfg.flags.include_subleading,
                  "threads": cfg.flags.threads},
        "branches": vars(cfg.branches).copy(),
        "fiber": {**vars(cfg.fiber), "modes": [list(x) for x in cfg.fiber.modes]},
        "oracle": vars(cfg.oracle).copy(),
        "rate": vars(cfg.rate).copy(),
    }


def _plain(x):
    """Convert numpy scalars and tuples to plain YAML-safe Python values."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(_plain(to_dict(cfg)), sort_keys=False)
