"""Command-line front end: ``vacmix <subcommand> [--config PATH] ...``.

Subcommands
    branches         polariton branches and Hopfield weights (CSV)
    spectrum         pair-emission spectrum (CSV) and labelled peak report (JSON)
    oracle           Green's-function Born series vs exact ODE solution (CSV)
    fiber            graded-index fiber branches per transverse mode (CSV)
    states self-test quadrature cross-checks of the oscillator machinery
    rate             pairs per unit angle per pulse and per second (JSON)

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
import warnings
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .amplitudes import (Spectrum, emission_rate_per_angle, find_spectrum_peaks, k_grid_for_wavelengths,
                         process_name, resonance_conditions, spectrum, _condition_x)
from .branches import build_branch_table
from .config import RunConfig, load_config, from_dict
from .errors import ConfigError, VacmixError
from .fiber import FiberSpec, fiber_alpha, fiber_branches
from .propagators import MIXING_MODES, exact_green_oracle, green_series
from . import states

log = logging.getLogger("vacmix")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
MIXING_CONDITION = "w=(nu1+nu2)/2"


def _g17(x) -> str:
    return f"{x:.17g}"


def _write_csv(path: str, header: Sequence[str], rows) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_g17(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return path


def _write_json(path: str, obj) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# library-level drivers (usable without the argument parser)

def sweep_k_grid(cfg: RunConfig) -> np.ndarray:
    sw = cfg.sweep
    if sw.kind == "k":
        return np.linspace(sw.lo, sw.hi, sw.points)
    return k_grid_for_wavelengths(cfg.medium, sw.lo, sw.hi, sw.points)


def compute_spectrum(cfg: RunConfig) -> Tuple[Spectrum, list]:
    """Spectrum on the configured sweep plus its labelled peaks."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # grid refinement is reported via the log
        sp = spectrum(cfg.medium, cfg.modulation, sweep_k_grid(cfg), cfg.processes,
                      mode=cfg.flags.mixing_mode, include_subleading=cfg.flags.include_subleading,
                      threads=cfg.flags.threads)
    if sp.refined:
        log.info("k grid refined to %d points to resolve peak widths", len(sp.k))
    return sp, find_spectrum_peaks(sp)


def spectrum_rows(sp: Spectrum):
    """CSV rows: one per (k, process, order) with the coherent total repeated."""
    lam, tot = sp.lambda_vac, sp.total
    tol = 3.0 / sp.spec.tau
    per = []
    for p in sp.processes:
        name = process_name(p)
        conds = resonance_conditions(sp.spec, p)
        x = _condition_x(sp.omega, p)
        labels = [";".join(c for c, v in conds if abs(v - xx) <= tol) for xx in x]
        per.append((name, {o: sp.prob(name, o) for o in ("1", "2", "all")}, labels))
    for j in range(len(sp.k)):
        for name, P, labels in per:
            for o in ("1", "2", "all"):
                yield (float(sp.k[j]), float(lam[j]), name, o, float(P[o][j]), float(tot[j]), labels[j])


SPECTRUM_HEADER = ("k_um_inv", "lambda_vac_um", "process", "order", "prob", "total_prob", "labels")


def run_spectrum(cfg: RunConfig, out_dir: str = ".") -> Tuple[int, Dict[str, str]]:
    """Write the spectrum CSV and JSON peak report; returns (exit status, paths)."""
    sp, peaks = compute_spectrum(cfg)
    csv_path = _write_csv(os.path.join(out_dir, cfg.outputs.csv), SPECTRUM_HEADER, spectrum_rows(sp))
    report = {
        "mixing_mode": cfg.flags.mixing_mode,
        "include_subleading": cfg.flags.include_subleading,
        "max_prob": float(f"{float(np.max(sp.total)):.6g}"),
        "peaks": [p.as_dict() for p in peaks],
    }
    json_path = _write_json(os.path.join(out_dir, cfg.outputs.peaks), report)
    labelled = sum(p.condition != "unlabelled" for p in peaks)
    log.info("%d peaks (%d labelled) -> %s, %s", len(peaks), labelled, csv_path, json_path)
    return EXIT_OK, {"csv": csv_path, "peaks": json_path}


def estimate_rate(cfg: RunConfig, A_spot: Optional[float] = None,
                  repetition_rate: Optional[float] = None, spectrum_and_peaks=None) -> dict:
    """Pairs per unit angle per pulse at the frequency-mixing peak, and per second.

    A_spot is taken in um as given; rate = dP/dtheta * repetition_rate.
    Without a mixing peak (single tone, eps = 0) the rate is zero.
    """
    A = cfg.rate.A_spot if A_spot is None else float(A_spot)
    rep = cfg.rate.repetition_rate if repetition_rate is None else float(repetition_rate)
    sp, peaks = spectrum_and_peaks or compute_spectrum(cfg)
    mix = [p for p in peaks if p.condition == MIXING_CONDITION]
    if mix:
        pk = max(mix, key=lambda p: p.prob_max)
        lam, prob = pk.position_lambda, pk.prob_max
    else:
        lam, prob = float("nan"), 0.0
    per_pulse = emission_rate_per_angle(prob, A, lam, cfg.modulation.tau) if prob > 0 else 0.0
    return {"A_spot_um": A, "repetition_rate_hz": rep, "lambda_mix_um": lam, "prob_at_peak": prob,
            "dP_dtheta_per_pulse": per_pulse, "pairs_per_second": per_pulse * rep}


def run_branches(cfg: RunConfig, out_dir: str = ".") -> str:
    b = cfg.branches
    tab = build_branch_table(cfg.medium, np.linspace(b.k_min, b.k_max, b.points))
    rows = ((float(k), a, float(tab.omega[j, a]), float(tab.C[j, a]))
            for j, k in enumerate(tab.k_grid) for a in range(tab.omega.shape[1]))
    return _write_csv(os.path.join(out_dir, "branches.csv"), ("k", "alpha", "omega", "C"), rows)


def run_oracle(cfg: RunConfig, out_dir: str = ".") -> str:
    o = cfg.oracle
    shape = lambda t: np.cos(o.nu * t) * np.exp(-np.asarray(t) ** 2 / (2 * o.tau**2))
    W2 = lambda t: o.omega**2 * (1 + o.eps * shape(t))
    t = np.linspace(o.t_i, o.t_f, o.points)
    _, exact = exact_green_oracle(W2, o.t_i, o.t_f, o.t_prime, t_eval=t)
    d0, d1, d2 = green_series(o.omega, shape, o.t_i, o.t_f, o.t_prime, t)
    series = d0 + o.eps * d1 + o.eps**2 * d2
    rows = ((float(a), o.t_prime, float(b), float(c), float(b - c)) for a, b, c in zip(t, exact, series))
    return _write_csv(os.path.join(out_dir, "oracle.csv"),
                      ("t", "t_prime", "delta_exact", "delta_series", "residual"), rows)


def run_fiber(cfg: RunConfig, out_dir: str = ".") -> str:
    f = cfg.fiber
    fib = FiberSpec(cfg.medium, f.delta)
    k = np.linspace(f.k_min, f.k_max, f.points)
    rows = []
    for n, m in f.modes:
        om = fiber_branches(fib, k, n, m)
        for j in range(len(k)):
            for a in range(om.shape[1]):
                rows.append((float(k[j]), a, n, m, float(om[j, a]), float(fiber_alpha(fib, om[j, a]))))
    return _write_csv(os.path.join(out_dir, "fiber.csv"), ("k", "alpha", "n", "m", "omega", "alpha_k"), rows)


# ---------------------------------------------------------------------------
# argument parsing

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="YAML run config ('-' for stdin); defaults if omitted")
    p.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    p.add_argument("--threads", type=int, help="worker threads for the k sweep")
    p.add_argument("--mixing-mode", choices=MIXING_MODES, help="mixing-integral evaluation")
    p.add_argument("--include-subleading", action="store_true", default=None,
                   help="add the subleading interbranch term")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="vacmix", description="Vacuum radiation from multi-tone modulated media.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("branches", parents=[common], help="polariton branches and Hopfield weights")
    sub.add_parser("spectrum", parents=[common], help="pair-emission spectrum and peak report")
    sub.add_parser("oracle", parents=[common], help="Green's-function series vs exact ODE")
    sub.add_parser("fiber", parents=[common], help="graded-index fiber branches")
    st = sub.add_parser("states", parents=[common], help="oscillator-state utilities")
    st.add_argument("action", choices=["self-test"])
    r = sub.add_parser("rate", parents=[common], help="pair-rate estimate at the mixing peak")
    r.add_argument("--a-spot", type=float, help="spot size in um (default from config: 250)")
    r.add_argument("--rep-rate", type=float, help="repetition rate in Hz (default from config: 1e6)")
    return ap


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else from_dict({})
    flags = cfg.flags
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        flags = dataclasses.replace(flags, threads=args.threads)
    if args.mixing_mode is not None:
        flags = dataclasses.replace(flags, mixing_mode=args.mixing_mode)
    if args.include_subleading:
        flags = dataclasses.replace(flags, include_subleading=True)
    return dataclasses.replace(cfg, flags=flags)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out
    try:
        if args.command == "branches":
            print(run_branches(cfg, out))
        elif args.command == "spectrum":
            _, paths = run_spectrum(cfg, out)
            print(paths["csv"])
            print(paths["peaks"])
        elif args.command == "oracle":
            print(run_oracle(cfg, out))
        elif args.command == "fiber":
            print(run_fiber(cfg, out))
        elif args.command == "states":
            results = states.self_test()
            for name, ok, detail in results:
                print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
            return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC
        elif args.command == "rate":
            if args.a_spot is not None and args.a_spot < 0 or args.rep_rate is not None and args.rep_rate < 0:
                print("config error: --a-spot and --rep-rate must be >= 0", file=sys.stderr)
                return EXIT_CONFIG
            rep = estimate_rate(cfg, args.a_spot, args.rep_rate)
            _write_json(os.path.join(out, "rate.json"), rep)
            print(json.dumps(rep, indent=2))
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (VacmixError, ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as e:
        print(f"numeric failure ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
