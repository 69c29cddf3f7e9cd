"""Command-line front end.

Exit codes: 0 success, 1 physics-check failure, 2 usage or config error.
"""
import argparse
from dataclasses import asdict
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config, to_experiment
from .dense import CutoffError
from .experiment import (
    NoDataError,
    estimate_visibility,
    fit_fringe,
    run_fringe_scan,
    run_witness,
    threshold_sweep,
)
from .macrostate import ConvergenceError, PhiPerp, PhiPlus, make_gain, occupation_window, window_for_mass
from .oracle import oracle_report
from .report import Manifest, heatmap_svg, line_plot_svg, write_csv, write_json

EXIT_OK, EXIT_PHYSICS, EXIT_USAGE = 0, 1, 2

# published experimental values, echoed next to the simulated ones
REFERENCE_N = 3.5e4
REFERENCE_CONCURRENCE = 0.10


class UsageError(Exception):
    pass


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _overrides(args):
    return {
        "seed": getattr(args, "seed", None),
        "trials": getattr(args, "trials", None),
        "workers": getattr(args, "threads", None),
        "threshold_multiple": getattr(args, "threshold_multiple", None),
    }


def cmd_distribution(args) -> int:
    if not (math.isfinite(args.g) and args.g >= 0):
        raise UsageError("--g must be finite and >= 0")
    gain = make_gain(args.g)
    label = PhiPlus(0.0) if args.label == "plus" else PhiPerp(0.0)
    try:
        odd, even = window_for_mass(gain, 1e-7)
    except ConvergenceError as e:
        if args.max_p is None or args.max_q is None:
            print(f"error: {e}; pass --max-p/--max-q explicitly", file=sys.stderr)
            return EXIT_USAGE
        odd = even = 0
    own_p, own_q = (even, odd) if label.perp else (odd, even)
    max_p = args.max_p if args.max_p is not None else own_p
    max_q = args.max_q if args.max_q is not None else own_q
    if max_p < 0 or max_q < 0:
        raise UsageError("--max-p/--max-q must be >= 0")
    grid = occupation_window(label, gain, max_p, max_q)
    out = _out_dir(args.out)
    man = Manifest("distribution", {"g": args.g, "label": args.label, "max_p": max_p, "max_q": max_q}, None)
    p, q = np.nonzero(grid)
    man.add(write_csv(out / "distribution.csv", "distribution",
                      ((int(a), int(b), grid[a, b]) for a, b in zip(p, q))))
    if args.svg:
        man.add(heatmap_svg(out / "distribution.svg", grid, title=f"P(p, q), g={args.g}, {args.label}"))
    mass = float(grid.sum())
    man.data["window_mass"] = mass
    man.write(out)
    print(f"wrote {len(p)} cells, window mass {mass:.12f}")
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    exp = to_experiment(cfg)
    scan = run_fringe_scan(exp)
    out = _out_dir(args.out)
    man = Manifest("scan", cfg, cfg["seed"])
    rows = [(phi, *c.as_tuple()) for phi, c in zip(scan.phi_A, scan.counts)]
    man.add(write_csv(out / "scan.csv", "scan", rows))
    phis = np.array(scan.phi_A)
    n_pp = np.array([c.n_pp for c in scan.counts], dtype=float)
    n_pm = np.array([c.n_pm for c in scan.counts], dtype=float)
    order = np.argsort(phis)
    man.add(line_plot_svg(out / "scan.svg", phis[order], {"[L_B+, D_A+]": n_pp[order], "[L_B-, D_A+]": n_pm[order]},
                          "phi_A (rad)", "coincidences", "fringe scan"))
    summary = {"threshold": scan.threshold, "mean_arm_signal": scan.pool.mean_arm_signal,
               "conclusive_per_point": [c.conclusive for c in scan.counts]}
    if len(phis) >= 3:
        fit = fit_fringe(phis, n_pp)
        summary["fit"] = asdict(fit)
        print(f"fit: offset={fit.offset:.4g} amplitude={fit.amplitude:.4g} "
              f"phase={fit.phase:.4f} R2={fit.r2:.5f}")
    man.add(write_json(out / "scan_fit.json", summary))
    man.write(out)
    return EXIT_OK


def cmd_witness(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    exp = to_experiment(cfg)
    try:
        w = run_witness(exp)
    except NoDataError as e:
        print(f"error: {e} (see --threshold-multiple and --trials)", file=sys.stderr)
        return EXIT_PHYSICS
    out = _out_dir(args.out)
    man = Manifest("witness", cfg, cfg["seed"])
    payload = {
        "V2": w.V2.value, "V2_err": w.V2.stderr,
        "V3": w.V3.value, "V3_err": w.V3.stderr,
        "S": w.S, "stderr": w.S_err, "significance_sigma": w.significance,
        "p_filter": w.p_filter, "p_filter_err": w.p_filter_err,
        "thresholds": list(w.thresholds),
        "inferred_N": {"unfiltered": w.inferred_N_unfiltered,
                       "unfiltered_err": w.inferred_N_unfiltered_err,
                       "accepted": w.inferred_N_accepted,
                       "reference": REFERENCE_N},
        "concurrence_report": {"method": "bell_diagonal_minimal_V1", "V1_min": w.V1_min,
                               "concurrence": w.concurrence, "reference": REFERENCE_CONCURRENCE},
        "violated": w.violated,
    }
    man.add(write_json(out / "witness.json", payload))
    man.write(out)
    print(json.dumps({k: payload[k] for k in ("V2", "V3", "S", "stderr", "p_filter", "violated")}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    try:
        thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    except ValueError:
        raise UsageError("--thresholds must be a comma-separated list of numbers") from None
    if not thresholds or any(t < 0 for t in thresholds) or thresholds != sorted(thresholds):
        raise UsageError("--thresholds must be nonnegative and sorted")
    exp = to_experiment(cfg)
    relative = not args.absolute
    curve = threshold_sweep(exp, thresholds, relative=relative)
    out = _out_dir(args.out)
    man = Manifest("sweep", {**cfg, "thresholds": thresholds, "relative": relative}, cfg["seed"])
    man.add(write_csv(out / "sweep.csv", "sweep",
                      [(c.threshold, c.p, c.p_err, c.V2, c.V2_err, c.V3, c.V3_err, c.S, c.S_err) for c in curve]))
    man.write(out)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if not (math.isfinite(args.g) and args.g >= 0):
        raise UsageError("--g must be finite and >= 0")
    try:
        results = oracle_report(make_gain(args.g), args.cutoff, draws=args.draws, seed=args.seed or 0)
    except CutoffError as e:
        report = {"passed": False, "error": str(e), "checks": []}
        print(json.dumps(report))
        return EXIT_PHYSICS
    report = {"passed": all(r.passed for r in results),
              "checks": [{k: (bool(v) if k == "passed" else v) for k, v in r.as_dict().items()}
                         for r in results]}
    text = json.dumps(report, default=float)
    print(text)
    if args.out:
        out = _out_dir(args.out)
        man = Manifest("oracle-check", {"g": args.g, "cutoff": args.cutoff, "draws": args.draws}, args.seed)
        man.add(write_json(out / "oracle_check.json", report))
        man.write(out)
    return EXIT_OK if report["passed"] else EXIT_PHYSICS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="micromacro", description="Micro-Macro entanglement simulator")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def run_opts(p):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--threshold-multiple", type=float)

    p = sub.add_parser("distribution", help="photon-number grid of a Macro-state")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--label", choices=["plus", "perp"], default="plus")
    p.add_argument("--max-p", type=int)
    p.add_argument("--max-q", type=int)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("scan", help="coincidences versus Alice phase")
    run_opts(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("witness", help="V2, V3 and the separability statistic")
    run_opts(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("sweep", help="filter threshold trade-off curve")
    run_opts(p)
    p.add_argument("--thresholds", required=True, help="comma-separated, sorted")
    p.add_argument("--absolute", action="store_true",
                   help="thresholds are absolute signal units, not multiples of the mean arm signal")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="sampler and mixture checks against the dense oracle")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--draws", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
