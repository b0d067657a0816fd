"""Command-line front end: ``cigfht {density,simulate,compare,diagnose,sweep} SCENARIO``."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .density import density_curve, write_curves_csv
from .girsanov import decomposed_log_rn, pinned_paths, write_breakdown_csv
from .metrics import FitReport, compare, write_comparison_csv
from .scenario import ScenarioError, load_scenario, with_override
from .simulate import histogram, simulate, write_arrivals, write_histogram_csv

log = logging.getLogger("cigfht")

OUT_ENV = "CIGFHT_OUT"


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _apply_flags(scenario, args):
    for flag, key in (("seed", "sim.seed"), ("tmax", "sim.t_max"), ("bins", "output.bins"),
                      ("grid", "output.grid")):
        value = getattr(args, flag, None)
        if value is not None:
            scenario = with_override(scenario, key, value)
    return scenario


def _summary_table(comparison):
    rows = [("metric", "C-IG", "IG")]
    c, g = comparison.cig, comparison.ig
    rows.append(("L1", f"{c.l1:.4f}", f"{g.l1:.4f}"))
    rows.append(("KS", f"{c.ks:.4f}", f"{g.ks:.4f}"))
    rows.append(("mass (model)", f"{c.mass_model:.4f}", f"{g.mass_model:.4f}"))
    rows.append(("mass (MC)", f"{c.mass_mc:.4f}", f"{g.mass_mc:.4f}"))
    rows.append(("dominant peak", f"{c.dominant_peak_model:.4f}", f"{g.dominant_peak_model:.4f}"))
    rows.append(("MC dominant peak", f"{c.dominant_peak_mc:.4f}", f"{g.dominant_peak_mc:.4f}"))
    rows.append(("matched peaks", str(len(c.matched_peaks)), str(len(g.matched_peaks))))
    worst = lambda r: f"{max(r.peak_time_errors):.4f}" if r.peak_time_errors else "-"  # noqa: E731
    rows.append(("max peak error", worst(c), worst(g)))
    rows.append(("curve time [ms]", f"{c.runtime_ms:.2f}", f"{g.runtime_ms:.2f}"))
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{a:<{width}}  {b:>10}  {c_:>10}" for a, b, c_ in rows)


def cmd_density(scenario, args, out):
    cig = density_curve(scenario.params, scenario.profile, scenario.mode, scenario.t_max, scenario.grid,
                        flux_distance=scenario.flux_distance)
    ig = density_curve(scenario.params, scenario.profile, scenario.mode, scenario.t_max, scenario.grid,
                       model="ig")
    path = out / f"{scenario.name}_density.csv"
    write_curves_csv(path, cig, ig)
    print(f"{path}  (C-IG mass {cig.mass:.4f}, IG mass {ig.mass:.4f})")


def cmd_simulate(scenario, args, out):
    arrivals = simulate(scenario.sim, threads=args.threads)
    hist = histogram(arrivals, scenario.bins)
    path = out / f"{scenario.name}_hist.csv"
    write_histogram_csv(path, hist)
    print(f"{path}  ({arrivals.n_arrived} arrivals, {arrivals.n_censored} censored)")
    if args.arrivals:
        apath = out / f"{scenario.name}_arrivals.{args.arrivals}"
        write_arrivals(apath, arrivals)
        print(apath)


def cmd_compare(scenario, args, out):
    comparison = compare(scenario, threads=args.threads)
    combined = out / f"{scenario.name}_compare.csv"
    write_comparison_csv(combined, comparison)
    report = out / f"{scenario.name}_report.txt"
    with open(report, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"scenario = {scenario.name}\n\n[cig]\n{comparison.cig.to_text()}\n[ig]\n{comparison.ig.to_text()}")
    print(f"scenario {scenario.name}")
    print(_summary_table(comparison))
    print(combined)
    print(report)


def cmd_diagnose(scenario, args, out):
    dt = args.dt if args.dt is not None else scenario.sim.dt
    paths = pinned_paths(scenario.params, scenario.profile, args.paths, dt, seed=scenario.sim.seed)
    rows = [decomposed_log_rn(p, scenario.profile, scenario.params.sigma2) for p in paths]
    path = out / f"{scenario.name}_girsanov.csv"
    write_breakdown_csv(path, rows)
    print(f"{path}  (mean |sum - direct| = {np.mean([r.abs_diff for r in rows]):.3e})")


def sweep_header():
    fields = FitReport.csv_header()[1:]
    return ["param", "value"] + [f"{m}_{f}" for m in ("cig", "ig") for f in fields]


def cmd_sweep(scenario, args, out):
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ScenarioError("--values is empty", args.param)
    path = out / f"{scenario.name}_sweep.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv_writer(fh)
        writer.writerow(sweep_header())
        for value in values:
            variant = with_override(scenario, args.param, value)
            comparison = compare(variant, threads=args.threads)
            # one row per value: C-IG columns first, then IG
            row = [args.param, value] + comparison.cig.csv_row()[1:] + comparison.ig.csv_row()[1:]
            writer.writerow(row)
            print(f"{args.param}={value}: L1 C-IG {comparison.cig.l1:.4f}  IG {comparison.ig.l1:.4f}")
    print(path)


COMMANDS = {
    "density": cmd_density,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "diagnose": cmd_diagnose,
    "sweep": cmd_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cigfht", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("scenario", help="scenario file or shipped fixture (baseline.scn, fig3.scn, fig4.scn)")
        p.add_argument("--out", default=os.environ.get(OUT_ENV, "."),
                       help=f"output directory (default: ${OUT_ENV} or .)")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--bins", type=int, default=None)
        p.add_argument("--tmax", type=float, default=None)
        p.add_argument("--grid", type=int, default=None)
        if name == "simulate":
            p.add_argument("--arrivals", choices=("csv", "npz"), default=None,
                           help="also write raw per-trajectory arrivals")
        if name == "diagnose":
            p.add_argument("--paths", type=int, default=100)
            p.add_argument("--dt", type=float, default=None)
        if name == "sweep":
            p.add_argument("--param", required=True)
            p.add_argument("--values", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        scenario = _apply_flags(load_scenario(args.scenario), args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](scenario, args, out)
    except (ValueError, OSError, RuntimeError) as exc:
        name = Path(args.scenario).stem
        print(f"error [{name}]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
