"""Command-line surface tying the planning / twin / detection loop together.

Subcommands mirror the loop: plan, simulate, twin, detect, recommend,
report, and demo (the whole loop on the bundled fixture). Every command
is file-in/file-out and deterministic given --seed. Exit codes: 0 ok,
1 input or validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from importlib import resources
from pathlib import Path

from . import coverage, detect, localize, mitigate, planning, report, twin
from .errors import RfplanError
from .scenario import load_scenario
from .twin import _cell_baseline_dbm


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1), not internal errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def demo_scenario_path() -> Path:
    return Path(resources.files("rfplan").joinpath("data/demo_scenario.json"))


def _load(args):
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    return scenario


def _write_json(path, data, verbose=False):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if verbose:
        print(f"wrote {path}")


def _out(args, default_name):
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return Path(args.out) if args.out else out_dir / default_name


# ---------------------------------------------------------------------------
# subcommands


def cmd_plan(args) -> int:
    scenario = _load(args)
    band_ids = [args.band] if args.band else None
    if band_ids and band_ids[0] not in {b.id for b in scenario.bands}:
        print(f"unknown band {args.band!r}", file=sys.stderr)
        return 1
    results = planning.plan_scenario(scenario, condition=args.condition,
                                     band_ids=band_ids)
    data = {
        "scenario": scenario.name,
        "condition": args.condition,
        "note": "demo link budget is an illustrative fixture",
        "bands": [dataclasses.asdict(r) for r in results],
    }
    path = _out(args, "plan.json")
    _write_json(path, data, args.verbose)
    for r in results:
        print(f"{r.band_id}: MAPL {r.mapl_db:.1f} dB, radius "
              f"{r.cell_radius_m:.1f} m, sites {r.site_count}")
    return 0


def cmd_simulate(args) -> int:
    scenario = _load(args)
    grid = coverage.compute_grid(scenario,
                                 interferers_active=args.interference == "on",
                                 n_workers=args.workers)
    path = _out(args, "grid.csv")
    coverage.write_grid_csv(grid, path)
    summary = coverage.grid_summary(grid)
    summary_doc = {
        "scenario": scenario.name,
        "interference": args.interference,
        "summary": summary,
        "metrics": report.sim_metrics(scenario, summary),
    }
    _write_json(Path(str(path) + ".summary.json"), summary_doc, args.verbose)
    ov = summary["overall"]
    print(f"grid {grid.shape[1]}x{grid.shape[0]} px, covered "
          f"{summary['covered_fraction']:.1%}, mean RSSI "
          f"{ov['rssi_dbm']['mean']:.1f} dBm, mean SINR "
          f"{ov['sinr_db']['mean']:.1f} dB")
    return 0


def cmd_twin(args) -> int:
    scenario = _load(args)
    batch = twin.synthesize_kpi(scenario, args.duration, args.dt)
    path = _out(args, "kpi.csv")
    twin.write_kpi_csv(batch, path)
    # ground truth goes to a separate sealed file; detection only reads it
    # behind an explicit --validate
    twin.write_ground_truth(batch, Path(str(path) + ".truth.json"))
    _write_json(Path(str(path) + ".summary.json"),
                {"scenario": scenario.name,
                 "metrics": report.twin_metrics(scenario, batch)},
                args.verbose)
    n = next(iter(batch.series["RTWP"].values())).samples.size
    print(f"{len(batch.cells())} cells x {n} samples -> {path}")
    return 0


def cmd_detect(args) -> int:
    scenario = _load(args)
    batch = twin.read_kpi_csv(args.kpi_csv)
    cells = set(batch.cells())
    expected = set(scenario.sector_ids)
    if not cells <= expected:
        print(f"KPI cells not in scenario: {sorted(cells - expected)}",
              file=sys.stderr)
        return 1

    seed = args.seed if args.seed is not None else scenario.seed
    result = detect.run_detection(batch, args.baseline_window, k=args.k,
                                  seed=seed, threshold_db=args.threshold,
                                  metric=args.metric)
    doc = {
        "scenario": scenario.name,
        "metric": args.metric,
        "k": args.k,
        "baseline_window": args.baseline_window,
        "threshold_db": result.threshold_db,
        "anomaly": result.anomaly_flag,
        "affected_cells": list(result.affected_cells),
        "evidence": result.evidence,
    }
    if result.anomaly_flag:
        first_band = scenario.sector_by_id(result.affected_cells[0])[1].band_ref
        baseline = _cell_baseline_dbm(scenario, scenario.band_by_id(first_band))
        estimates = localize.estimate_interferer(scenario, result, baseline)
        doc["localization"] = {
            name: {"position": list(est.position), "residual": est.residual,
                   "tx_power_dbm": est.tx_power_dbm, "fallback": est.fallback,
                   "cells_used": list(est.cells_used)}
            for name, est in estimates.items()}
        if args.validate:
            truth = twin.read_ground_truth(args.validate)
            doc["validation"] = {
                name: dataclasses.asdict(localize.validate_localization(
                    est, truth[0].position, args.validation_radius))
                for name, est in estimates.items()} if truth else {}

    path = _out(args, "detection.json")
    _write_json(path, doc, args.verbose)
    state = "ANOMALY" if result.anomaly_flag else "clear"
    print(f"{state}: affected={list(result.affected_cells)}")
    return 0


def cmd_recommend(args) -> int:
    scenario = _load(args)
    with open(args.detection_json) as fh:
        det_doc = json.load(fh)
    result = detect.DetectionResult(
        affected_cells=tuple(det_doc.get("affected_cells", [])),
        anomaly_flag=bool(det_doc.get("anomaly", False)),
        evidence=det_doc.get("evidence", {}),
        threshold_db=float(det_doc.get("threshold_db", 3.0)))

    rec = mitigate.recommend(scenario, result)
    doc = {
        "scenario": scenario.name,
        "rationale": rec.rationale,
        "expected_effect_db": rec.expected_effect_db,
        "changes": {sec: new for sec, _old, new in rec.changes},
    }
    if rec.changes:
        post = mitigate.apply(scenario, rec)
        verdict = mitigate.verify(scenario, post, result.affected_cells,
                                  n_workers=args.workers)
        doc["verification"] = dataclasses.asdict(verdict)
        print(f"{len(rec.changes)} change(s); SINR "
              f"{verdict.pre_mean_sinr_db:.1f} -> {verdict.post_mean_sinr_db:.1f} dB "
              f"({'improved' if verdict.improved else 'NOT improved'})")
    else:
        doc["verification"] = None
        print(f"no-op: {rec.rationale}")
    _write_json(_out(args, "recommendation.json"), doc, args.verbose)
    return 0


def cmd_report(args) -> int:
    with open(args.sim_summary) as fh:
        sim_doc = json.load(fh)
    with open(args.twin_summary) as fh:
        twin_doc = json.load(fh)
    rows, warnings = report.build_comparison(sim_doc.get("metrics", {}),
                                             twin_doc.get("metrics", {}))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(report.format_table(rows))
    _write_json(_out(args, "report.json"), report.rows_to_dict(rows, warnings),
                args.verbose)
    return 0


def cmd_demo(args) -> int:
    out_dir = Path(args.out_dir or "demo_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    ns = argparse.Namespace(**vars(args))
    ns.scenario = str(demo_scenario_path())
    ns.out_dir = str(out_dir)
    ns.out = None

    print("== plan ==")
    ns.band, ns.condition = None, "NLOS"
    cmd_plan(ns)

    print("== simulate (interference off / on) ==")
    ns.workers = args.workers
    for mode in ("off", "on"):
        ns.interference = mode
        ns.out = str(out_dir / f"grid_{mode}.csv")
        cmd_simulate(ns)

    print("== twin ==")
    ns.out = str(out_dir / "kpi.csv")
    ns.duration, ns.dt = 3600.0, 60.0
    cmd_twin(ns)

    print("== detect ==")
    ns.kpi_csv = str(out_dir / "kpi.csv")
    ns.baseline_window, ns.k, ns.threshold, ns.metric = 15, 2, 3.0, "RTWP"
    ns.validate = str(out_dir / "kpi.csv.truth.json")
    ns.validation_radius = 500.0
    ns.out = str(out_dir / "detection.json")
    cmd_detect(ns)

    print("== recommend ==")
    ns.detection_json = str(out_dir / "detection.json")
    ns.out = str(out_dir / "recommendation.json")
    cmd_recommend(ns)

    print("== report ==")
    ns.sim_summary = str(out_dir / "grid_on.csv.summary.json")
    ns.twin_summary = str(out_dir / "kpi.csv.summary.json")
    ns.out = str(out_dir / "report.json")
    cmd_report(ns)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rfplan",
                     description="Deterministic RF planning and digital-twin "
                                 "interference loop")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--out-dir", default=None,
                        help="directory for default output files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="link budget, cell radius, site count")
    p.add_argument("scenario")
    p.add_argument("--band", default=None)
    p.add_argument("--condition", choices=("LOS", "NLOS"), default="NLOS")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="coverage grid CSV + summary")
    p.add_argument("scenario")
    p.add_argument("--interference", choices=("on", "off"), default="on")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("twin", help="synthesize the KPI feed")
    p.add_argument("scenario")
    p.add_argument("--duration", type=float, default=3600.0)
    p.add_argument("--dt", type=float, default=60.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_twin)

    p = sub.add_parser("detect", help="cluster KPI series, flag + localize")
    p.add_argument("kpi_csv")
    p.add_argument("scenario")
    p.add_argument("--baseline-window", type=int, default=15)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--threshold", type=float, default=3.0)
    p.add_argument("--metric", choices=twin.METRICS, default="RTWP")
    p.add_argument("--validate", default=None,
                   help="sealed ground-truth file to score localization against")
    p.add_argument("--validation-radius", type=float, default=500.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("recommend", help="frequency reassignment + verification")
    p.add_argument("detection_json")
    p.add_argument("scenario")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("report", help="simulated vs twin comparison table")
    p.add_argument("sim_summary")
    p.add_argument("twin_summary")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("demo", help="run the whole loop on the bundled fixture")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except RfplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal errors
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
