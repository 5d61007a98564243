"""Command-line entry point.

Every subcommand writes into ``--out`` (created if needed) and finishes with a
``summary.txt`` (sorted key=value) and a ``manifest.txt``. Exit codes: 0 on
success, 2 for configuration errors, 3 for numerical failures, 4 when the
analysis has too little data.
"""

from __future__ import annotations

import argparse
import dataclasses
import shlex
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .analysis import (energy_audit, limit_cycle_check, metrics, poincare,
                       series_metrics)
from .errors import ConfigError, InsufficientDataError, NumericalError
from .integrator import SimMode, simulate
from .model import ContactMode
from .sweep import SWEEP_PARAMETERS, SweepSpec, run_sweep, scan_for_oscillation, trend

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INSUFFICIENT = 4


def _write_csv(path, header, rows):
    io._write_rows(path, header, rows)


def _poincare_rows(section):
    return [(t, *pt) for t, pt in zip(section.times.tolist(), section.points.tolist())]


class _Run:
    """Tracks the output directory, written files and the manifest."""

    def __init__(self, args, argv, config_path=None):
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = io.RunManifest(command_line=shlex.join(["hipo", *argv]))
        if config_path is not None:
            self.manifest.config_hash = io.config_hash(config_path)
        self.start = time.perf_counter()

    def path(self, name):
        self.manifest.outputs.append(name)
        return self.out / name

    def finish(self, summary, extra=None):
        summary_path = self.path("summary.txt")
        self.manifest.outputs.append("manifest.txt")
        io.write_summary(summary, summary_path, self.manifest, extra)
        self.manifest.wall_clock_s = time.perf_counter() - self.start
        self.manifest.write(self.out / "manifest.txt")


def _failure_items(exc):
    return {"failure.kind": exc.kind, "failure.last_good_time": exc.last_good_time,
            "failure.message": str(exc)}


def cmd_simulate(args, argv):
    params, config = io.parse_config(args.config)
    if args.mode:
        config = dataclasses.replace(config, mode=SimMode(args.mode))
    if args.contact:
        params = params.replace(contact=dataclasses.replace(params.contact,
                                                            mode=ContactMode(args.contact)))
    run = _Run(args, argv, args.config)
    run_items = {"run.mode": config.mode.value, "run.contact": params.contact.mode.value}
    try:
        traj = simulate(params, config)
    except NumericalError as exc:
        run.finish({}, {**run_items, **_failure_items(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    io.write_trajectory_csv(traj, run.path("trajectory.csv"))
    run.manifest.outputs.append("trajectory.events.csv")
    run_items.update({"run.n_samples": len(traj), "run.n_events": len(traj.events),
                      "run.grazing_count": traj.grazing_count})
    parts = [metrics(traj, args.transient), energy_audit(traj)]
    try:
        section = poincare(traj)
    except InsufficientDataError:
        section = None
    if section is not None:
        _write_csv(run.path("poincare.csv"), ("t", "v_ball", "theta", "omega"),
                   _poincare_rows(section))
        try:
            ok, period = limit_cycle_check(section)
            run_items.update({"limit_cycle.detected": ok, "limit_cycle.period": period})
        except InsufficientDataError:
            pass
    run.finish(parts, run_items)
    return EXIT_OK


SWEEP_COLUMNS = ("index", "value", "converged", "frequency", "amplitude", "mean_theta",
                 "period_cv", "n_cycles", "failure", "last_good_time")


def cmd_sweep(args, argv):
    params, config = io.parse_config(args.config)
    if args.steps < 5:
        raise ConfigError("--steps must be at least 5", key="steps")
    if args.log:
        if args.start <= 0 or args.stop <= 0:
            raise ConfigError("--log needs positive --from and --to", key="from")
        grid = np.geomspace(args.start, args.stop, args.steps)
    else:
        grid = np.linspace(args.start, args.stop, args.steps)
    spec = SweepSpec(params, config, args.param, tuple(grid.tolist()), args.transient)
    run = _Run(args, argv, args.config)
    result = run_sweep(spec)
    rows = []
    for p in result.points:
        m = p.metrics
        rows.append((p.index, p.value, m.converged, m.frequency, m.amplitude, m.mean_theta,
                     m.period_cv, m.n_cycles, p.failure, p.last_good_time))
    _write_csv(run.path("sweep.csv"), SWEEP_COLUMNS, rows)
    extra = {}
    try:
        extra.update({f"trend.{k}": v for k, v in dataclasses.asdict(trend(result)).items()})
    except InsufficientDataError as exc:
        extra["trend.failure"] = str(exc)
    run.finish(result, extra)
    if all(p.failure for p in result.points):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_scan(args, argv):
    params, config = io.parse_config(args.config)
    box, resolution, log = io.parse_box(args.box)
    run = _Run(args, argv, args.config)
    found = scan_for_oscillation(params, config, box, resolution, log, args.transient)
    names = sorted(box)
    rows = [(*(getattr(cell, n) for n in names), m.frequency, m.amplitude, m.mean_theta,
             m.period_cv) for cell, m in found]
    _write_csv(run.path("scan.csv"),
               (*names, "frequency", "amplitude", "mean_theta", "period_cv"), rows)
    extra = {"scan.n_oscillating": len(found), "scan.parameters": ";".join(names),
             "scan.resolution": resolution, "scan.log": log}
    run.finish({}, extra)
    return EXIT_OK


def cmd_analyze(args, argv):
    if not 0.0 <= args.transient < 1.0:
        raise ConfigError("--transient must lie in [0, 1)", key="transient")
    columns, events = io.read_trajectory_csv(args.trajectory)
    run = _Run(args, argv)
    run.manifest.config_hash = io.config_hash(args.trajectory)
    m = series_metrics(columns["t"], columns["theta"], args.transient)
    extra = {"analyze.n_samples": len(columns["t"]), "analyze.n_events": len(events)}
    onsets = [e for e in events if e["kind"].value == "contact_onset"]
    if len(onsets) < 2:
        onsets = [e for e in events if e["kind"].value == "impulse_applied"]
    if len(onsets) >= 2:
        rows = [(e["t"], e["v_ball"], e["theta"], e["omega"]) for e in onsets]
        _write_csv(run.path("poincare.csv"), ("t", "v_ball", "theta", "omega"), rows)
    run.finish(m, extra)
    if m.frequency is None:
        print("error: fewer than two oscillation peaks in the trajectory", file=sys.stderr)
        return EXIT_INSUFFICIENT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hipo", description="Simulate and analyse the ball-cover pneumatic oscillator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=[m.value for m in SimMode])
    p.add_argument("--contact", choices=[c.value for c in ContactMode])
    p.add_argument("--transient", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="one-parameter sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log", action="store_true")
    p.add_argument("--transient", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scan", help="grid scan for self-sustained oscillation")
    p.add_argument("--config", required=True)
    p.add_argument("--box", required=True)
    p.add_argument("--transient", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("analyze", help="metrics of a saved trajectory")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--transient", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InsufficientDataError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT


if __name__ == "__main__":
    sys.exit(main())
