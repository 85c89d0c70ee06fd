"""Command-line entry points.

Exit codes are stable: 0 success, 1 I/O failure, 2 validation failure.
simulate / classify / calibrate are deterministic: the same inputs and
flags always produce byte-identical outputs.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import __version__
from .builtins import (BUILTIN_PROFILES, BUILTIN_SCENARIOS, builtin_profile,
                       builtin_scenario)
from .calibration import (BaselineDataset, CalibrationConfig, calibrate,
                          merge_calibration)
from .errors import Diagnostic, MetaStatesError, ValidationFailed
from .ingest import SampleHold, load_stream
from .jsonio import dump_document
from .mpi import aggregate_mpi
from .profiles import (WorkerProfile, load_profile_file, save_profile_file,
                       validate_profile)
from .report import build_run_report, format_report_table
from .scenario import Scenario, load_scenario_file
from .service.http import ServiceServer
from .service.sessions import SessionManager
from .service.store import DataStore
from .simulation import (DEFAULT_PERFORMANCE_MODEL, PerformanceModel,
                         performance_model_from_dict, run_batch)
from .states import DEFAULT_REGISTRY, classify_level, level_to_status

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2

ENV_PORT = "METASTATES_PORT"
ENV_DATA_DIR = "METASTATES_DATA_DIR"
ENV_TICK_MS = "METASTATES_TICK_MS"


def _resolve_profile(ref: str) -> WorkerProfile:
    """A path to a profile document, or the name of a bundled profile."""
    if ref in BUILTIN_PROFILES and not Path(ref).exists():
        return builtin_profile(ref)
    return load_profile_file(ref)


def _resolve_scenario(ref: str) -> Scenario:
    if ref in BUILTIN_SCENARIOS and not Path(ref).exists():
        return builtin_scenario(ref)
    return load_scenario_file(ref)


def _load_perf(ref: str | None) -> PerformanceModel:
    if ref is None:
        return DEFAULT_PERFORMANCE_MODEL
    with open(ref, "r", encoding="utf-8") as fh:
        return performance_model_from_dict(json.load(fh))


def cmd_simulate(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    profile = _resolve_profile(args.profile)
    perf = _load_perf(args.perf)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    frames = run_batch(scenario, profile, perf)
    frame_dicts = [f.to_dict() for f in frames]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for frame in frames:
                fh.write(frame.to_json_line() + "\n")
    report = build_run_report(frame_dicts, scenario.tick_ms)
    if args.report:
        Path(args.report).write_text(dump_document(report), encoding="utf-8")
    print(format_report_table(report))
    return EXIT_OK


def cmd_classify(args) -> int:
    profile = _resolve_profile(args.profile)
    diagnostics = validate_profile(profile)
    if diagnostics:
        raise ValidationFailed(diagnostics)
    samples = load_stream(args.input)
    hold = SampleHold()
    lines = ["timestamp_ms,kind,value,level,status,mpi"]
    for sample in samples:
        kp = profile.kinds.get(sample.kind)
        if kp is None:
            raise ValidationFailed([Diagnostic(
                "missing_kind", f"profile has no entry for kind {sample.kind!r}",
                subject=sample.kind)])
        level = classify_level(sample.value, kp.thresholds)
        status = level_to_status(level, kp.polarity)
        hold.update(sample.kind, sample.value)
        held = hold.latest()
        color = ""
        if held is not None:
            statuses = {
                kind: level_to_status(
                    classify_level(value, profile.kinds[kind].thresholds),
                    profile.kinds[kind].polarity)
                for kind, value in held.items()
            }
            color = aggregate_mpi(statuses).wire
        lines.append(f"{sample.timestamp_ms},{sample.kind},{sample.value!r},"
                     f"{level.wire},{status.wire},{color}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    config = CalibrationConfig(p_low=args.p_low, p_high=args.p_high,
                               min_samples=args.min_samples)
    samples = load_stream(args.input)
    dataset = BaselineDataset.from_samples(samples)
    thresholds = calibrate(dataset, config, registry=DEFAULT_REGISTRY)
    if args.base:
        base = _resolve_profile(args.base)
        if args.weight < 1.0:
            thresholds = {
                kind: merge_calibration(base.kinds[kind].thresholds, fitted,
                                        args.weight)
                for kind, fitted in thresholds.items()
            }
    else:
        base = builtin_profile("default")
    profile = dataclasses.replace(base.with_thresholds(thresholds),
                                  worker_id=args.worker_id,
                                  display_name=args.display_name or args.worker_id)
    save_profile_file(profile, args.out)
    for kind, t in profile.kinds.items():
        print(f"{kind}: t_low={t.thresholds.t_low:.6g} "
              f"t_high={t.thresholds.t_high:.6g}")
    return EXIT_OK


def cmd_validate_profile(args) -> int:
    profile = _resolve_profile(args.profile)
    diagnostics = validate_profile(profile)
    if diagnostics:
        for d in diagnostics:
            print(str(d), file=sys.stderr)
        return EXIT_VALIDATION
    print(f"profile {profile.worker_id!r} is valid "
          f"({len(profile.mrm_rules)} rules)")
    return EXIT_OK


def cmd_serve(args) -> int:
    port = args.port if args.port is not None else int(
        os.environ.get(ENV_PORT, "8787"))
    data_dir = args.data_dir or os.environ.get(ENV_DATA_DIR, "./metastates-data")
    tick_ms = args.tick_ms if args.tick_ms is not None else int(
        os.environ.get(ENV_TICK_MS, "100"))
    store = DataStore(data_dir, default_tick_ms=tick_ms)
    manager = SessionManager(store)
    server = ServiceServer(manager, host=args.host, port=port)
    host, bound_port = server.address
    print(f"listening on http://{host}:{bound_port} (data dir: {data_dir})",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metastates",
        description="Digital worker state engine: simulate, classify, "
                    "calibrate, validate, serve.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario batch and write frames")
    p.add_argument("--scenario", required=True,
                   help="scenario file or bundled name (fig9, flat_optimal)")
    p.add_argument("--profile", default="default",
                   help="profile file or bundled name (default: default)")
    p.add_argument("--perf", help="performance model JSON file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="write one frame per line to this JSONL file")
    p.add_argument("--report", help="write the run report JSON here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("classify", help="annotate a sample stream with levels")
    p.add_argument("--input", required=True, help="CSV or JSONL sample file")
    p.add_argument("--profile", default="default")
    p.add_argument("--out", help="output CSV (stdout when omitted)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("calibrate",
                       help="fit per-kind thresholds from a baseline recording")
    p.add_argument("--input", required=True, help="CSV or JSONL sample file")
    p.add_argument("--p-low", type=float, default=0.60, dest="p_low")
    p.add_argument("--p-high", type=float, default=0.85, dest="p_high")
    p.add_argument("--min-samples", type=int, default=30, dest="min_samples")
    p.add_argument("--out", required=True, help="profile JSON to write")
    p.add_argument("--worker-id", default="calibrated", dest="worker_id")
    p.add_argument("--display-name", dest="display_name")
    p.add_argument("--base", help="existing profile to refine")
    p.add_argument("--weight", type=float, default=1.0,
                   help="blend weight toward the new fit when --base is set")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("validate-profile", help="check a profile document")
    p.add_argument("profile", help="profile file or bundled name")
    p.set_defaults(func=cmd_validate_profile)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None,
                   help=f"0 picks a free port (env {ENV_PORT})")
    p.add_argument("--data-dir", dest="data_dir",
                   help=f"persistence root (env {ENV_DATA_DIR})")
    p.add_argument("--tick-ms", type=int, default=None, dest="tick_ms",
                   help=f"default scenario tick (env {ENV_TICK_MS})")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MetaStatesError as exc:
        if isinstance(exc, ValidationFailed):
            for d in exc.diagnostics:
                print(f"error: {d}", file=sys.stderr)
            if not exc.diagnostics:
                print(f"error: {exc}", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
