"""Command-line entry point: ``eas-jobshop {solve,validate,bench,oracle,gantt}``.

Exit codes: 0 success, 1 input or parse error, 2 constraint violations
reported by ``validate``.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import bench, colony, oracle
from .instance import InstanceParseError, expand_names, load_instance
from .schedule import (
    InfeasibleScheduleError,
    InvalidSequenceError,
    build_schedule,
    render_gantt,
    schedule_from_json,
    validate,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class InputError(Exception):
    pass


def read_config(path: str) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` comments allowed, no sections needed."""
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[colony]\n" + Path(path).read_text())
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return dict(parser["colony"])


def _add_colony_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("colony parameters (override --config)")
    g.add_argument("--config", help="file of 'key = value' lines named as the parameters below")
    g.add_argument("--alpha", type=float, help="pheromone exponent in (0, 1]; beta = 1 - alpha (default 0.2)")
    g.add_argument("--rho", type=float, help="trail persistence factor in (0, 1) (default 0.7)")
    g.add_argument("--q", type=float, help="deposit constant Q (default 100)")
    g.add_argument("--elitist-weight", type=float, help="elitist multiplier e (default: number of jobs)")
    g.add_argument("--cycles", type=int, help="number of cycles (default 1000)")
    g.add_argument("--ants", type=int, help="ants per cycle (default: ceil(jobs / 2))")
    g.add_argument("--tau0", type=float, help="initial trail value (default 1.0)")
    g.add_argument("--delay-limit", type=int, help="largest admissible machine idle delay (default 5)")
    g.add_argument("--delay-penalty-per-unit", type=float,
                   help="visibility reduction per unit of delay (default 0.01)")
    g.add_argument("--elitist-target", choices=[t.value for t in colony.ElitistTarget],
                   help="reinforce the cycle-best or the global-best path (default cycle)")


def _add_seed(p: argparse.ArgumentParser, help_text: str) -> None:
    p.add_argument("--seed", type=int, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eas-jobshop", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the colony once on an instance")
    p.add_argument("instance", help="instance file or bundled name such as LA05")
    _add_seed(p, "random seed (default 0)")
    _add_colony_flags(p)
    p.add_argument("--gantt", action="store_true", help="also print a text Gantt chart")
    p.add_argument("--trace", help="write per-cycle JSON lines to this file ('-' for stderr)")
    p.add_argument("--schedule-out", help="write the best schedule as JSON to this file")
    p.add_argument("--format", choices=["text", "json"], default="text", help="output format")

    p = sub.add_parser("validate", help="check a schedule JSON against an instance")
    p.add_argument("instance", help="instance file or bundled name")
    p.add_argument("schedule", help="schedule JSON as written by 'solve --schedule-out'")
    _add_seed(p, "accepted for uniformity; validation is deterministic")
    p.add_argument("--format", choices=["text", "json"], default="text", help="output format")

    p = sub.add_parser("bench", help="repeated runs with Table-3 style statistics")
    p.add_argument("--instances", required=True, nargs="+",
                   help="names, paths, comma lists or ranges such as LA01..LA05")
    p.add_argument("--runs", type=int, default=30, help="runs per instance (default 30)")
    _add_seed(p, "base seed; run r uses seed + r (default 0)")
    _add_colony_flags(p)
    p.add_argument("--format", choices=list(bench.FORMATS), default="table", help="report format")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock times (output is then not byte-reproducible)")

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance by enumeration")
    p.add_argument("instance", help="instance file or bundled name")
    _add_seed(p, "accepted for uniformity; the oracle is deterministic")
    p.add_argument("--op-limit", type=int, default=oracle.DEFAULT_OP_LIMIT,
                   help="refuse instances with more operations (default 12)")
    p.add_argument("--no-prune", action="store_true", help="disable bound and state pruning")
    p.add_argument("--format", choices=["text", "json"], default="text", help="output format")

    p = sub.add_parser("gantt", help="decode a sequence or schedule and draw it")
    p.add_argument("instance", help="instance file or bundled name")
    p.add_argument("sequence", nargs="?",
                   help="JSON file: list of [job, step] pairs or a schedule JSON; "
                        "omitted means solve with the colony first")
    _add_seed(p, "random seed for the colony when no sequence is given (default 0)")
    _add_colony_flags(p)
    p.add_argument("--axis", action="store_true", help="prepend a time ruler")
    return parser


def colony_params(args: argparse.Namespace) -> colony.ColonyParams:
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    params = colony.params_from_mapping(values)
    overrides = {
        key: getattr(args, key)
        for key in colony.PARAM_FIELDS
        if getattr(args, key, None) is not None
    }
    return replace(params, **overrides)


def _load(name: str):
    try:
        return load_instance(name)
    except (OSError, InstanceParseError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    params = colony_params(args)
    trace = None
    trace_file = None
    if args.trace == "-":
        trace = colony.jsonl_trace(sys.stderr)
    elif args.trace:
        trace_file = open(args.trace, "w")
        trace = colony.jsonl_trace(trace_file)
    try:
        result = colony.run(inst, params, trace=trace)
    finally:
        if trace_file:
            trace_file.close()
    if args.schedule_out:
        Path(args.schedule_out).write_text(result.schedule.to_json(inst) + "\n")
    if args.format == "json":
        print(json.dumps({
            "instance": inst.name,
            "best_makespan": result.best_makespan,
            "evaluations_to_best": result.evaluations_to_best,
            "evaluations_total": result.evaluations_total,
            "sequence": [list(k) for k in result.best_sequence],
        }))
    else:
        print(f"instance: {inst.name} ({inst.jobs} x {inst.machines})")
        print(f"makespan: {result.best_makespan}")
        print(f"evaluations: {result.evaluations_to_best} to best, {result.evaluations_total} total")
        print("sequence: " + " ".join(f"{j + 1}.{s + 1}" for j, s in result.best_sequence))
    if args.gantt:
        print(render_gantt(inst, result.schedule))
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load(args.instance)
    try:
        sched = schedule_from_json(inst, Path(args.schedule).read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read schedule {args.schedule}: {exc}") from exc
    report = validate(inst, sched)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.to_text())
    return EXIT_VIOLATION if report else EXIT_OK


def cmd_bench(args) -> int:
    names = [n for spec in args.instances for n in expand_names(spec)]
    params = colony_params(args)
    config = bench.ExperimentConfig(
        instances=names,
        runs_per_instance=args.runs,
        params=params,
        base_seed=params.seed,
        workers=args.jobs,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", bench.SkippedInstanceWarning)
        reports = bench.run_experiment(config)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    sys.stdout.write(bench.emit_report(reports, args.format, include_timing=args.timing))
    if names and not reports:
        return EXIT_INPUT
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    try:
        res = oracle.exhaustive_optimum(inst, op_limit=args.op_limit, prune=not args.no_prune)
    except oracle.OracleSizeError as exc:
        raise InputError(str(exc)) from exc
    if args.format == "json":
        print(json.dumps(res.to_dict()))
    else:
        print(f"optimal makespan: {res.optimal_makespan}")
        print("sequence: " + " ".join(f"{j + 1}.{s + 1}" for j, s in res.optimal_sequence))
        print(f"nodes explored: {res.nodes_explored}")
    return EXIT_OK


def cmd_gantt(args) -> int:
    inst = _load(args.instance)
    if args.sequence is None:
        sched = colony.run(inst, colony_params(args)).schedule
    else:
        try:
            payload = json.loads(Path(args.sequence).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read {args.sequence}: {exc}") from exc
        if isinstance(payload, dict):
            sched = schedule_from_json(inst, json.dumps(payload))
        else:
            try:
                sched = build_schedule(inst, [tuple(k) for k in payload])
            except InvalidSequenceError as exc:
                raise InputError(str(exc)) from exc
    try:
        print(render_gantt(inst, sched, axis=args.axis))
    except InfeasibleScheduleError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "validate": cmd_validate,
    "bench": cmd_bench,
    "oracle": cmd_oracle,
    "gantt": cmd_gantt,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
