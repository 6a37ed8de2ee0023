"""Semi-active decoding of operation sequences, feasibility checks, Gantt text."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .instance import JobShopInstance

OpKey = tuple[int, int]  # (job, step)

VIOLATION_KINDS = ("start", "precedence", "disjunctive", "coverage")


class InvalidSequenceError(ValueError):
    """Sequence does not cover every operation once in technological order."""


class InfeasibleScheduleError(ValueError):
    def __init__(self, report: ViolationReport):
        self.report = report
        super().__init__("schedule is infeasible:\n" + report.to_text())


@dataclass(frozen=True)
class Schedule:
    """Start time per operation, the makespan and the per-machine order."""

    starts: dict[OpKey, int]
    makespan: int
    machine_orders: tuple[tuple[OpKey, ...], ...]

    def to_records(self, instance: JobShopInstance) -> list[dict]:
        records = []
        for (job, step), start in sorted(self.starts.items()):
            op = instance.op(job, step)
            records.append({
                "operation": job * instance.machines + step,
                "job": job,
                "step": step,
                "machine": op.machine,
                "start": start,
                "duration": op.duration,
            })
        return records

    def to_json(self, instance: JobShopInstance) -> str:
        payload = {"makespan": self.makespan, "operations": self.to_records(instance)}
        return json.dumps(payload, indent=2)


def schedule_from_json(instance: JobShopInstance, text: str) -> Schedule:
    """Rebuild a Schedule from :meth:`Schedule.to_json` output.

    Machine orders come from record order within each machine (sorted by
    start), so duplicated records surface as coverage violations in
    :func:`validate` rather than being dropped silently.
    """
    payload = json.loads(text)
    records = payload["operations"] if isinstance(payload, dict) else payload
    starts: dict[OpKey, int] = {}
    per_machine: list[list[tuple[int, OpKey]]] = [[] for _ in range(instance.machines)]
    for rec in records:
        key = (int(rec["job"]), int(rec["step"]))
        start = int(rec["start"])
        starts[key] = start
        machine = int(rec.get("machine", -1))
        if 0 <= key[0] < instance.jobs and 0 <= key[1] < instance.machines:
            machine = instance.op(*key).machine
        if 0 <= machine < instance.machines:
            per_machine[machine].append((start, key))
    orders = tuple(tuple(k for _, k in sorted(entries)) for entries in per_machine)
    makespan = payload.get("makespan") if isinstance(payload, dict) else None
    if makespan is None:
        makespan = _derived_makespan(instance, starts)
    return Schedule(starts, int(makespan), orders)


@dataclass
class Violation:
    kind: str
    operations: tuple[OpKey, ...]
    text: str


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def add(self, kind: str, ops: Iterable[OpKey], text: str) -> None:
        self.violations.append(Violation(kind, tuple(ops), text))

    def to_text(self) -> str:
        if not self.violations:
            return "feasible: no violations"
        return "\n".join(f"{v.kind}: {v.text}" for v in self.violations)

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [
                {"kind": v.kind, "operations": [list(k) for k in v.operations], "text": v.text}
                for v in self.violations
            ],
        }


def check_sequence(instance: JobShopInstance, sequence: Sequence[OpKey]) -> None:
    """Raise InvalidSequenceError unless the sequence is a precedence-respecting cover."""
    if len(sequence) != instance.num_operations:
        raise InvalidSequenceError(
            f"sequence has {len(sequence)} operations, instance has {instance.num_operations}"
        )
    next_step = [0] * instance.jobs
    for pos, (job, step) in enumerate(sequence):
        if not 0 <= job < instance.jobs:
            raise InvalidSequenceError(f"position {pos}: job {job} out of range")
        if step != next_step[job]:
            raise InvalidSequenceError(
                f"position {pos}: (J{job + 1},s{step + 1}) out of technological order, "
                f"expected step {next_step[job] + 1}"
            )
        next_step[job] += 1


def build_schedule(instance: JobShopInstance, sequence: Sequence[OpKey]) -> Schedule:
    """Place operations in sequence order at their earliest start.

    Each operation starts at max(job predecessor completion, machine release)
    and is appended to its machine's order.
    """
    check_sequence(instance, sequence)
    job_ready = [0] * instance.jobs
    machine_ready = [0] * instance.machines
    orders: list[list[OpKey]] = [[] for _ in range(instance.machines)]
    starts: dict[OpKey, int] = {}
    for job, step in sequence:
        op = instance.rows[job][step]
        start = max(job_ready[job], machine_ready[op.machine])
        end = start + op.duration
        starts[(job, step)] = start
        job_ready[job] = end
        machine_ready[op.machine] = end
        orders[op.machine].append((job, step))
    return Schedule(starts, max(machine_ready), tuple(tuple(o) for o in orders))


def _derived_makespan(instance: JobShopInstance, starts: dict[OpKey, int]) -> int:
    ends = [
        start + instance.op(*key).duration
        for key, start in starts.items()
        if 0 <= key[0] < instance.jobs and 0 <= key[1] < instance.machines
    ]
    return max(ends, default=0)


def validate(instance: JobShopInstance, schedule: Schedule) -> ViolationReport:
    """Check start, precedence, disjunctive and coverage constraints.

    All violations are collected. Machine orders are re-derived from the
    start times; a stored order that disagrees is reported as coverage.
    """
    report = ViolationReport()
    starts = schedule.starts
    known = {op.key for op in instance.operations()}

    for key in sorted(set(starts) - known):
        report.add("coverage", [key], f"unknown operation {key}")
    for key in sorted(known - set(starts)):
        report.add("coverage", [key], f"{instance.op(*key).label()} is not scheduled")

    for key in sorted(known & set(starts)):
        if starts[key] < 0:
            report.add("start", [key], f"{instance.op(*key).label()} starts at {starts[key]} < 0")

    for row in instance.rows:
        for prev, cur in zip(row, row[1:]):
            if prev.key in starts and cur.key in starts:
                if starts[cur.key] - starts[prev.key] < prev.duration:
                    report.add(
                        "precedence",
                        [prev.key, cur.key],
                        f"{prev.label()}->{cur.label()}: {cur.label()} starts at {starts[cur.key]} "
                        f"before {prev.label()} completes at {starts[prev.key] + prev.duration}",
                    )

    derived: list[list[OpKey]] = [[] for _ in range(instance.machines)]
    for key in known & set(starts):
        derived[instance.op(*key).machine].append(key)
    for machine, keys in enumerate(derived):
        keys.sort(key=lambda k: (starts[k], k))
        for i, a in enumerate(keys):
            a_end = starts[a] + instance.op(*a).duration
            for b in keys[i + 1:]:
                if starts[b] >= a_end:
                    break
                report.add(
                    "disjunctive",
                    [a, b],
                    f"machine {machine}: {instance.op(*a).label()} [{starts[a]},{a_end}) overlaps "
                    f"{instance.op(*b).label()} starting at {starts[b]}",
                )

    if len(schedule.machine_orders) != instance.machines:
        report.add("coverage", [], f"{len(schedule.machine_orders)} machine orders for {instance.machines} machines")
    else:
        for machine, (stored, keys) in enumerate(zip(schedule.machine_orders, derived)):
            if list(stored) != keys:
                report.add(
                    "coverage",
                    stored,
                    f"machine {machine}: stored order disagrees with start times",
                )

    if known <= set(starts):
        actual = _derived_makespan(instance, starts)
        if schedule.makespan != actual:
            report.add("coverage", [], f"stored makespan {schedule.makespan} != derived {actual}")
    return report


_JOB_GLYPHS = string.digits[1:] + string.ascii_uppercase + string.ascii_lowercase


def job_glyph(job: int) -> str:
    return _JOB_GLYPHS[job] if job < len(_JOB_GLYPHS) else "#"


def render_gantt(instance: JobShopInstance, schedule: Schedule, axis: bool = False) -> str:
    """One row per machine, one column per time unit.

    Job ``j`` is drawn with glyph ``j + 1`` (then A-Z, a-z); idle time is
    ``.``. With ``axis=True`` a ruler line of time units mod 10 is prepended.

    Raises:
        InfeasibleScheduleError: carrying the violation report.
    """
    report = validate(instance, schedule)
    if report:
        raise InfeasibleScheduleError(report)
    width = schedule.makespan
    gutter = len(f"M{instance.machines - 1}")
    lines = []
    if axis:
        lines.append(" " * gutter + " |" + "".join(str(t % 10) for t in range(width)))
    for machine in range(instance.machines):
        cells = ["."] * width
        for job, step in schedule.machine_orders[machine]:
            start = schedule.starts[(job, step)]
            dur = instance.op(job, step).duration
            cells[start:start + dur] = job_glyph(job) * dur
        lines.append(f"M{machine}".ljust(gutter) + " |" + "".join(cells))
    return "\n".join(lines)
