"""Repeated-run experiments and Table-3 style reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from .colony import ColonyParams, run
from .instance import JobShopInstance, LA_BKS, load_instance

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "instance", "jobs", "machines", "bks", "best", "rel_err_pct", "mean", "stddev",
    "avg_evals_to_best", "avg_evals_total", "avg_wall_ms",
)

# Average objective-function evaluations reported for competing methods.
REFERENCE_EVALUATIONS = (("EAS", 3307), ("AIS", 175058), ("CULT", 454525), ("TS", 11108))

FORMATS = ("table", "csv", "json")


class SkippedInstanceWarning(UserWarning):
    pass


@dataclass
class ExperimentConfig:
    instances: list[str]
    runs_per_instance: int = 30
    params: ColonyParams = field(default_factory=ColonyParams)
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.runs_per_instance < 1:
            raise ValueError("runs_per_instance must be >= 1")

    def seeds(self) -> list[int]:
        return [self.base_seed + r for r in range(self.runs_per_instance)]


@dataclass
class RunReport:
    instance: str
    jobs: int
    machines: int
    bks: int | None
    best: int
    rel_err_pct: float | None
    mean: float
    stddev: float
    avg_evals_to_best: float
    avg_evals_total: float
    avg_wall_ms: float
    per_run_best: list[int] = field(default_factory=list)
    per_run_evals_to_best: list[int] = field(default_factory=list)
    per_run_evals_total: list[int] = field(default_factory=list)

    @property
    def size(self) -> tuple[int, int]:
        return (self.jobs, self.machines)


def relative_error_pct(best: float, bks: float) -> float:
    return 100.0 * (best - bks) / bks


def summarize(
    instance: str,
    size: tuple[int, int],
    bks: int | None,
    bests: list[int],
    evals_to_best: list[int],
    evals_total: list[int],
    wall_ms: list[float],
) -> RunReport:
    """Statistics over per-run results; stddev is the population form."""
    best = min(bests)
    return RunReport(
        instance=instance,
        jobs=size[0],
        machines=size[1],
        bks=bks,
        best=best,
        rel_err_pct=relative_error_pct(best, bks) if bks else None,
        mean=statistics.fmean(bests),
        stddev=statistics.pstdev(bests),
        avg_evals_to_best=statistics.fmean(evals_to_best),
        avg_evals_total=statistics.fmean(evals_total),
        avg_wall_ms=statistics.fmean(wall_ms),
        per_run_best=list(bests),
        per_run_evals_to_best=list(evals_to_best),
        per_run_evals_total=list(evals_total),
    )


def _one_run(task):
    instance, params = task
    res = run(instance, params)
    return res.best_makespan, res.evaluations_to_best, res.evaluations_total, res.wall_ms


def _resolve(name: str) -> tuple[JobShopInstance, int | None]:
    inst = load_instance(name)
    bks = LA_BKS.get(inst.name.upper())
    return inst, (bks[2] if bks else None)


def run_experiment(config: ExperimentConfig) -> list[RunReport]:
    """Run every instance ``runs_per_instance`` times with seeds ``base_seed + r``.

    Instances that cannot be loaded are skipped with a
    :class:`SkippedInstanceWarning`; the rest are still processed.
    """
    resolved = []
    for name in config.instances:
        try:
            resolved.append(_resolve(name))
        except (OSError, ValueError) as exc:
            log.warning("skipping %s: %s", name, exc)
            warnings.warn(f"skipping {name}: {exc}", SkippedInstanceWarning, stacklevel=2)

    tasks = [
        (inst, replace(config.params, seed=seed))
        for inst, _ in resolved
        for seed in config.seeds()
    ]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_one_run, tasks))
    else:
        outcomes = [_one_run(t) for t in tasks]

    reports = []
    runs = config.runs_per_instance
    for i, (inst, bks) in enumerate(resolved):
        chunk = outcomes[i * runs:(i + 1) * runs]
        bests, to_best, total, wall = (list(col) for col in zip(*chunk))
        reports.append(
            summarize(inst.name, (inst.jobs, inst.machines), bks, bests, to_best, total, wall)
        )
    return reports


@dataclass
class ErrorSummary:
    by_size: dict[tuple[int, int], float]
    grand_mean: float


def aggregate_by_size(reports: list[RunReport]) -> ErrorSummary:
    """Mean relative error per (jobs, machines) group and over all reports.

    Reports without a BKS carry no relative error and are left out.
    """
    scored = [r for r in reports if r.rel_err_pct is not None]
    if not scored:
        raise ValueError("no reports with a relative error")
    groups: dict[tuple[int, int], list[float]] = {}
    for r in scored:
        groups.setdefault(r.size, []).append(r.rel_err_pct)
    by_size = {size: statistics.fmean(errs) for size, errs in groups.items()}
    return ErrorSummary(by_size, statistics.fmean(r.rel_err_pct for r in scored))


def _row(report: RunReport, include_timing: bool) -> list[str]:
    def num(value, digits):
        return "" if value is None else f"{value:.{digits}f}"

    return [
        report.instance,
        str(report.jobs),
        str(report.machines),
        "" if report.bks is None else str(report.bks),
        str(report.best),
        num(report.rel_err_pct, 2),
        num(report.mean, 2),
        num(report.stddev, 2),
        num(report.avg_evals_to_best, 1),
        num(report.avg_evals_total, 1),
        num(report.avg_wall_ms, 1) if include_timing else "",
    ]


def emit_report(reports: list[RunReport], fmt: str = "csv", include_timing: bool = True) -> str:
    """Render reports as ``table`` text, ``csv`` or ``json``.

    With ``include_timing=False`` wall-clock values are blanked (CSV, table)
    or null (JSON) so the output depends only on the seeds.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow(_row(r, include_timing))
        return buf.getvalue()
    if fmt == "json":
        payload = []
        for r in reports:
            record = asdict(r)
            if not include_timing:
                record["avg_wall_ms"] = None
            payload.append(record)
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "table":
        headers = [
            "Instance", "Size", "BKS", "Best", "RelErr%", "Mean", "StdDev",
            "EvalsToBest", "EvalsTotal", "WallMs",
        ]
        rows = []
        for r in reports:
            cells = _row(r, include_timing)
            rows.append([cells[0], f"{r.jobs} x {r.machines}"] + cells[3:])
        widths = [max([len(h)] + [len(row[i]) for row in rows]) for i, h in enumerate(headers)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows)
        scored = [r for r in reports if r.rel_err_pct is not None]
        if scored:
            lines.append(f"Average relative error: {aggregate_by_size(scored).grand_mean:.2f}%")
        lines.append("")
        lines.append("Reference average objective-function evaluations:")
        lines.extend(f"  {name:<5} {evals}" for name, evals in REFERENCE_EVALUATIONS)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
