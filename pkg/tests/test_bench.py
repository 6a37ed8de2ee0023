import csv
import io
import json
import math

import pytest

from eas_jobshop.bench import (
    CSV_COLUMNS,
    ExperimentConfig,
    SkippedInstanceWarning,
    aggregate_by_size,
    emit_report,
    relative_error_pct,
    run_experiment,
    summarize,
)
from eas_jobshop.colony import ColonyParams

# Relative-error column as published for LA01..LA40.
PUBLISHED_ERRORS = [
    0, 2.13, 4.36, 3.56, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.41, 6.35, 3.57, 4.36, 3.92, 1.11,
    5.38, 9.82, 1.84, 8.13, 8.7, 6.4, 10.28, 9.38, 15.73, 4.06, 0.78, 0.97, 0.7, 3.89, 1.32,
    10.09, 8.59, 9.95, 5.76, 6.96,
]
SIZES = [(10, 5)] * 5 + [(15, 5)] * 5 + [(20, 5)] * 5 + [(10, 10)] * 5 + \
    [(15, 10)] * 5 + [(20, 10)] * 5 + [(30, 10)] * 5 + [(15, 15)] * 5


def report(name="X", size=(10, 5), bks=100, bests=(100,), err=None):
    r = summarize(name, size, bks, list(bests), [1] * len(bests), [5] * len(bests), [1.0] * len(bests))
    if err is not None:
        r.rel_err_pct = err
    return r


def test_relative_error_la02():
    # published as 2.13; the exact value is 2.137
    assert relative_error_pct(669, 655) == pytest.approx(2.13, abs=0.01)


def test_constant_series_has_zero_stddev():
    r = report(bests=[593] * 30)
    assert (r.best, r.mean, r.stddev) == (593, 593.0, 0.0)


def test_single_run():
    r = report(bests=[700])
    assert r.mean == r.best == 700 and r.stddev == 0


def test_statistics_two_pass():
    bests = [666, 670, 666, 681, 690, 666, 672]
    r = report(bests=bests)
    mean = sum(bests) / len(bests)
    var = sum((b - mean) ** 2 for b in bests) / len(bests)
    assert abs(r.mean - mean) < 1e-9
    assert abs(r.stddev - math.sqrt(var)) < 1e-9
    assert r.best <= r.mean


def test_aggregate_examples():
    a = report(err=0.0)
    b = report(err=2.13)
    summary = aggregate_by_size([a, b])
    assert summary.by_size[(10, 5)] == pytest.approx(1.065)
    assert summary.grand_mean == pytest.approx(1.065)


def test_aggregate_published_column():
    reports = [report(f"LA{i + 1:02d}", SIZES[i], err=e) for i, e in enumerate(PUBLISHED_ERRORS)]
    summary = aggregate_by_size(reports)
    assert summary.grand_mean == pytest.approx(3.96, abs=0.005)
    assert len(summary.by_size) == 8
    assert summary.by_size[(10, 5)] == pytest.approx((2.13 + 4.36 + 3.56) / 5)


def test_emit_empty_is_header_only():
    assert emit_report([], "csv") == ",".join(CSV_COLUMNS) + "\n"
    assert json.loads(emit_report([], "json")) == []
    assert "Instance" in emit_report([], "table")


def test_emit_la01_row():
    r = report("LA01", bks=666, bests=[666, 668])
    rows = list(csv.DictReader(io.StringIO(emit_report([r], "csv"))))
    assert rows[0]["bks"] == "666"
    assert rows[0]["rel_err_pct"] == "0.00"
    assert list(rows[0]) == list(CSV_COLUMNS)
    table = emit_report([r], "table")
    assert "666" in table and "AIS" in table and "454525" in table


def test_emit_is_stable_and_timing_switch():
    r = report("LA01", bks=666, bests=[666, 668])
    for fmt in ("csv", "json", "table"):
        assert emit_report([r], fmt) == emit_report([r], fmt)
    assert json.loads(emit_report([r], "json", include_timing=False))[0]["avg_wall_ms"] is None
    assert emit_report([r], "csv", include_timing=False).splitlines()[1].endswith(",")


def test_emit_unknown_format():
    with pytest.raises(ValueError):
        emit_report([], "xml")


def test_no_bks_omits_error():
    r = report(bks=None, bests=[10])
    assert r.rel_err_pct is None
    assert emit_report([r], "csv").splitlines()[1].split(",")[5] == ""


def test_run_experiment_small():
    config = ExperimentConfig(["LA05"], runs_per_instance=3, params=ColonyParams(cycles=20), base_seed=4)
    assert config.seeds() == [4, 5, 6]
    reports = run_experiment(config)
    assert len(reports) == 1
    r = reports[0]
    assert (r.instance, r.size, r.bks) == ("LA05", (10, 5), 593)
    assert len(r.per_run_best) == 3
    assert r.best == min(r.per_run_best) >= 593
    assert r.avg_evals_total == 5 * 20
    again = run_experiment(config)
    assert again[0].per_run_best == r.per_run_best


def test_run_experiment_parallel_matches_serial():
    params = ColonyParams(cycles=10)
    serial = run_experiment(ExperimentConfig(["LA01", "LA02"], 2, params, 1))
    parallel = run_experiment(ExperimentConfig(["LA01", "LA02"], 2, params, 1, workers=2))
    assert [r.per_run_best for r in serial] == [r.per_run_best for r in parallel]


def test_run_experiment_skips_unresolvable():
    config = ExperimentConfig(["NOPE", "LA05"], runs_per_instance=1, params=ColonyParams(cycles=2))
    with pytest.warns(SkippedInstanceWarning, match="NOPE"):
        reports = run_experiment(config)
    assert [r.instance for r in reports] == ["LA05"]


def test_config_rejects_zero_runs():
    with pytest.raises(ValueError):
        ExperimentConfig(["LA01"], runs_per_instance=0)
