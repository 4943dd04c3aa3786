"""Statistics and benchmark-campaign tests."""

import math
from pathlib import Path

import numpy as np
import pytest

from auvplan.dubins import KinematicLimits, Pose
from auvplan.environment import Scenario, Target, draw_scenario, load_template
from auvplan.metrics import (CSV_COLUMNS, campaign_csv, compute_metrics,
                             length_spread, run_campaign, run_metrics_csv)
from auvplan.som import AssignmentResult, run_allocation

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def result_with_travel(travel, unassignable=()):
    n = len(travel)
    scenario = Scenario((0.0, 0.0, 30.0, 30.0),
                        tuple(Pose(1 + i, 1) for i in range(n)),
                        (Target((5, 5)),), (), KinematicLimits(1.0), 1.5)
    return AssignmentResult(scenario=scenario, balanced=True, assignment={},
                            tours=[[] for _ in range(n)], legs=[],
                            unassignable=list(unassignable), events=[],
                            travel=list(travel), task_counts=[0] * n)


def test_length_spread_examples():
    assert length_spread([4.0, 4.0, 4.0]) == 0.0
    assert length_spread([2.0, 4.0, 6.0, 8.0]) == pytest.approx(math.sqrt(20.0 / 3.0))
    assert length_spread([7.0]) == 0.0
    assert length_spread([]) == 0.0


def test_metrics_totals():
    m = compute_metrics(result_with_travel([4.6, 3.6]))
    assert m.total_length == pytest.approx(8.2)
    assert m.max_length == pytest.approx(4.6)
    assert m.lengths == (4.6, 3.6)
    assert m.total_length == pytest.approx(sum(m.lengths), abs=1e-9)


def test_metrics_spread_and_counts():
    m = compute_metrics(result_with_travel([2.0, 4.0, 6.0, 8.0], unassignable=[3]))
    assert m.length_stdev == pytest.approx(math.sqrt(20.0 / 3.0))
    assert m.unassigned == 1
    assert m.wall_ms is None
    timed = compute_metrics(result_with_travel([1.0]), wall_ms=12.5)
    assert timed.wall_ms == 12.5
    assert timed.length_stdev == 0.0


def test_idle_auvs_count_as_zero_length():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    scenario = draw_scenario(
        template, np.random.default_rng(np.random.SeedSequence([3, 0])))
    result = run_allocation(scenario, balanced=False)
    m = compute_metrics(result)
    assert len(m.lengths) == 4
    assert m.total_length == pytest.approx(sum(m.lengths))


def test_campaign_single_trial_matches_direct_run():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    report = run_campaign(template, 1, 11)
    scenario = draw_scenario(
        template, np.random.default_rng(np.random.SeedSequence([11, 0])))
    direct = compute_metrics(run_allocation(scenario, balanced=True))
    row = report.rows[0]
    assert row.metrics.total_length == pytest.approx(direct.total_length)
    assert row.metrics.length_stdev == pytest.approx(direct.length_stdev)
    assert report.mean_total(True) == pytest.approx(direct.total_length)


def test_campaign_reproducible_from_seed():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    a = run_campaign(template, 4, 7, compare=True)
    b = run_campaign(template, 4, 7, compare=True)
    assert campaign_csv(a) == campaign_csv(b)
    c = run_campaign(template, 4, 8, compare=True)
    assert campaign_csv(a) != campaign_csv(c)


def test_campaign_compare_row_layout():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    report = run_campaign(template, 3, 5, compare=True)
    lines = campaign_csv(report).strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    # 3 trials x 2 modes + 2 mean footer rows
    assert len(lines) == 1 + 6 + 2
    for trial in range(3):
        unbal = lines[1 + 2 * trial].split(",")
        bal = lines[2 + 2 * trial].split(",")
        assert unbal[2] == "false" and bal[2] == "true"
        assert unbal[-1] == bal[-1] == str(trial)
    assert lines[-2].split(",")[-1] == "mean"
    assert lines[-1].split(",")[-1] == "mean"
    assert lines[-2].split(",")[2] == "false"
    assert lines[-1].split(",")[2] == "true"


def test_campaign_csv_schema_values():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    report = run_campaign(template, 2, 9)
    lines = campaign_csv(report).strip().split("\n")
    row = lines[1].split(",")
    assert row[0] == "4" and row[1] == "8"
    assert row[2] == "true"
    assert float(row[3]) > 0 and float(row[4]) > 0
    assert row[6] == ""  # no wall time unless measured
    assert row[7] == "9"


def test_campaign_wall_time_measured_on_request():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    report = run_campaign(template, 2, 9, measure_time=True)
    assert all(r.metrics.wall_ms is not None and r.metrics.wall_ms > 0
               for r in report.rows)
    assert report.mean_wall_ms(True) > 0


def test_campaign_mean_helpers_match_rows():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    report = run_campaign(template, 5, 2, compare=True)
    for mode in (False, True):
        rows = report.mode_rows(mode)
        assert len(rows) == 5
        assert report.mean_total(mode) == pytest.approx(
            sum(r.metrics.total_length for r in rows) / 5)
        assert report.mean_stdev(mode) == pytest.approx(
            sum(r.metrics.length_stdev for r in rows) / 5)


def test_campaign_rejects_bad_trial_count():
    template = load_template(SCENARIO_DIR / "bench_4x8.yaml")
    with pytest.raises(ValueError):
        run_campaign(template, 0, 1)


def test_single_run_csv_layout():
    m = compute_metrics(result_with_travel([4.6, 3.6]))
    scenario = result_with_travel([4.6, 3.6]).scenario
    text = run_metrics_csv(m, scenario, balanced=True)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    row = lines[1].split(",")
    assert row[0] == "2"
    assert row[2] == "true"
    assert float(row[3]) == pytest.approx(8.2)
    assert row[8] == "0"
