"""Run statistics and seeded Monte Carlo benchmark campaigns.

A campaign redraws AUV/target positions per trial from a template,
runs the allocator (in one or both balancing modes on identical draws),
and aggregates per-run metrics into a CSV report. Everything derives
from the campaign seed, so reports are byte-reproducible.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .environment import CampaignTemplate, Scenario, draw_scenario
from .som import AssignmentResult, SomParams, params_for, run_allocation

CSV_COLUMNS = ("auvs", "targets", "balanced", "total_length", "max_length",
               "length_stdev", "wall_ms", "seed", "trial")


@dataclass(frozen=True)
class RunMetrics:
    """Per-run path statistics over the whole fleet (idle AUVs count as 0)."""

    lengths: tuple[float, ...]
    total_length: float
    max_length: float
    length_stdev: float
    task_counts: tuple[int, ...]
    unassigned: int
    wall_ms: float | None = None


def length_spread(lengths) -> float:
    """Sample standard deviation (n-1 denominator); 0 for a single value."""
    values = list(lengths)
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values)


def compute_metrics(result: AssignmentResult, wall_ms: float | None = None) -> RunMetrics:
    """Fold an allocation result into fleet-level statistics."""
    lengths = tuple(result.travel)
    return RunMetrics(
        lengths=lengths,
        total_length=sum(lengths),
        max_length=max(lengths) if lengths else 0.0,
        length_stdev=length_spread(lengths),
        task_counts=tuple(result.task_counts),
        unassigned=len(result.unassignable),
        wall_ms=wall_ms,
    )


@dataclass(frozen=True)
class CampaignRow:
    trial: int
    balanced: bool
    metrics: RunMetrics


@dataclass(frozen=True)
class CampaignReport:
    """All trial rows of one campaign plus the identifying parameters."""

    n_auvs: int
    n_targets: int
    seed: int
    n_trials: int
    modes: tuple[bool, ...]
    rows: tuple[CampaignRow, ...]

    def mode_rows(self, balanced: bool) -> list[CampaignRow]:
        return [r for r in self.rows if r.balanced == balanced]

    def mean_total(self, balanced: bool) -> float:
        return float(np.mean([r.metrics.total_length for r in self.mode_rows(balanced)]))

    def mean_max(self, balanced: bool) -> float:
        return float(np.mean([r.metrics.max_length for r in self.mode_rows(balanced)]))

    def mean_stdev(self, balanced: bool) -> float:
        return float(np.mean([r.metrics.length_stdev for r in self.mode_rows(balanced)]))

    def mean_wall_ms(self, balanced: bool) -> float | None:
        values = [r.metrics.wall_ms for r in self.mode_rows(balanced)]
        if any(v is None for v in values):
            return None
        return float(np.mean(values))


def _timed_run(scenario: Scenario, params: SomParams, balanced: bool,
               measure_time: bool) -> RunMetrics:
    if measure_time:
        t0 = time.perf_counter()
        result = run_allocation(scenario, params, balanced=balanced)
        wall_ms = (time.perf_counter() - t0) * 1000.0
    else:
        result = run_allocation(scenario, params, balanced=balanced)
        wall_ms = None
    return compute_metrics(result, wall_ms)


def run_campaign(template: CampaignTemplate, n_trials: int, seed: int,
                 balanced: bool = True, compare: bool = False,
                 params: SomParams | None = None,
                 measure_time: bool = False) -> CampaignReport:
    """Run a seeded campaign of fresh-position trials.

    Each trial derives its own generator from (seed, trial index), draws
    one scenario, and runs every requested mode on that same scenario, so
    a compare campaign contrasts balancing on identical positions. Modes
    run unbalanced first.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    modes = (False, True) if compare else (balanced,)
    rows = []
    for trial in range(n_trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        scenario = draw_scenario(template, rng)
        run_params = params if params is not None else params_for(scenario)
        for mode in modes:
            metrics = _timed_run(scenario, run_params, mode, measure_time)
            rows.append(CampaignRow(trial, mode, metrics))
    return CampaignReport(template.n_auvs, template.n_targets, seed,
                          n_trials, modes, tuple(rows))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _csv_line(values) -> str:
    return ",".join(_fmt(v) for v in values) + "\n"


def campaign_csv(report: CampaignReport) -> str:
    """Campaign report as CSV: one row per trial and mode, mean footer per mode."""
    out = [_csv_line(CSV_COLUMNS)]
    for row in report.rows:
        m = row.metrics
        out.append(_csv_line((report.n_auvs, report.n_targets, row.balanced,
                              m.total_length, m.max_length, m.length_stdev,
                              m.wall_ms, report.seed, row.trial)))
    for mode in report.modes:
        out.append(_csv_line((report.n_auvs, report.n_targets, mode,
                              report.mean_total(mode), report.mean_max(mode),
                              report.mean_stdev(mode), report.mean_wall_ms(mode),
                              report.seed, "mean")))
    return "".join(out)


def run_metrics_csv(metrics: RunMetrics, scenario: Scenario, balanced: bool) -> str:
    """Single-run metrics in the campaign column layout (trial 0)."""
    line = (len(scenario.auvs), len(scenario.targets), balanced,
            metrics.total_length, metrics.max_length, metrics.length_stdev,
            metrics.wall_ms, scenario.seed, 0)
    return _csv_line(CSV_COLUMNS) + _csv_line(line)
