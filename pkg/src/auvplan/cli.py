"""Command-line interface.

Three subcommands: `plan` runs the allocator on one scenario and writes
result.json / metrics.csv (plus optional plots), `bench` runs a seeded
Monte Carlo campaign and writes campaign.csv plus a summary figure, and
`dubins` prints a single curvature-bounded path for inspection.

Angles are degrees on every CLI surface and in every file this module
reads or writes; the library itself works in radians.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from .dubins import (WORDS, Dubins3dPath, DubinsPath, KinematicLimits, Pose,
                     sample_path, shortest_path, solve_word)
from .environment import (ScenarioValidationError, load_scenario, load_template)
from .metrics import (campaign_csv, compute_metrics, run_campaign,
                      run_metrics_csv)
from .som import AssignmentResult, params_for, run_allocation

#: Environment variable naming the default output directory.
OUT_ENV = "AUVPLAN_OUT"
FORMAT_VERSION = 1


def _out_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _r(value: float) -> float:
    return round(float(value), 9)


def _pose_json(pose: Pose, dim: int) -> dict:
    record = {"x": _r(pose.x), "y": _r(pose.y),
              "heading_deg": _r(math.degrees(pose.heading))}
    if dim == 3:
        record["z"] = _r(pose.z)
    return record


def _leg_json(leg, dim: int, step: float) -> dict:
    path = leg.path
    flat = path.path2d if isinstance(path, Dubins3dPath) else path
    samples = path.sample(step) if isinstance(path, Dubins3dPath) \
        else sample_path(path, step)
    record = {
        "auv": leg.auv,
        "target": leg.target,
        "order": leg.order,
        "word": flat.word,
        "segments": [_r(s) for s in flat.segments],
        "length": _r(path.total_length),
        "start": _pose_json(flat.start if dim == 2 else path.pose_at(0.0), dim),
        "goal": _pose_json(flat.goal if dim == 2 else path.pose_at(path.total_length), dim),
        "samples": [[_r(p.x), _r(p.y)] + ([_r(p.z)] if dim == 3 else [])
                    for p in samples],
    }
    if isinstance(path, Dubins3dPath):
        record["loops"] = path.loops
        record["pitch_deg"] = _r(math.degrees(path.pitch))
    return record


def result_json(result: AssignmentResult, step: float) -> dict:
    """Serializable view of an allocation result (metrics included)."""
    sc = result.scenario
    metrics = result.metrics
    return {
        "format_version": FORMAT_VERSION,
        "balanced": result.balanced,
        "dim": sc.dim,
        "n_auvs": len(sc.auvs),
        "n_targets": len(sc.targets),
        "seed": sc.seed,
        "assignment": {str(t): j for t, j in sorted(result.assignment.items())},
        "unassignable": list(result.unassignable),
        "tours": [list(t) for t in result.tours],
        "legs": [_leg_json(leg, sc.dim, step) for leg in result.legs],
        "events": [{"target": e.target, "auv": e.auv, "reason": e.reason}
                   for e in result.events],
        "metrics": {
            "lengths": [_r(v) for v in metrics.lengths],
            "total_length": _r(metrics.total_length),
            "max_length": _r(metrics.max_length),
            "length_stdev": _r(metrics.length_stdev),
            "task_counts": list(metrics.task_counts),
            "unassigned": metrics.unassigned,
            "wall_ms": None if metrics.wall_ms is None else _r(metrics.wall_ms),
        },
    }


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def cmd_plan(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioValidationError as exc:
        for code, message in exc.errors:
            print(f"error [{code}]: {message}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 1

    params = params_for(scenario)
    balanced = not args.unbalanced
    if args.timing:
        t0 = time.perf_counter()
        result = run_allocation(scenario, params, balanced=balanced)
        wall_ms = (time.perf_counter() - t0) * 1000.0
    else:
        result = run_allocation(scenario, params, balanced=balanced)
        wall_ms = None
    result.metrics = compute_metrics(result, wall_ms)

    step = args.step if args.step is not None else scenario.d_safety / 2.0
    out = _out_dir(args.out)
    written = []
    _write(out / "result.json",
           json.dumps(result_json(result, step), indent=2, sort_keys=True) + "\n")
    written.append(out / "result.json")
    _write(out / "metrics.csv",
           run_metrics_csv(result.metrics, scenario, balanced))
    written.append(out / "metrics.csv")
    if args.svg:
        from .plotting import plan_svg
        _write(out / "plot.svg", plan_svg(result, step))
        written.append(out / "plot.svg")
    if args.fig:
        from .plotting import save_plan_figure
        save_plan_figure(result, out / "plot.png", step)
        written.append(out / "plot.png")

    m = result.metrics
    n_assigned = len(result.assignment)
    print(f"assigned {n_assigned}/{len(scenario.targets)} targets "
          f"across {len(scenario.auvs)} AUVs")
    print(f"total length {m.total_length:.3f}, max {m.max_length:.3f}, "
          f"spread {m.length_stdev:.3f}")
    print(f"reassignments: {len(result.events)}, "
          f"unassignable: {len(result.unassignable)}")
    if wall_ms is not None:
        print(f"allocation time: {wall_ms:.1f} ms")
    print("wrote " + ", ".join(str(p) for p in written))
    return 2 if result.unassignable else 0


def cmd_bench(args) -> int:
    try:
        template = load_template(args.template)
    except ScenarioValidationError as exc:
        for code, message in exc.errors:
            print(f"error [{code}]: {message}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: cannot read template: {exc}", file=sys.stderr)
        return 1

    report = run_campaign(template, args.trials, args.seed,
                          balanced=not args.unbalanced,
                          compare=args.compare_balancing,
                          measure_time=args.timing)
    out = _out_dir(args.out)
    _write(out / "campaign.csv", campaign_csv(report))
    written = [out / "campaign.csv"]
    if not args.no_fig:
        from .plotting import save_campaign_figure
        save_campaign_figure(report, out / "campaign.png")
        written.append(out / "campaign.png")

    mode_names = {False: "unbalanced", True: "balanced"}
    print(f"{args.trials} trials, seed {args.seed}, "
          f"{template.n_auvs} AUVs / {template.n_targets} targets")
    for mode in report.modes:
        wall = report.mean_wall_ms(mode)
        timing = f", mean time {wall:.1f} ms" if wall is not None else ""
        print(f"{mode_names[mode]}: mean total {report.mean_total(mode):.3f}, "
              f"mean max {report.mean_max(mode):.3f}, "
              f"mean spread {report.mean_stdev(mode):.3f}{timing}")
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def _parse_cli_pose(text: str) -> Pose:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected x,y,heading_deg, got {text!r}")
    x, y, deg = (float(p) for p in parts)
    return Pose(x, y, 0.0, math.radians(deg))


def _path_line(word: str, path: DubinsPath | None) -> str:
    if path is None:
        return f"{word} infeasible"
    s1, s2, s3 = path.segments
    return f"{word} {s1:g} {s2:g} {s3:g} total={path.total_length:g}"


def cmd_dubins(args) -> int:
    try:
        start = _parse_cli_pose(args.start)
        goal = _parse_cli_pose(args.goal)
        limits = KinematicLimits(r_min=args.r)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.all_words:
        for word in WORDS:
            print(_path_line(word, solve_word(start, goal, limits, word)))
        return 0
    if args.word:
        path = solve_word(start, goal, limits, args.word)
        print(_path_line(args.word, path))
        if path is None:
            return 1
    else:
        path = shortest_path(start, goal, limits)
        print(_path_line(path.word, path))
    if args.samples:
        total = path.total_length
        step = total / args.samples if total > 0 else 1.0
        for pose in sample_path(path, step):
            print(f"{pose.x:.6f},{pose.y:.6f},{math.degrees(pose.heading):.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auvplan",
        description="Assign targets to an AUV fleet and plan "
                    "curvature-bounded paths.")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="allocate targets and plan paths "
                                       "for one scenario file")
    plan.add_argument("scenario", help="scenario YAML file")
    plan.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    plan.add_argument("--svg", action="store_true", help="also write plot.svg")
    plan.add_argument("--fig", action="store_true", help="also write plot.png")
    plan.add_argument("--step", type=float,
                      help="polyline sampling step (default d_safety/2)")
    plan.add_argument("--timing", action="store_true",
                      help="measure allocation wall time")
    plan.add_argument("--unbalanced", action="store_true",
                      help="disable load balancing")
    plan.set_defaults(func=cmd_plan)

    bench = sub.add_parser("bench", help="run a seeded Monte Carlo campaign")
    bench.add_argument("template", help="campaign template YAML file")
    bench.add_argument("--trials", type=int, required=True)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--compare-balancing", action="store_true",
                       help="run both modes on identical position draws")
    bench.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    bench.add_argument("--timing", action="store_true",
                       help="measure per-run wall time")
    bench.add_argument("--unbalanced", action="store_true",
                       help="single-mode campaign without load balancing")
    bench.add_argument("--no-fig", action="store_true",
                       help="skip the campaign.png summary figure")
    bench.set_defaults(func=cmd_bench)

    dubins = sub.add_parser("dubins", help="print one curvature-bounded path")
    dubins.add_argument("--start", required=True, metavar="x,y,deg")
    dubins.add_argument("--goal", required=True, metavar="x,y,deg")
    dubins.add_argument("--r", type=float, default=1.0,
                        help="minimum turning radius (default 1)")
    dubins.add_argument("--word", choices=WORDS,
                        help="solve one specific word instead of the shortest")
    dubins.add_argument("--all-words", action="store_true",
                        help="print all six candidate words")
    dubins.add_argument("--samples", type=int, metavar="N",
                        help="append N+1 sampled poses as x,y,heading_deg")
    dubins.set_defaults(func=cmd_dubins)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
