"""Workspace model: bounds, static obstacles, clearance tests, scenario files.

Scenario files are YAML with lengths in workspace units and angles in
degrees; angles are converted to radians on load. Obstacles are discs
(2D) or spheres (3D). Clearance is strict: a point exactly at
radius + d_safety from an obstacle center is NOT clear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .dubins import KinematicLimits, Pose, sample_path

FORMAT_VERSION = 1

#: SOM hyperparameter names a scenario file may override.
SOM_OVERRIDE_KEYS = frozenset({
    "learning_rate", "gain_decay", "initial_gain", "neighborhood_radius",
    "snap_distance", "max_iterations", "heading_candidates",
})

_PLACEMENT_ATTEMPTS = 10000


class ScenarioValidationError(Exception):
    """Scenario data violates an invariant.

    `errors` lists (code, message) pairs for every violation found,
    not just the first.
    """

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        text = "; ".join(f"{code}: {msg}" for code, msg in self.errors)
        super().__init__(text or "invalid scenario")


@dataclass(frozen=True)
class Obstacle:
    """Disc (2D) or sphere (3D) keep-out region."""

    center: tuple[float, ...]
    radius: float


@dataclass(frozen=True)
class Target:
    """A task location; heading, when set, pins the arrival direction."""

    position: tuple[float, ...]
    heading: float | None = None


@dataclass(frozen=True)
class Scenario:
    """Immutable mission description consumed by the allocator.

    bounds is (min corner, max corner) flattened: 4 numbers in 2D,
    6 in 3D. max_travel of None means unlimited range.
    """

    bounds: tuple[float, ...]
    auvs: tuple[Pose, ...]
    targets: tuple[Target, ...]
    obstacles: tuple[Obstacle, ...]
    limits: KinematicLimits
    d_safety: float
    max_travel: float | None = None
    seed: int | None = None
    dim: int = 2
    som_overrides: tuple[tuple[str, float], ...] = ()

    @property
    def lower(self) -> tuple[float, ...]:
        return self.bounds[:self.dim]

    @property
    def upper(self) -> tuple[float, ...]:
        return self.bounds[self.dim:]


def _coords(p, dim: int) -> tuple[float, ...]:
    if isinstance(p, Pose):
        return (p.x, p.y, p.z)[:dim]
    return tuple(p)[:dim]


def point_clear(p, scenario: Scenario) -> bool:
    """True iff p keeps strictly more than radius + d_safety from every obstacle."""
    c = _coords(p, scenario.dim)
    for ob in scenario.obstacles:
        if math.dist(c, ob.center[:scenario.dim]) <= ob.radius + scenario.d_safety:
            return False
    return True


def path_clear(path, scenario: Scenario, step: float | None = None) -> bool:
    """True iff every sample of the path at spacing `step` is clear.

    step defaults to d_safety/2 and may not exceed it: coarser sampling
    could step over an obstacle's safety envelope.
    """
    if step is None:
        step = scenario.d_safety / 2.0
    if step > scenario.d_safety / 2.0 + 1e-12:
        raise ValueError(
            f"sampling step {step} too coarse for d_safety {scenario.d_safety}; "
            f"must be <= d_safety/2")
    samples = path.sample(step) if hasattr(path, "sample") else sample_path(path, step)
    return all(point_clear(p, scenario) for p in samples)


def _in_bounds(c, lower, upper) -> bool:
    return all(lo <= v <= hi for v, lo, hi in zip(c, lower, upper))


def _number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_position(entry, dim: int):
    """Accepts [x, y(, z)] or {pos: [...], heading_deg: a}; returns (coords, heading)."""
    heading = None
    if isinstance(entry, dict):
        pos = entry.get("pos")
        if "heading_deg" in entry:
            if not _number(entry["heading_deg"]):
                return None
            heading = math.radians(float(entry["heading_deg"]))
    else:
        pos = entry
    if not isinstance(pos, (list, tuple)) or len(pos) != dim or not all(_number(v) for v in pos):
        return None
    return tuple(float(v) for v in pos), heading


def _parse_frame(raw: dict, errors: list):
    """Bounds, limits, and obstacle fields shared by scenarios and templates."""
    bounds = raw.get("bounds")
    dim = None
    if not isinstance(bounds, (list, tuple)) or len(bounds) not in (4, 6) \
            or not all(_number(v) for v in bounds):
        errors.append(("bad_bounds", "bounds must be 4 (2D) or 6 (3D) numbers: "
                       "min corner then max corner"))
        bounds = None
    else:
        bounds = tuple(float(v) for v in bounds)
        dim = len(bounds) // 2
        for axis in range(dim):
            if bounds[axis] >= bounds[dim + axis]:
                errors.append(("bad_bounds", f"axis {axis}: min must be < max"))
        if "dim" in raw and raw["dim"] != dim:
            errors.append(("bad_dim", f"dim {raw['dim']} does not match bounds ({dim}D)"))

    r_min = raw.get("r_min", 1.0)
    if not _number(r_min) or r_min <= 0:
        errors.append(("bad_r_min", f"r_min must be a positive number, got {r_min!r}"))
        r_min = 1.0
    max_pitch_deg = raw.get("max_pitch_deg", 15.0)
    if not _number(max_pitch_deg) or not 0 < max_pitch_deg < 90:
        errors.append(("bad_max_pitch", "max_pitch_deg must be in (0, 90)"))
        max_pitch_deg = 15.0
    limits = KinematicLimits(r_min=float(r_min),
                             max_pitch=math.radians(float(max_pitch_deg)))

    d_safety = raw.get("d_safety", 1.5 * limits.r_min)
    if not _number(d_safety) or d_safety <= 0:
        errors.append(("bad_d_safety", "d_safety must be a positive number"))
        d_safety = 1.5 * limits.r_min

    max_travel = raw.get("max_travel")
    if max_travel is not None and (not _number(max_travel) or max_travel <= 0):
        errors.append(("bad_max_travel", "max_travel must be a positive number"))
        max_travel = None

    obstacles = []
    raw_obstacles = raw.get("obstacles", [])
    if not isinstance(raw_obstacles, list):
        errors.append(("bad_obstacles", "obstacles must be a list"))
        raw_obstacles = []
    for i, ob in enumerate(raw_obstacles):
        if not isinstance(ob, dict) or "center" not in ob or "radius" not in ob:
            errors.append(("bad_obstacle", f"obstacle {i}: needs center and radius"))
            continue
        radius = ob["radius"]
        if not _number(radius) or radius <= 0:
            errors.append(("bad_radius", f"obstacle {i}: radius must be positive"))
            continue
        if dim is None:
            continue
        parsed = _parse_position(ob["center"], dim)
        if parsed is None:
            errors.append(("bad_obstacle", f"obstacle {i}: center must be {dim} numbers"))
            continue
        center = parsed[0]
        lower, upper = bounds[:dim], bounds[dim:]
        inside = all(lo <= c - radius and c + radius <= hi
                     for c, lo, hi in zip(center, lower, upper))
        if not inside:
            errors.append(("obstacle_out_of_bounds",
                           f"obstacle {i} at {center} radius {radius} exceeds bounds"))
            continue
        obstacles.append(Obstacle(center, float(radius)))

    som = raw.get("som", {})
    overrides: list[tuple[str, float]] = []
    if som is None:
        som = {}
    if not isinstance(som, dict):
        errors.append(("bad_som", "som must be a mapping of parameter overrides"))
    else:
        for key in sorted(som):
            if key not in SOM_OVERRIDE_KEYS:
                errors.append(("bad_som_param", f"unknown som parameter {key!r}"))
            elif not _number(som[key]):
                errors.append(("bad_som_param", f"som parameter {key!r} must be a number"))
            else:
                overrides.append((key, float(som[key])))

    seed = raw.get("seed")
    if seed is not None and not isinstance(seed, int):
        errors.append(("bad_seed", "seed must be an integer"))
        seed = None

    fv = raw.get("format_version", FORMAT_VERSION)
    if fv != FORMAT_VERSION:
        errors.append(("bad_format_version", f"unsupported format_version {fv!r}"))

    return bounds, dim, limits, d_safety, max_travel, tuple(obstacles), tuple(overrides), seed


def validate_scenario(raw) -> Scenario:
    """Check raw scenario data against every invariant.

    Returns the validated Scenario, or raises ScenarioValidationError
    carrying machine-readable (code, message) pairs for all violations.
    """
    if not isinstance(raw, dict):
        raise ScenarioValidationError([("bad_document", "scenario must be a mapping")])
    errors: list[tuple[str, str]] = []
    bounds, dim, limits, d_safety, max_travel, obstacles, overrides, seed = \
        _parse_frame(raw, errors)

    auvs: list[Pose] = []
    raw_auvs = raw.get("auvs")
    if not isinstance(raw_auvs, list) or not raw_auvs:
        errors.append(("no_auvs", "at least one AUV is required"))
        raw_auvs = []
    targets: list[Target] = []
    raw_targets = raw.get("targets")
    if not isinstance(raw_targets, list) or not raw_targets:
        errors.append(("no_targets", "at least one target is required"))
        raw_targets = []

    if dim is not None:
        lower, upper = bounds[:dim], bounds[dim:]
        probe = Scenario(bounds, (), (), obstacles, limits, d_safety, dim=dim)
        for i, entry in enumerate(raw_auvs):
            parsed = _parse_position(entry, dim)
            if parsed is None:
                errors.append(("bad_auv", f"auv {i}: position must be {dim} numbers"))
                continue
            pos, heading = parsed
            if not _in_bounds(pos, lower, upper):
                errors.append(("auv_out_of_bounds", f"auv {i} at {pos} outside bounds"))
            elif not point_clear(pos, probe):
                errors.append(("auv_in_obstacle",
                               f"auv {i} at {pos} inside an obstacle safety envelope"))
            z = pos[2] if dim == 3 else 0.0
            auvs.append(Pose(pos[0], pos[1], z, heading or 0.0))
        for i, entry in enumerate(raw_targets):
            parsed = _parse_position(entry, dim)
            if parsed is None:
                errors.append(("bad_target", f"target {i}: position must be {dim} numbers"))
                continue
            pos, heading = parsed
            if not _in_bounds(pos, lower, upper):
                errors.append(("target_out_of_bounds", f"target {i} at {pos} outside bounds"))
            elif not point_clear(pos, probe):
                errors.append(("target_in_obstacle",
                               f"target {i} at {pos} inside an obstacle safety envelope"))
            targets.append(Target(pos, heading))

    if errors:
        raise ScenarioValidationError(errors)
    return Scenario(bounds, tuple(auvs), tuple(targets), obstacles, limits,
                    d_safety, max_travel, seed, dim, overrides)


def load_scenario(path) -> Scenario:
    """Load and validate a YAML scenario file."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    return validate_scenario(raw)


@dataclass(frozen=True)
class CampaignTemplate:
    """Scenario skeleton for benchmark campaigns: counts instead of positions."""

    bounds: tuple[float, ...]
    n_auvs: int
    n_targets: int
    obstacles: tuple[Obstacle, ...]
    limits: KinematicLimits
    d_safety: float
    max_travel: float | None = None
    dim: int = 2
    som_overrides: tuple[tuple[str, float], ...] = ()


def load_template(path) -> CampaignTemplate:
    """Load a campaign template; auvs/targets may be counts or position lists."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ScenarioValidationError([("bad_document", "template must be a mapping")])
    errors: list[tuple[str, str]] = []
    bounds, dim, limits, d_safety, max_travel, obstacles, overrides, _seed = \
        _parse_frame(raw, errors)

    def count_of(key: str, code: str) -> int:
        value = raw.get(key)
        if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
            return value
        if isinstance(value, list) and value:
            return len(value)
        errors.append((code, f"{key} must be a positive count or a non-empty list"))
        return 0

    n_auvs = count_of("auvs", "no_auvs")
    n_targets = count_of("targets", "no_targets")
    if errors:
        raise ScenarioValidationError(errors)
    return CampaignTemplate(bounds, n_auvs, n_targets, obstacles, limits,
                            d_safety, max_travel, dim, overrides)


def draw_scenario(template: CampaignTemplate, rng: np.random.Generator) -> Scenario:
    """Draw one concrete scenario from a template.

    Positions are uniform in bounds, rejecting points inside obstacle
    safety envelopes; AUV headings are uniform in [0, 2pi). Draw order
    (AUVs with headings, then targets) is fixed so a generator state
    maps to exactly one scenario.
    """
    dim = template.dim
    lower = template.bounds[:dim]
    upper = template.bounds[dim:]
    probe = Scenario(template.bounds, (), (), template.obstacles,
                     template.limits, template.d_safety, dim=dim)

    def draw_point() -> tuple[float, ...]:
        for _ in range(_PLACEMENT_ATTEMPTS):
            p = tuple(float(rng.uniform(lower[i], upper[i])) for i in range(dim))
            if point_clear(p, probe):
                return p
        raise RuntimeError("workspace too crowded: could not place an entity "
                           "clear of obstacle safety envelopes")

    auvs = []
    for _ in range(template.n_auvs):
        pos = draw_point()
        heading = float(rng.uniform(0.0, 2.0 * math.pi))
        z = pos[2] if dim == 3 else 0.0
        auvs.append(Pose(pos[0], pos[1], z, heading))
    targets = tuple(Target(draw_point()) for _ in range(template.n_targets))
    return Scenario(template.bounds, tuple(auvs), targets, template.obstacles,
                    template.limits, template.d_safety, template.max_travel,
                    None, dim, template.som_overrides)
