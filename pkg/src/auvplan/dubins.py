"""Curvature-bounded (Dubins) path construction between oriented poses.

2D paths are built from the six candidate words (LSL, RSR, LSR, RSL, RLR,
LRL); 3D paths are obtained by linearly interpolating depth along the 2D
arc length, inserting whole start-circle loops when the required pitch
would exceed the vehicle's limit.

Conventions: headings in radians, normalized to [0, 2pi); counter-clockwise
turns are positive; 'L' turns counter-clockwise, 'R' clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

TWO_PI = 2.0 * math.pi

#: Fixed evaluation/tie-break order for the six candidate words.
WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")
CSC_WORDS = ("LSL", "RSR", "LSR", "RSL")
CCC_WORDS = ("RLR", "LRL")


def norm_angle(angle: float) -> float:
    """Normalize an angle to [0, 2pi)."""
    return angle % TWO_PI


def wrap_angle(angle: float) -> float:
    """Wrap an angle difference to (-pi, pi]."""
    wrapped = angle % TWO_PI
    if wrapped > math.pi:
        wrapped -= TWO_PI
    return wrapped


class PitchLimitError(Exception):
    """Raised when a depth change needs more pitch than the vehicle allows.

    Carries the pitch the direct lift would require so callers can decide
    to extend the path instead (see :func:`extend_for_pitch`).
    """

    def __init__(self, required_pitch: float, max_pitch: float):
        self.required_pitch = required_pitch
        self.max_pitch = max_pitch
        super().__init__(
            f"required pitch {required_pitch:.4f} rad exceeds limit {max_pitch:.4f} rad"
        )


@dataclass(frozen=True)
class Pose:
    """Position and orientation: heading in the XY plane, pitch out of it.

    z and pitch stay 0 for planar work. Heading is normalized to [0, 2pi)
    on construction.
    """

    x: float
    y: float
    z: float = 0.0
    heading: float = 0.0
    pitch: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", norm_angle(self.heading))

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class KinematicLimits:
    """Vehicle maneuvering limits: turning radius, pitch, and control bounds.

    mu1/mu2 bound the heading and pitch rates per unit arc length; mu1
    defaults to 1/r_min so the planar curvature limit is self-consistent.
    """

    r_min: float = 1.0
    max_pitch: float = math.radians(15.0)
    mu1: float = 0.0
    mu2: float = 0.0

    def __post_init__(self):
        if self.r_min <= 0:
            raise ValueError(f"r_min must be positive, got {self.r_min}")
        if not 0 < self.max_pitch < math.pi / 2:
            raise ValueError(f"max_pitch must be in (0, pi/2), got {self.max_pitch}")
        if self.mu1 == 0.0:
            object.__setattr__(self, "mu1", 1.0 / self.r_min)


def curvature_radius(mu1: float, mu2: float, pitch: float) -> float:
    """Turning radius produced by heading/pitch rates mu1, mu2 at a pitch.

    Returns math.inf when both effective rates vanish (straight motion).
    """
    denom = math.hypot(mu1 * math.cos(pitch), mu2)
    if denom == 0.0:
        return math.inf
    return 1.0 / denom


def turn_center(pose: Pose, letter: str, r: float) -> tuple[float, float]:
    """Center of the turning circle tangent to `pose` for an 'L' or 'R' turn."""
    if letter == "L":
        return (pose.x - r * math.sin(pose.heading), pose.y + r * math.cos(pose.heading))
    if letter == "R":
        return (pose.x + r * math.sin(pose.heading), pose.y - r * math.cos(pose.heading))
    raise ValueError(f"turn letter must be 'L' or 'R', got {letter!r}")


def _advance(x: float, y: float, heading: float, letter: str, dist: float,
             r: float) -> tuple[float, float, float]:
    """Move `dist` along one segment type from (x, y, heading), closed form."""
    if dist == 0.0:
        return x, y, heading
    if letter == "S":
        return x + dist * math.cos(heading), y + dist * math.sin(heading), heading
    sweep = dist / r
    if letter == "L":
        cx = x - r * math.sin(heading)
        cy = y + r * math.cos(heading)
        a = heading - math.pi / 2 + sweep
        return cx + r * math.cos(a), cy + r * math.sin(a), heading + sweep
    # 'R'
    cx = x + r * math.sin(heading)
    cy = y - r * math.cos(heading)
    a = heading + math.pi / 2 - sweep
    return cx + r * math.cos(a), cy + r * math.sin(a), heading - sweep


@dataclass(frozen=True)
class CccGeometry:
    """Three-circle construction backing an RLR/LRL path.

    p1/p3 are the start/goal turning-circle centers, p2 the middle circle
    center, pt1/pt2 the tangency points, theta the rotation applied to the
    center line, d the |p1 p3| separation.
    """

    p1: tuple[float, float]
    p2: tuple[float, float]
    p3: tuple[float, float]
    pt1: tuple[float, float]
    pt2: tuple[float, float]
    theta: float
    d: float


@dataclass(frozen=True)
class DubinsPath:
    """A planar curvature-bounded path: typed word plus segment lengths.

    Segment lengths are non-negative arc/line lengths in workspace units;
    direction information lives in the word letters. Arc segments run on
    circles of radius exactly r_min.
    """

    word: str
    segments: tuple[float, float, float]
    start: Pose
    goal: Pose
    r_min: float
    ccc: CccGeometry | None = None

    @property
    def total_length(self) -> float:
        return self.segments[0] + self.segments[1] + self.segments[2]

    def pose_at(self, s: float) -> Pose:
        """Pose at arc-length parameter s in [0, total_length]."""
        s = min(max(s, 0.0), self.total_length)
        x, y, heading = self.start.x, self.start.y, self.start.heading
        remaining = s
        for letter, seg in zip(self.word, self.segments):
            if remaining <= seg:
                x, y, heading = _advance(x, y, heading, letter, remaining, self.r_min)
                return Pose(x, y, self.start.z, heading)
            x, y, heading = _advance(x, y, heading, letter, seg, self.r_min)
            remaining -= seg
        return Pose(x, y, self.start.z, heading)


def _sample_params(total: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError(f"sample step must be positive, got {step}")
    params = []
    s = 0.0
    i = 0
    while s < total - 1e-12:
        params.append(s)
        i += 1
        s = i * step
    params.append(total)
    return params


def sample_path(path: DubinsPath, step: float) -> list[Pose]:
    """Poses along the path at spacing `step`; endpoints always included."""
    return [path.pose_at(s) for s in _sample_params(path.total_length, step)]


# ---------------------------------------------------------------------------
# CSC words (two arcs joined by a straight segment)
#
# Solved in the scale-normalized frame: d = |goal - start| / r, alpha/beta
# the start/goal headings measured from the start->goal direction. Each
# solver returns normalized segment parameters (t, p, q) or None.
# ---------------------------------------------------------------------------

def _lsl(alpha, beta, d):
    p_sq = 2 + d * d - 2 * math.cos(alpha - beta) + 2 * d * (math.sin(alpha) - math.sin(beta))
    if p_sq < 0:
        return None
    tmp = math.atan2(math.cos(beta) - math.cos(alpha), d + math.sin(alpha) - math.sin(beta))
    return norm_angle(tmp - alpha), math.sqrt(p_sq), norm_angle(beta - tmp)


def _rsr(alpha, beta, d):
    p_sq = 2 + d * d - 2 * math.cos(alpha - beta) + 2 * d * (math.sin(beta) - math.sin(alpha))
    if p_sq < 0:
        return None
    tmp = math.atan2(math.cos(alpha) - math.cos(beta), d - math.sin(alpha) + math.sin(beta))
    return norm_angle(alpha - tmp), math.sqrt(p_sq), norm_angle(tmp - beta)


def _lsr(alpha, beta, d):
    p_sq = -2 + d * d + 2 * math.cos(alpha - beta) + 2 * d * (math.sin(alpha) + math.sin(beta))
    if p_sq < 0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(-math.cos(alpha) - math.cos(beta),
                     d + math.sin(alpha) + math.sin(beta)) - math.atan2(-2.0, p)
    return norm_angle(tmp - alpha), p, norm_angle(tmp - beta)


def _rsl(alpha, beta, d):
    p_sq = -2 + d * d + 2 * math.cos(alpha - beta) - 2 * d * (math.sin(alpha) + math.sin(beta))
    if p_sq < 0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(math.cos(alpha) + math.cos(beta),
                     d - math.sin(alpha) - math.sin(beta)) - math.atan2(2.0, p)
    return norm_angle(alpha - tmp), p, norm_angle(beta - tmp)


_CSC_SOLVERS = {"LSL": _lsl, "RSR": _rsr, "LSR": _lsr, "RSL": _rsl}


def solve_csc(start: Pose, goal: Pose, limits: KinematicLimits,
              word: str) -> DubinsPath | None:
    """Solve one arc-straight-arc word; None when no real tangent exists."""
    if word not in _CSC_SOLVERS:
        raise ValueError(f"not a CSC word: {word!r}")
    r = limits.r_min
    dx = goal.x - start.x
    dy = goal.y - start.y
    big_d = math.hypot(dx, dy)
    theta = math.atan2(dy, dx) if big_d > 0 else 0.0
    alpha = norm_angle(start.heading - theta)
    beta = norm_angle(goal.heading - theta)
    sol = _CSC_SOLVERS[word](alpha, beta, big_d / r)
    if sol is None:
        return None
    t, p, q = sol
    return DubinsPath(word, (t * r, p * r, q * r), start, goal, r)


def solve_ccc(start: Pose, goal: Pose, limits: KinematicLimits,
              word: str) -> DubinsPath | None:
    """Solve a three-arc word through the tangent middle circle.

    Valid only while the start/goal turning circles sit strictly closer
    than 4*r_min (and are not coincident). The middle-circle center is
    found by rotating the center line by theta = acos(d / 4r): rotation
    is added for LRL, subtracted for RLR.
    """
    if word not in CCC_WORDS:
        raise ValueError(f"not a CCC word: {word!r}")
    r = limits.r_min
    p1 = turn_center(start, word[0], r)
    p3 = turn_center(goal, word[2], r)
    v1x = p3[0] - p1[0]
    v1y = p3[1] - p1[1]
    d = math.hypot(v1x, v1y)
    if d >= 4.0 * r or d < 1e-12:
        return None
    theta = math.acos(d / (4.0 * r))
    base = math.atan2(v1y, v1x)
    rot = base + theta if word == "LRL" else base - theta
    p2 = (p1[0] + 2.0 * r * math.cos(rot), p1[1] + 2.0 * r * math.sin(rot))

    def toward(target):
        vx = target[0] - p2[0]
        vy = target[1] - p2[1]
        n = math.hypot(vx, vy)
        return (p2[0] + vx / n * r, p2[1] + vy / n * r)

    pt1 = toward(p1)
    pt2 = toward(p3)
    geom = CccGeometry(p1, p2, p3, pt1, pt2, theta, d)

    def sweep(center, a, b, letter):
        ang_a = math.atan2(a[1] - center[1], a[0] - center[0])
        ang_b = math.atan2(b[1] - center[1], b[0] - center[0])
        if letter == "L":
            return norm_angle(ang_b - ang_a)
        return norm_angle(ang_a - ang_b)

    s1 = r * sweep(p1, start.xy, pt1, word[0])
    s2 = r * sweep(p2, pt1, pt2, word[1])
    s3 = r * sweep(p3, pt2, goal.xy, word[2])
    return DubinsPath(word, (s1, s2, s3), start, goal, r, ccc=geom)


def solve_word(start: Pose, goal: Pose, limits: KinematicLimits,
               word: str) -> DubinsPath | None:
    """Solve any single word; dispatches to the CSC or CCC construction."""
    if word in CSC_WORDS:
        return solve_csc(start, goal, limits, word)
    return solve_ccc(start, goal, limits, word)


def shortest_path(start: Pose, goal: Pose, limits: KinematicLimits) -> DubinsPath:
    """Shortest of the six candidate words between two planar poses.

    Ties break by fixed word order (WORDS). Identical poses yield a
    zero-length path.
    """
    if (start.distance_to(goal) < 1e-12
            and abs(wrap_angle(goal.heading - start.heading)) < 1e-12):
        return DubinsPath("LSL", (0.0, 0.0, 0.0), start, goal, limits.r_min)
    best = None
    for word in WORDS:
        cand = solve_word(start, goal, limits, word)
        if cand is None:
            continue
        if best is None or cand.total_length < best.total_length:
            best = cand
    assert best is not None, "a CSC word is always feasible for distinct poses"
    return best


# ---------------------------------------------------------------------------
# 3D: linear depth interpolation along the 2D arc length
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dubins3dPath:
    """A 2D path lifted to 3D by a constant-grade depth profile.

    `loops` counts whole start-circle turns inserted to keep the pitch
    within limits; they are already folded into path2d's first segment.
    """

    path2d: DubinsPath
    z0: float
    z1: float
    loops: int = 0

    @property
    def pitch(self) -> float:
        """Signed constant pitch of the depth ramp."""
        return math.atan2(self.z1 - self.z0, self.path2d.total_length)

    @property
    def total_length(self) -> float:
        return math.hypot(self.path2d.total_length, self.z1 - self.z0)

    def pose_at(self, s: float) -> Pose:
        """Pose at 3D arc-length parameter s in [0, total_length]."""
        length3 = self.total_length
        length2 = self.path2d.total_length
        s = min(max(s, 0.0), length3)
        s2 = s * length2 / length3 if length3 > 0 else 0.0
        flat = self.path2d.pose_at(s2)
        frac = s2 / length2 if length2 > 0 else 1.0
        z = self.z0 + frac * (self.z1 - self.z0)
        return Pose(flat.x, flat.y, z, flat.heading, self.pitch)

    def sample(self, step: float) -> list[Pose]:
        return [self.pose_at(s) for s in _sample_params(self.total_length, step)]


def lift_to_3d(path2d: DubinsPath, z0: float, z1: float,
               limits: KinematicLimits) -> Dubins3dPath:
    """Lift a 2D path to a straight depth ramp from z0 to z1.

    Raises PitchLimitError when the constant pitch the ramp needs exceeds
    limits.max_pitch; the error carries the offending value.
    """
    dz = abs(z1 - z0)
    length2 = path2d.total_length
    required = math.atan2(dz, length2)
    if required > limits.max_pitch:
        raise PitchLimitError(required, limits.max_pitch)
    return Dubins3dPath(path2d, z0, z1)


def loops_for_pitch(length2d: float, dz: float, limits: KinematicLimits) -> int:
    """Whole start-circle loops needed before a depth ramp fits the pitch cap."""
    dz = abs(dz)
    if dz == 0.0 or math.atan2(dz, length2d) <= limits.max_pitch:
        return 0
    needed = dz / math.tan(limits.max_pitch)
    circumference = TWO_PI * limits.r_min
    n = max(0, math.ceil((needed - length2d) / circumference))
    while math.atan2(dz, length2d + n * circumference) > limits.max_pitch:
        n += 1
    return n


def extend_for_pitch(path2d: DubinsPath, z0: float, z1: float,
                     limits: KinematicLimits) -> Dubins3dPath:
    """Lift with whole start-circle loops inserted until the pitch fits.

    The loops run on the first arc's turning circle (the word's first
    letter), so the 2D projection keeps its word: the first segment just
    grows by a multiple of the circumference.
    """
    n = loops_for_pitch(path2d.total_length, z1 - z0, limits)
    if n == 0:
        return lift_to_3d(path2d, z0, z1, limits)
    s1, s2, s3 = path2d.segments
    extended = replace(path2d, segments=(s1 + n * TWO_PI * limits.r_min, s2, s3))
    lifted = lift_to_3d(extended, z0, z1, limits)
    return replace(lifted, loops=n)


def plan_3d(start: Pose, goal: Pose, limits: KinematicLimits) -> Dubins3dPath:
    """Shortest-word 2D plan between the XY projections, lifted to 3D."""
    flat = shortest_path(Pose(start.x, start.y, 0.0, start.heading),
                         Pose(goal.x, goal.y, 0.0, goal.heading), limits)
    return extend_for_pitch(flat, start.z, goal.z, limits)
