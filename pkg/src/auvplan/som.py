"""Event-triggered self-organizing-map task allocator.

Targets are presented sequentially (scenario order). For each target the
AUV-representing neurons compete on load-weighted distance; the winner's
neuron is pulled toward the target until it snaps, at which point the
assignment is committed together with a collision-checked, curvature-
bounded path. A winner whose path is blocked or over budget is rejected
for that round and the next-best competitor takes over.

Allocation is deterministic: no randomness is consumed anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .dubins import (Dubins3dPath, DubinsPath, Pose, extend_for_pitch,
                     shortest_path)
from .environment import Scenario, Target, path_clear

if TYPE_CHECKING:
    from .metrics import RunMetrics

#: Sentinel competition distance for ineligible AUVs.
INFEASIBLE = math.inf


@dataclass(frozen=True)
class SomParams:
    """Hyperparameters of the competition and update loop.

    learning_rate scales each pull toward the target; the neighborhood
    gain decays as (1 - gain_decay)^t from initial_gain; neurons farther
    than neighborhood_radius along a chain never move; snap_distance ends
    a round early; max_travel bounds each AUV's accumulated path length
    (scenario max_travel, when set, takes precedence).
    """

    learning_rate: float = 0.5
    gain_decay: float = 0.05
    initial_gain: float = 10.0
    neighborhood_radius: float = 10.0
    snap_distance: float = 0.05
    max_iterations: int = 500
    max_travel: float = math.inf
    heading_candidates: int = 16

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise ValueError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        if not 0 < self.gain_decay < 1:
            raise ValueError(f"gain_decay must be in (0, 1), got {self.gain_decay}")
        if self.initial_gain <= 0:
            raise ValueError(f"initial_gain must be positive, got {self.initial_gain}")
        if self.neighborhood_radius <= 0:
            raise ValueError(
                f"neighborhood_radius must be positive, got {self.neighborhood_radius}")
        if self.snap_distance <= 0:
            raise ValueError(f"snap_distance must be positive, got {self.snap_distance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.max_travel <= 0:
            raise ValueError(f"max_travel must be positive, got {self.max_travel}")
        if self.heading_candidates < 1:
            raise ValueError(
                f"heading_candidates must be >= 1, got {self.heading_candidates}")


def params_for(scenario: Scenario) -> SomParams:
    """Defaults overridden by the scenario file's som section."""
    overrides = dict(scenario.som_overrides)
    if "max_iterations" in overrides:
        overrides["max_iterations"] = int(overrides["max_iterations"])
    if "heading_candidates" in overrides:
        overrides["heading_candidates"] = int(overrides["heading_candidates"])
    return SomParams(**overrides)


def compute_nmax(n_targets: int, n_auvs: int) -> int:
    """Per-AUV task cap: the even share, rounded up when uneven."""
    if n_auvs < 1:
        raise ValueError(f"n_auvs must be >= 1, got {n_auvs}")
    if n_targets < 1:
        raise ValueError(f"n_targets must be >= 1, got {n_targets}")
    quotient, remainder = divmod(n_targets, n_auvs)
    return quotient if remainder == 0 else quotient + 1


@dataclass(frozen=True)
class AllocationLimits:
    """Fleet-level counts and the derived per-AUV task cap."""

    n_targets: int
    n_auvs: int
    max_tasks: int

    @classmethod
    def for_counts(cls, n_targets: int, n_auvs: int) -> "AllocationLimits":
        return cls(n_targets, n_auvs, compute_nmax(n_targets, n_auvs))


def load_balance_term(travel: float, mean_travel: float) -> float:
    """Relative load of one AUV against the fleet mean.

    Positive for over-worked AUVs (inflating their competition distance),
    negative for under-worked ones.
    """
    return (travel - mean_travel) / (1.0 + mean_travel)


def competition_distance(target, neuron, balance: float, travel: float,
                         max_travel: float) -> float:
    """Load-weighted Euclidean distance; infinite once travel exhausts the budget."""
    if travel >= max_travel:
        return INFEASIBLE
    return math.dist(tuple(target), tuple(neuron)) * (1.0 + balance)


class SomNetwork:
    """Mutable competition state: one neuron chain per AUV plus load records.

    Chain index 0 is the AUV-representing neuron; its displacement is what
    accrues travel during update steps. poses track the physical vehicle
    (position and heading after the last committed leg).
    """

    def __init__(self, weights: np.ndarray, poses: list[Pose],
                 task_cap: int | None = None):
        if weights.ndim != 3:
            raise ValueError("weights must have shape (auvs, chain, dim)")
        self.weights = weights.astype(float)
        self.poses = list(poses)
        self.travel = np.zeros(weights.shape[0])
        self.task_counts = np.zeros(weights.shape[0], dtype=int)
        self.tours: list[list[int]] = [[] for _ in range(weights.shape[0])]
        self.task_cap = task_cap

    @classmethod
    def from_scenario(cls, scenario: Scenario, chain_length: int = 1) -> "SomNetwork":
        dim = scenario.dim
        rows = []
        for pose in scenario.auvs:
            coords = (pose.x, pose.y, pose.z)[:dim]
            rows.append([coords] * chain_length)
        return cls(np.array(rows, dtype=float), list(scenario.auvs))

    @property
    def n_auvs(self) -> int:
        return self.weights.shape[0]

    @property
    def chain_length(self) -> int:
        return self.weights.shape[1]

    def mean_travel(self) -> float:
        return float(np.mean(self.travel))

    def at_cap(self, auv: int) -> bool:
        return self.task_cap is not None and self.task_counts[auv] >= self.task_cap

    def snapshot(self):
        return (self.weights.copy(), self.travel.copy(), self.task_counts.copy(),
                [list(t) for t in self.tours], list(self.poses))

    def restore(self, snap) -> None:
        weights, travel, counts, tours, poses = snap
        self.weights = weights.copy()
        self.travel = travel.copy()
        self.task_counts = counts.copy()
        self.tours = [list(t) for t in tours]
        self.poses = list(poses)


def select_winner(target, network: SomNetwork, params: SomParams, *,
                  mean_travel: float | None = None,
                  max_travel: float | None = None,
                  balanced: bool = True,
                  exclude=frozenset()) -> tuple[int, int] | None:
    """Argmin of the competition distance over all neurons.

    Ties break toward the lowest AUV id, then the lowest chain index.
    Returns None when every neuron is ineligible (infinite distance):
    budget exhausted, task cap reached, or explicitly excluded.
    """
    if mean_travel is None:
        mean_travel = network.mean_travel()
    if max_travel is None:
        max_travel = params.max_travel
    tpos = tuple(target)
    best = None
    best_d = INFEASIBLE
    for j in range(network.n_auvs):
        if j in exclude or network.at_cap(j):
            continue
        balance = load_balance_term(float(network.travel[j]), mean_travel) if balanced else 0.0
        for k in range(network.chain_length):
            d = competition_distance(tpos, network.weights[j, k], balance,
                                     float(network.travel[j]), max_travel)
            if d < best_d:
                best = (j, k)
                best_d = d
    return best


def neighborhood(distance: float, iteration: int, params: SomParams) -> float:
    """Gaussian pull strength at chain distance `distance`, iteration t.

    The gain shrinks geometrically with t, so the pull tightens over a
    round; anything at or beyond neighborhood_radius never moves.
    """
    if distance >= params.neighborhood_radius:
        return 0.0
    gain = (1.0 - params.gain_decay) ** iteration * params.initial_gain
    return math.exp(-(distance * distance) / (gain * gain))


def chain_distance(winner: tuple[int, int], auv: int, index: int) -> float:
    """Distance between neurons for neighborhood purposes.

    Neurons in another AUV's chain are infinitely far: competition is
    between vehicles, cooperation only within a chain.
    """
    wj, wk = winner
    if auv != wj:
        return INFEASIBLE
    return float(abs(index - wk))


def update_weights(network: SomNetwork, winner: tuple[int, int], target,
                   iteration: int, params: SomParams,
                   balance: float = 0.0) -> SomNetwork:
    """One competition step: pull the winner's chain toward the target.

    Neurons whose weighted distance is already below snap_distance land
    exactly on the target; the rest move by learning_rate times the
    neighborhood strength. The AUV-representing neuron's displacement is
    added to that AUV's travel. Mutates and returns the network.
    """
    tpos = np.asarray(tuple(target), dtype=float)
    wj = winner[0]
    lead_before = network.weights[wj, 0].copy()
    for k in range(network.chain_length):
        f = neighborhood(chain_distance(winner, wj, k), iteration, params)
        if f == 0.0:
            continue
        neuron = network.weights[wj, k]
        gap = float(np.linalg.norm(tpos - neuron))
        if gap * (1.0 + balance) < params.snap_distance:
            network.weights[wj, k] = tpos
        else:
            network.weights[wj, k] = neuron + params.learning_rate * f * (tpos - neuron)
    network.travel[wj] += float(np.linalg.norm(network.weights[wj, 0] - lead_before))
    return network


def obstacle_weight(obstacle, network: SomNetwork) -> float:
    """Smallest distance from an obstacle point to any neuron."""
    ob = np.asarray(tuple(obstacle), dtype=float)
    flat = network.weights.reshape(-1, network.weights.shape[2])
    return float(np.min(np.linalg.norm(flat - ob, axis=1)))


@dataclass(frozen=True)
class TriggerState:
    """Pair of event flags: u1 AND u2 decides whether a plan stands.

    u1 is 0 exactly when the competition distance is infinite (no budget
    left); u2 is 0 exactly when the nearest neuron clears the obstacle by
    more than d_safety. The allocator reassigns whenever the combination
    is 0 alongside a failed path check.
    """

    u1: int
    u2: int

    @property
    def u(self) -> int:
        return self.u1 & self.u2


def evaluate_trigger(distance: float, obstacle_clearance: float,
                     d_safety: float) -> TriggerState:
    """Event flags for one competition outcome; see TriggerState."""
    u1 = 0 if math.isinf(distance) else 1
    u2 = 0 if obstacle_clearance > d_safety else 1
    return TriggerState(u1, u2)


@dataclass(frozen=True)
class ReassignmentEvent:
    """A winner rejected during a target round, with the cause."""

    target: int
    auv: int
    reason: str  # "path_blocked" or "budget_exceeded"


@dataclass(frozen=True)
class Leg:
    """One committed path: AUV `auv` travels to target `target` as tour stop `order`."""

    auv: int
    target: int
    order: int
    path: DubinsPath | Dubins3dPath

    @property
    def length(self) -> float:
        return self.path.total_length


@dataclass
class AssignmentResult:
    """Full outcome of an allocation run.

    assignment maps target index to AUV index; targets no AUV could take
    appear in unassignable instead. travel[j] is the total planned path
    length of AUV j (0 for idle AUVs). metrics stays None until
    compute_metrics fills it.
    """

    scenario: Scenario
    balanced: bool
    assignment: dict[int, int]
    tours: list[list[int]]
    legs: list[Leg]
    unassignable: list[int]
    events: list[ReassignmentEvent]
    travel: list[float]
    task_counts: list[int]
    metrics: "RunMetrics | None" = None


def plan_leg(pose: Pose, target: Target, scenario: Scenario,
             params: SomParams) -> DubinsPath | Dubins3dPath:
    """Shortest curvature-bounded leg from a pose to a target.

    The arrival heading is the target's pinned heading when present,
    otherwise the best of heading_candidates evenly spaced directions
    (ties to the first). Obstacles are ignored here; the caller gates
    the result through path_clear.
    """
    limits = scenario.limits
    tx, ty = target.position[0], target.position[1]
    if target.heading is not None:
        headings = [target.heading]
    else:
        n = params.heading_candidates
        headings = [2.0 * math.pi * i / n for i in range(n)]
    start2d = Pose(pose.x, pose.y, 0.0, pose.heading)
    best = None
    for h in headings:
        flat = shortest_path(start2d, Pose(tx, ty, 0.0, h), limits)
        if scenario.dim == 3:
            cand = extend_for_pitch(flat, pose.z, target.position[2], limits)
        else:
            cand = flat
        if best is None or cand.total_length < best.total_length:
            best = cand
    return best


def _arrival_pose(leg: Leg, target: Target, dim: int) -> Pose:
    path = leg.path
    flat = path.path2d if isinstance(path, Dubins3dPath) else path
    z = target.position[2] if dim == 3 else 0.0
    return Pose(target.position[0], target.position[1], z, flat.goal.heading)


def run_allocation(scenario: Scenario, params: SomParams | None = None,
                   balanced: bool = True) -> AssignmentResult:
    """Assign every target to an AUV and plan the connecting paths.

    Targets are processed in scenario order, one competition round each.
    Within a round the winner is re-selected every iteration; the first
    time an AUV wins it must produce a collision-free leg from its
    current pose that fits its remaining budget, or it is rejected for
    the round and a reassignment event is recorded. A round commits when
    the winner's weighted distance drops below snap_distance or the
    iteration budget runs out; commitment snaps the winner's chain onto
    the target, advances its pose, and adds the leg's true length to its
    travel. All other AUVs are restored to their round-start state, so
    losing a competition never costs budget.

    With balancing off the load term is dropped and the per-AUV task cap
    is not applied; the travel budget still holds.
    """
    if params is None:
        params = params_for(scenario)
    max_travel = scenario.max_travel if scenario.max_travel is not None \
        else params.max_travel
    network = SomNetwork.from_scenario(scenario)
    if balanced:
        network.task_cap = AllocationLimits.for_counts(
            len(scenario.targets), len(scenario.auvs)).max_tasks

    assignment: dict[int, int] = {}
    unassignable: list[int] = []
    events: list[ReassignmentEvent] = []
    legs: list[Leg] = []
    check_step = scenario.d_safety / 2.0

    for l, target in enumerate(scenario.targets):
        tpos = target.position
        snap = network.snapshot()
        base_travel = snap[1]
        mean_travel = network.mean_travel()
        rejected: set[int] = set()
        planned: dict[int, DubinsPath | Dubins3dPath] = {}
        current: tuple[int, int] | None = None

        t = 0
        while t < params.max_iterations:
            winner = select_winner(tpos, network, params, mean_travel=mean_travel,
                                   max_travel=max_travel, balanced=balanced,
                                   exclude=rejected)
            if winner is None:
                current = None
                break
            j, k = winner
            if j not in planned:
                leg_path = plan_leg(network.poses[j], target, scenario, params)
                over_budget = float(base_travel[j]) + leg_path.total_length > max_travel
                blocked = not path_clear(leg_path, scenario, check_step)
                if blocked or over_budget:
                    reason = "path_blocked" if blocked else "budget_exceeded"
                    events.append(ReassignmentEvent(target=l, auv=j, reason=reason))
                    rejected.add(j)
                    t += 1
                    continue
                planned[j] = leg_path
            current = winner
            balance = load_balance_term(float(network.travel[j]), mean_travel) \
                if balanced else 0.0
            distance = competition_distance(tpos, network.weights[j, k], balance,
                                            float(network.travel[j]), max_travel)
            if distance < params.snap_distance:
                break
            update_weights(network, winner, tpos, t, params, balance=balance)
            t += 1

        if current is None:
            network.restore(snap)
            unassignable.append(l)
            continue

        j = current[0]
        leg_path = planned[j]
        leg = Leg(auv=j, target=l, order=len(snap[3][j]), path=leg_path)
        network.restore(snap)
        network.weights[j, :, :] = np.asarray(tpos, dtype=float)
        network.travel[j] = float(base_travel[j]) + leg_path.total_length
        network.task_counts[j] += 1
        network.tours[j].append(l)
        network.poses[j] = _arrival_pose(leg, target, scenario.dim)
        assignment[l] = j
        legs.append(leg)

    return AssignmentResult(
        scenario=scenario,
        balanced=balanced,
        assignment=assignment,
        tours=[list(t) for t in network.tours],
        legs=legs,
        unassignable=unassignable,
        events=events,
        travel=[float(v) for v in network.travel],
        task_counts=[int(c) for c in network.task_counts],
    )
