"""Allocator tests: competition math, triggers, and full runs."""

import math

import numpy as np
import pytest

from auvplan.dubins import Dubins3dPath, KinematicLimits, Pose
from auvplan.environment import Obstacle, Scenario, Target, path_clear
from auvplan.som import (AllocationLimits, SomNetwork, SomParams,
                         competition_distance, compute_nmax, evaluate_trigger,
                         load_balance_term, neighborhood, obstacle_weight,
                         params_for, plan_leg, run_allocation, select_winner,
                         update_weights)

LIMITS = KinematicLimits(r_min=1.0)


def make_scenario(auvs, targets, obstacles=(), d_safety=1.5, max_travel=None,
                  bounds=(0.0, 0.0, 30.0, 30.0), dim=2, som=()):
    return Scenario(bounds, tuple(auvs), tuple(Target(t) for t in targets),
                    tuple(obstacles), LIMITS, d_safety, max_travel, None, dim,
                    tuple(som))


def network_at(*positions):
    weights = np.array([[list(p)] for p in positions], dtype=float)
    poses = [Pose(p[0], p[1]) for p in positions]
    return SomNetwork(weights, poses)


def test_task_cap_examples():
    assert compute_nmax(6, 2) == 3
    assert compute_nmax(6, 4) == 2
    assert compute_nmax(8, 4) == 2
    assert compute_nmax(1, 5) == 1
    assert compute_nmax(7, 3) == 3


def test_task_cap_rejects_empty_fleet():
    with pytest.raises(ValueError):
        compute_nmax(6, 0)
    with pytest.raises(ValueError):
        compute_nmax(0, 3)


def test_allocation_limits_carry_cap():
    limits = AllocationLimits.for_counts(6, 4)
    assert (limits.n_targets, limits.n_auvs, limits.max_tasks) == (6, 4, 2)


def test_load_balance_term():
    assert load_balance_term(5.0, 5.0) == 0.0
    assert load_balance_term(0.0, 0.0) == 0.0
    assert load_balance_term(3.0, 1.0) == pytest.approx(1.0)
    assert load_balance_term(0.0, 2.0) == pytest.approx(-2.0 / 3.0)


def test_competition_distance():
    assert competition_distance((3, 4), (0, 0), 0.0, 0.0, 100.0) == pytest.approx(5.0)
    assert competition_distance((3, 4), (0, 0), 1.0, 0.0, 100.0) == pytest.approx(10.0)
    assert competition_distance((3, 4), (0, 0), 0.0, 100.0, 100.0) == math.inf
    assert competition_distance((3, 4), (0, 0), 0.0, 101.0, 100.0) == math.inf


def test_select_winner_prefers_nearest():
    net = network_at((0, 0), (5, 0))
    assert select_winner((1.0, 0.0), net, SomParams()) == (0, 0)


def test_select_winner_tie_breaks_low_id():
    net = network_at((0, 0), (2, 0))
    assert select_winner((1.0, 0.0), net, SomParams()) == (0, 0)


def test_select_winner_skips_exhausted_budget():
    net = network_at((0, 0), (5, 0))
    net.travel[0] = 50.0
    assert select_winner((1.0, 0.0), net, SomParams(), mean_travel=0.0,
                         max_travel=50.0) == (1, 0)


def test_select_winner_none_when_all_ineligible():
    net = network_at((0, 0), (5, 0))
    net.travel[:] = 10.0
    assert select_winner((1.0, 0.0), net, SomParams(), max_travel=5.0) is None
    fresh = network_at((0, 0), (5, 0))
    assert select_winner((1.0, 0.0), fresh, SomParams(), exclude={0, 1}) is None


def test_select_winner_respects_task_cap():
    net = network_at((0, 0), (5, 0))
    net.task_cap = 1
    net.task_counts[0] = 1
    assert select_winner((1.0, 0.0), net, SomParams()) == (1, 0)


def test_select_winner_load_term_changes_outcome():
    net = network_at((0, 0), (3, 0))
    net.travel[0] = 9.0
    # Euclidean favorite is AUV 0 (distance 1 vs 2), but its relative load
    # inflates the weighted distance beyond AUV 1's.
    assert select_winner((1.0, 0.0), net, SomParams(), balanced=False) == (0, 0)
    assert select_winner((1.0, 0.0), net, SomParams(), balanced=True) == (1, 0)


def test_neighborhood_function():
    params = SomParams(initial_gain=10.0, neighborhood_radius=10.0, gain_decay=0.05)
    assert neighborhood(0.0, 0, params) == pytest.approx(1.0)
    assert neighborhood(10.0, 0, params) == 0.0
    assert neighborhood(25.0, 3, params) == 0.0
    assert neighborhood(10.0 - 1e-9, 0, params) == pytest.approx(math.exp(-1.0))


def test_neighborhood_tightens_over_iterations():
    params = SomParams()
    values = [neighborhood(4.0, t, params) for t in range(25)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_update_moves_winner_toward_target():
    net = network_at((0, 0), (10, 10))
    params = SomParams(learning_rate=0.5)
    update_weights(net, (0, 0), (4.0, 0.0), 0, params)
    assert net.weights[0, 0] == pytest.approx([2.0, 0.0])
    assert net.travel[0] == pytest.approx(2.0)
    assert net.weights[1, 0] == pytest.approx([10.0, 10.0])
    assert net.travel[1] == 0.0


def test_update_full_step_lands_on_target():
    net = network_at((0, 0))
    params = SomParams(learning_rate=1.0)
    update_weights(net, (0, 0), (4.0, 3.0), 0, params)
    assert net.weights[0, 0] == pytest.approx([4.0, 3.0])


def test_update_snaps_when_close():
    net = network_at((0.0, 0.0))
    net.weights[0, 0] = [3.99, 0.0]
    params = SomParams(snap_distance=0.05)
    update_weights(net, (0, 0), (4.0, 0.0), 0, params)
    assert tuple(net.weights[0, 0]) == (4.0, 0.0)


def test_update_travel_accumulates_monotonically():
    net = network_at((0, 0))
    params = SomParams()
    last = 0.0
    for t in range(20):
        update_weights(net, (0, 0), (8.0, 6.0), t, params)
        assert net.travel[0] >= last
        last = net.travel[0]


def test_obstacle_weight():
    net = network_at((0, 0))
    assert obstacle_weight((0.0, 0.0), net) == 0.0
    assert obstacle_weight((3.0, 4.0), net) == pytest.approx(5.0)
    pair = network_at((0, 0), (1, 1))
    assert obstacle_weight((1.0, 2.0), pair) == pytest.approx(1.0)


def test_trigger_truth_table():
    cases = [
        (math.inf, 5.0, 1.5, (0, 0, 0)),
        (math.inf, 1.0, 1.5, (0, 1, 0)),
        (4.0, 5.0, 1.5, (1, 0, 0)),
        (4.0, 1.0, 1.5, (1, 1, 1)),
    ]
    for distance, clearance, d_safety, expected in cases:
        state = evaluate_trigger(distance, clearance, d_safety)
        assert (state.u1, state.u2, state.u) == expected


def test_trigger_boundary_inclusive():
    state = evaluate_trigger(2.0, 1.5, 1.5)
    assert (state.u1, state.u2, state.u) == (1, 1, 1)


def test_params_validation():
    with pytest.raises(ValueError):
        SomParams(learning_rate=0.0)
    with pytest.raises(ValueError):
        SomParams(gain_decay=1.0)
    with pytest.raises(ValueError):
        SomParams(snap_distance=0.0)
    with pytest.raises(ValueError):
        SomParams(max_iterations=0)


def test_params_for_applies_overrides():
    sc = make_scenario([Pose(1, 1)], [(5, 5)],
                       som=(("learning_rate", 0.8), ("max_iterations", 50.0)))
    params = params_for(sc)
    assert params.learning_rate == 0.8
    assert params.max_iterations == 50
    assert isinstance(params.max_iterations, int)


OPEN_AUVS = (Pose(3, 3, heading=0.0), Pose(27, 3, heading=math.pi),
             Pose(3, 27, heading=0.0), Pose(27, 27, heading=math.pi))
OPEN_TARGETS = ((8, 6), (22, 5), (6, 24), (24, 23), (15, 15), (12, 20))


def test_open_water_run_assigns_everything():
    result = run_allocation(make_scenario(OPEN_AUVS, OPEN_TARGETS))
    assert not result.unassignable
    assert not result.events
    assert sorted(result.assignment) == list(range(6))
    cap = compute_nmax(6, 4)
    assert all(c <= cap for c in result.task_counts)
    for auv, tour in enumerate(result.tours):
        assert [t for t, a in result.assignment.items() if a == auv] == tour


def test_run_is_deterministic():
    sc = make_scenario(OPEN_AUVS, OPEN_TARGETS)
    a = run_allocation(sc)
    b = run_allocation(sc)
    assert a.assignment == b.assignment
    assert a.travel == b.travel
    assert [leg.path.segments for leg in a.legs] == \
           [leg.path.segments for leg in b.legs]


def test_travel_equals_leg_lengths():
    result = run_allocation(make_scenario(OPEN_AUVS, OPEN_TARGETS))
    per_auv = [0.0] * 4
    for leg in result.legs:
        per_auv[leg.auv] += leg.path.total_length
    assert result.travel == pytest.approx(per_auv, abs=1e-9)


def test_all_legs_clear_obstacles():
    sc = make_scenario(
        (Pose(3, 15, heading=0.0), Pose(27, 15, heading=math.pi)),
        ((12, 15), (5, 5), (25, 25)),
        obstacles=(Obstacle((7.5, 15.0), 2.0),))
    result = run_allocation(sc)
    assert any(e.reason == "path_blocked" for e in result.events)
    assert not result.unassignable
    for leg in result.legs:
        assert path_clear(leg.path, sc, sc.d_safety / 2.0)


def test_blocked_single_auv_leaves_target_unassigned():
    sc = make_scenario((Pose(3, 15, heading=0.0),), ((12, 15),),
                       obstacles=(Obstacle((7.5, 15.0), 2.0),))
    result = run_allocation(sc)
    # The lone AUV cannot pass the wall of the obstacle head-on within the
    # iteration budget of one rejection per AUV, so the target is reported.
    if result.unassignable:
        assert result.unassignable == [0]
        assert result.events[0].reason == "path_blocked"
    else:
        for leg in result.legs:
            assert path_clear(leg.path, sc, sc.d_safety / 2.0)


def test_budget_exhaustion_marks_unassignable():
    sc = make_scenario(OPEN_AUVS, OPEN_TARGETS, max_travel=0.001)
    result = run_allocation(sc)
    assert result.unassignable == list(range(6))
    assert all(e.reason == "budget_exceeded" for e in result.events)
    assert result.travel == [0.0] * 4


def test_budget_gate_respects_real_path_length():
    # Straight leg of length 9 fits a 10-unit budget; a second 9-unit leg
    # must not.
    sc = make_scenario((Pose(1, 1, heading=0.0),), ((10, 1), (19, 1)),
                       max_travel=10.0)
    result = run_allocation(sc)
    assert result.assignment == {0: 0}
    assert result.unassignable == [1]
    assert result.travel[0] == pytest.approx(9.0)


def test_balanced_cap_splits_cluster():
    auvs = (Pose(5, 5, heading=math.pi / 4), Pose(25, 25, heading=5 * math.pi / 4))
    targets = ((8, 4), (4, 9), (10, 10), (7, 13), (13, 6), (12, 12))
    balanced = run_allocation(make_scenario(auvs, targets), balanced=True)
    unbalanced = run_allocation(make_scenario(auvs, targets), balanced=False)
    assert sorted(balanced.task_counts) == [3, 3]
    assert unbalanced.task_counts == [6, 0]


def test_unbalanced_keeps_travel_budget():
    sc = make_scenario((Pose(1, 1, heading=0.0),), ((10, 1), (19, 1)),
                       max_travel=10.0)
    result = run_allocation(sc, balanced=False)
    assert result.unassignable == [1]


def test_pinned_heading_respected():
    sc = Scenario((0.0, 0.0, 30.0, 30.0), (Pose(3, 3, heading=0.0),),
                  (Target((20, 20), heading=math.pi / 2),), (), LIMITS, 1.5)
    result = run_allocation(sc)
    leg = result.legs[0]
    assert leg.path.goal.heading == pytest.approx(math.pi / 2)


def test_plan_leg_picks_cheapest_heading():
    sc = make_scenario([Pose(1, 1, heading=0.0)], [(20, 1)])
    leg = plan_leg(Pose(1, 1, heading=0.0), Target((20, 1)), sc, SomParams())
    # Approaching a target dead ahead should cost exactly the straight line.
    assert leg.total_length == pytest.approx(19.0)
    assert leg.goal.heading == pytest.approx(0.0)


def test_three_dimensional_run():
    sc = make_scenario(
        (Pose(3, 3, -5, 0.0), Pose(27, 27, -2, math.pi)),
        ((10, 10, -8), (20, 20, -1), (5, 25, -9)),
        obstacles=(Obstacle((15.0, 15.0, -5.0), 2.0),),
        bounds=(0.0, 0.0, -10.0, 30.0, 30.0, 0.0), dim=3)
    result = run_allocation(sc)
    assert not result.unassignable
    for leg in result.legs:
        assert isinstance(leg.path, Dubins3dPath)
        assert abs(leg.path.pitch) <= LIMITS.max_pitch + 1e-9
        assert path_clear(leg.path, sc, sc.d_safety / 2.0)
    arrival = result.legs[0].path.pose_at(result.legs[0].path.total_length)
    first_target = sc.targets[result.legs[0].target].position
    assert arrival.z == pytest.approx(first_target[2], abs=1e-9)


def test_network_weights_stay_in_bounds():
    rng = np.random.default_rng(9)
    net = network_at((5, 5), (25, 25))
    params = SomParams()
    for t in range(200):
        target = (float(rng.uniform(0, 30)), float(rng.uniform(0, 30)))
        winner = select_winner(target, net, params)
        update_weights(net, winner, target, t % 20, params)
        assert np.all(net.weights >= 0.0) and np.all(net.weights <= 30.0)


def test_snapshot_restore_round_trip():
    net = network_at((1, 1), (2, 2))
    snap = net.snapshot()
    update_weights(net, (0, 0), (9.0, 9.0), 0, SomParams())
    net.task_counts[1] = 3
    net.tours[1].append(7)
    net.restore(snap)
    assert net.weights[0, 0] == pytest.approx([1.0, 1.0])
    assert net.task_counts[1] == 0
    assert net.tours[1] == []
