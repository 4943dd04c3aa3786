"""Fleet task assignment and curvature-bounded path planning for AUVs.

The allocator (`som`) distributes targets over a fleet with workload
balancing and obstacle awareness; the planner (`dubins`) produces
minimum-turning-radius paths in 2D and 3D; `environment` models the
workspace; `metrics` runs seeded benchmark campaigns; `cli` ties it all
to scenario files and report artifacts.
"""

from .dubins import (CccGeometry, Dubins3dPath, DubinsPath, KinematicLimits,
                     PitchLimitError, Pose, curvature_radius, extend_for_pitch,
                     lift_to_3d, plan_3d, sample_path, shortest_path,
                     solve_ccc, solve_csc, solve_word)
from .environment import (CampaignTemplate, Obstacle, Scenario,
                          ScenarioValidationError, Target, draw_scenario,
                          load_scenario, load_template, path_clear,
                          point_clear, validate_scenario)
from .metrics import (CampaignReport, RunMetrics, campaign_csv,
                      compute_metrics, run_campaign)
from .som import (AllocationLimits, AssignmentResult, Leg, ReassignmentEvent,
                  SomNetwork, SomParams, TriggerState, competition_distance,
                  compute_nmax, evaluate_trigger, load_balance_term,
                  neighborhood, obstacle_weight, plan_leg, run_allocation,
                  select_winner, update_weights)

__version__ = "0.1.0"
