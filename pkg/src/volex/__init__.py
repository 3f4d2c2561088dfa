"""volex: a deterministic multi-robot 3-D exploration simulator.

A team of camera-carrying robots explores a voxelized volume. The library
provides the voxel world and belief machinery, exact and sampled coverage
objectives with submodular structure, tree-search planners with sequential
and randomized-partition coordination, a-posteriori suboptimality
certificates, a fully seeded simulation loop, and randomized verification
suites for the underlying math.
"""

from .bounds import BoundReport, best_ratio_series, certificate
from .errors import (ConfigurationError, DimensionMismatchError,
                     EnumerationLimitError, MalformedHeaderError,
                     ObservationConflictError, PayloadSizeError,
                     PlannerIntegrityError, VolexError, VoxelFormatError)
from .grid import (FREE, OCCUPIED, UNKNOWN, BeliefMap, GroundTruthEnvironment,
                   VoxelGrid3, environment_hash, generate_boxes,
                   generate_empty, load_environment, sample_environment,
                   save_environment)
from .objectives import (Assignment, DistanceRewardConfig,
                         ExactExpectationEvaluator, ObjectiveSpec,
                         PlanningObjective, TrajectoryAction, covered_cells,
                         distance_field, distance_reward,
                         enumerated_expected_coverage, expected_coverage,
                         noiseless_mutual_information, ray_sum_information,
                         sample_informative_views, weight_array)
from .planners import (PlannerConfig, apply_dynamics, brute_force_assignment,
                       control_set, greedy_over_menus, idle_action, is_safe,
                       mcts_plan, myopic_plan, rollout_action, rsp_plan,
                       sequential_greedy)
from .sensing import (CameraModel, Observation, RobotState, camera_visible_set,
                      cast_ray, fuse_observation, observe)
from .simulator import (ExperimentConfig, MetricsRecord, RunResult, Simulation,
                        build_environment, build_manifest,
                        environment_coverage, exploration_volume,
                        read_metrics_csv, run_experiment, write_manifest,
                        write_metrics_csv)
from .verify import SUITES, SuiteResult, run_suites

__version__ = "0.1.0"