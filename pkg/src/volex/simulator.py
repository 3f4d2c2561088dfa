"""Receding-horizon exploration loop.

Each iteration freezes the shared belief, refreshes the informative-view
goals and their distance field, lets the coordinator commit one trajectory
per robot, executes only the first control of each, takes a camera
measurement from every new pose, and fuses the results. Everything is
deterministic in the master seed: environment generation, start placement,
view sampling, Monte-Carlo worlds, and planner rollouts each draw from
their own derived seed stream.
"""

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .bounds import BoundReport, certificate
from .errors import ConfigurationError, PlannerIntegrityError
from .grid import (BeliefMap, environment_hash, generate_boxes,
                   generate_empty, load_environment)
from .objectives import (ObjectiveSpec, PlanningObjective, distance_field,
                         sample_informative_views)
from .planners import (PlannerConfig, control_set, idle_action, is_safe,
                       mcts_plan, myopic_plan, rollout_action, rsp_plan,
                       sequential_greedy)
from .seeding import (DOMAIN_ENVIRONMENT, DOMAIN_PLAN, DOMAIN_START,
                      DOMAIN_VIEWS, derive_rng, derive_seed)
from .sensing import (CameraModel, RobotState, _ray_table, fuse_observation,
                      max_ray_steps, observe)

ENV_KINDS = ("empty", "boxes", "file")
COORDINATORS = ("myopic", "sequential", "rsp")
BOUNDS_MODES = ("none", "mcts", "exhaustive")

CSV_HEADER = ("iter,robot_iters,covered_cells,coverage_m3,objective_value,"
              "online_bound,oblivious_bound,online_ratio,oblivious_ratio,"
              "best_ratio,plan_wall_ms")

# Tag mixed into per-robot seeds for bound-certificate searches so they stay
# decoupled from the coordinator's own searches.
_BOUND_SEED_TAG = 101


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one exploration run."""

    extent: tuple = (4.0, 4.0, 2.0)
    resolution: float = 0.1
    env_kind: str = "boxes"
    env_path: str = ""
    box_count: int = 8
    box_size_range: tuple = (0.3, 0.8)
    occupancy_prior: float = 0.125
    robot_count: int = 4
    start: tuple = ()          # empty -> extent center
    perturbation_radius: float = 0.5
    master_seed: int = 0
    coordinator: str = "sequential"
    planner: PlannerConfig = PlannerConfig()
    objective: ObjectiveSpec = ObjectiveSpec(discount=0.7)
    camera: CameraModel = CameraModel()
    dist_factor: float = 500.0
    view_threshold: float = 900.0
    view_samples: int = 64
    max_iterations: int = 400
    completion_fraction: float = 0.9
    bounds_mode: str = "none"
    zero_timing: bool = False

    def __post_init__(self):
        if self.env_kind not in ENV_KINDS:
            raise ConfigurationError(f"unknown env kind {self.env_kind!r}")
        if self.env_kind == "file" and not self.env_path:
            raise ConfigurationError("env kind 'file' needs env_path")
        if self.coordinator not in COORDINATORS:
            raise ConfigurationError(
                f"unknown coordinator {self.coordinator!r}")
        if self.bounds_mode not in BOUNDS_MODES:
            raise ConfigurationError(f"unknown bounds mode {self.bounds_mode!r}")
        if self.robot_count < 1:
            raise ConfigurationError("robot_count must be at least 1")
        # 0 is allowed and means the run is trivially complete at start.
        if not 0.0 <= self.completion_fraction <= 1.0:
            raise ConfigurationError(
                f"completion_fraction must be in [0, 1], got "
                f"{self.completion_fraction}")
        if self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be non-negative")
        if self.perturbation_radius < 0.0:
            raise ConfigurationError("perturbation_radius must be >= 0")
        if self.env_kind != "file":
            if len(self.extent) != 3 or min(self.extent) <= 0.0:
                raise ConfigurationError(
                    f"extent must be three positive lengths, got {self.extent}")
            if self.resolution <= 0.0:
                raise ConfigurationError("resolution must be positive")

    @property
    def start_position(self):
        if self.start:
            return tuple(float(v) for v in self.start)
        return tuple(v / 2.0 for v in self.extent)


@dataclass(frozen=True)
class MetricsRecord:
    iteration: int
    robot_iterations: int
    covered_cells: int
    coverage_m3: float
    objective_value: float
    online_bound: float
    oblivious_bound: float
    online_ratio: float
    oblivious_ratio: float
    best_ratio: float
    plan_wall_ms: float


def build_environment(config):
    """Instantiate the ground truth the config describes."""
    if config.env_kind == "file":
        return load_environment(config.env_path)
    if config.env_kind == "empty":
        return generate_empty(config.extent, config.resolution)
    return generate_boxes(
        config.extent, config.resolution, config.box_count,
        config.box_size_range,
        derive_seed(config.master_seed, DOMAIN_ENVIRONMENT),
        start=config.start_position)


def environment_coverage(belief):
    """Cells observed so far; with noiseless fusion this is exactly the
    union of all executed camera footprints."""
    return belief.known_count


def exploration_volume(env, start_positions, cam):
    """Cells a robot team starting at ``start_positions`` could ever observe.

    Flood-fills free-space reachability from the starts (6-connected), then
    unions the camera footprints over every reachable free cell center and
    all four headings. This is the analytic ceiling that completion
    thresholds are measured against.
    """
    grid = env.grid
    if env.occupied_count == 0:
        return grid.n_cells  # all free, connected, and self-visible
    nx, ny, nz = grid.dims
    free = (env.occupancy == 0).astype(np.uint8)
    sources = np.unique(np.asarray(
        [grid.index(*grid.world_to_cell(p)) for p in start_positions],
        dtype=np.int64))
    hops = np.empty(grid.n_cells, dtype=np.int32)
    queue = np.empty(grid.n_cells, dtype=np.int64)
    _kernels.bfs_hops(free, nx, ny, nz, sources, hops, queue)
    reach = np.flatnonzero(hops >= 0)
    if reach.size == 0:
        return 0
    res = grid.resolution
    centers = np.empty((reach.size, 3), dtype=np.float64)
    centers[:, 0] = (reach % nx + 0.5) * res
    centers[:, 1] = (reach // nx % ny + 0.5) * res
    centers[:, 2] = (reach // (nx * ny) + 0.5) * res
    dirs = np.concatenate([_ray_table(cam, yaw) for yaw in range(4)])
    seen = np.zeros(grid.n_cells, dtype=np.uint8)
    _kernels.mark_observable(env.occupancy, nx, ny, nz, res, centers, dirs,
                             cam.max_range, max_ray_steps(cam.max_range, res),
                             seen)
    return int(np.count_nonzero(seen))


def initial_robot_states(config, env):
    """Perturbed start poses: position jittered inside a ball, heading
    uniform over the four yaws, rejected until the cell is actually free.

    Without an explicit start the team spawns at the center of the grid
    that was actually built, so file-backed worlds need no --extent.
    """
    grid = env.grid
    start = (config.start_position if config.start
             else tuple(d * grid.resolution / 2.0 for d in grid.dims))
    try:
        if env.occupancy[grid.index(*grid.world_to_cell(start))] != 0:
            raise ConfigurationError(f"start position {start} is occupied")
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    radius = config.perturbation_radius
    robots = {}
    for rid in range(config.robot_count):
        rng = derive_rng(config.master_seed, DOMAIN_START, rid)
        position = None
        for _ in range(1000):
            offset = rng.uniform(-radius, radius, size=3)
            if offset @ offset > radius * radius:
                continue
            candidate = (start[0] + offset[0], start[1] + offset[1],
                         start[2] + offset[2])
            if not grid.contains_point(candidate):
                continue
            if env.occupancy[grid.index(*grid.world_to_cell(candidate))] == 0:
                position = candidate
                break
        if position is None:
            raise ConfigurationError(
                f"no free start cell found near {start} for robot {rid}")
        robots[rid] = RobotState(position, int(rng.integers(4)))
    return robots


_COORDINATORS = {
    "myopic": myopic_plan,
    "sequential": sequential_greedy,
    "rsp": rsp_plan,
}


def _zero_record(iteration, robot_count, covered, cell_volume):
    return MetricsRecord(iteration, iteration * robot_count, covered,
                         covered * cell_volume, 0.0, 0.0, 0.0, 0.0, 0.0,
                         0.0, 0.0)


def enumerate_safe_sequences(robot, start, belief, cfg, limit=100_000):
    """Every safe control sequence of the full horizon, in control order.

    Exponential in the horizon; intended for tiny instances and exhaustive
    bound certificates only.
    """
    controls = control_set(cfg.include_lateral)
    results = []

    def extend(prefix, state):
        if len(results) > limit:
            raise ConfigurationError(
                f"more than {limit} safe sequences; exhaustive enumeration "
                "is only feasible for tiny horizons")
        if len(prefix) == cfg.horizon:
            results.append(rollout_action(robot, start, tuple(prefix)))
            return
        for control in controls:
            nxt = rollout_action(robot, state, (control,))
            if is_safe(nxt, belief):
                prefix.append(control)
                extend(prefix, nxt.states[1])
                prefix.pop()

    extend([], start)
    return results


class Simulation:
    """Mutable run state: one environment, one belief, one robot team."""

    def __init__(self, config, env=None):
        self.config = config
        self.env = build_environment(config) if env is None else env
        grid = self.env.grid
        self.belief = BeliefMap.unknown(grid.dims, grid.resolution,
                                        config.occupancy_prior)
        self.robots = initial_robot_states(config, self.env)
        self._cell_volume = grid.resolution ** 3
        for rid in sorted(self.robots):
            fuse_observation(self.belief,
                             observe(self.robots[rid], self.env, config.camera))
        self.explorable_cells = exploration_volume(
            self.env, [s.position for s in self.robots.values()],
            config.camera)
        self.records = [_zero_record(0, config.robot_count,
                                     environment_coverage(self.belief),
                                     self._cell_volume)]

    @property
    def iteration(self):
        return self.records[-1].iteration

    @property
    def covered_cells(self):
        return self.records[-1].covered_cells

    @property
    def completion_threshold(self):
        return self.config.completion_fraction * self.explorable_cells

    @property
    def completed(self):
        return self.covered_cells >= self.completion_threshold

    def _bound_report(self, assignment, objective, plan_seed):
        config = self.config
        if config.bounds_mode == "none":
            value = objective.value(assignment)
            return BoundReport(value, 0.0, 0.0, 0.0, 0.0, False)
        if config.bounds_mode == "exhaustive":
            menus = {
                rid: enumerate_safe_sequences(rid, self.robots[rid],
                                              self.belief, config.planner)
                for rid in sorted(self.robots)
            }
            return certificate(assignment, objective, menus=menus)

        def search(rid, conditioning):
            return mcts_plan(rid, self.robots[rid], self.belief, conditioning,
                             objective, config.planner,
                             derive_seed(plan_seed, rid, _BOUND_SEED_TAG))

        return certificate(assignment, objective, planner=search)

    def step(self):
        """One plan/execute/observe cycle; returns the appended record."""
        config = self.config
        iteration = self.iteration + 1
        belief = self.belief

        goals = sample_informative_views(
            belief, config.camera, config.view_samples, config.view_threshold,
            derive_seed(config.master_seed, DOMAIN_VIEWS, iteration))
        field = (distance_field(belief, goals)
                 if goals and config.dist_factor != 0.0 else None)
        objective = PlanningObjective(
            belief, config.objective, config.camera, config.dist_factor,
            field, seed_ctx=(config.master_seed, iteration))

        plan_seed = derive_seed(config.master_seed, DOMAIN_PLAN, iteration)
        coordinate = _COORDINATORS[config.coordinator]
        began = time.perf_counter()
        assignment = coordinate(self.robots, belief, objective,
                                config.planner, plan_seed)
        wall_ms = (time.perf_counter() - began) * 1e3

        # Vet every committed trajectory before evaluating anything on it:
        # coordinator output is untrusted until it passes the safety gate.
        committed = {}
        for rid in sorted(self.robots):
            action = assignment.get(rid)
            if action is None:
                action = idle_action(rid, self.robots[rid], config.planner.horizon)
            if not is_safe(action, belief):
                raise PlannerIntegrityError(
                    f"robot {rid} was committed an unsafe trajectory at "
                    f"iteration {iteration}")
            committed[rid] = action

        report = self._bound_report(assignment, objective, plan_seed)

        for rid in sorted(self.robots):
            self.robots[rid] = committed[rid].states[1]
        for rid in sorted(self.robots):
            fuse_observation(belief,
                             observe(self.robots[rid], self.env, config.camera))

        record = MetricsRecord(
            iteration=iteration,
            robot_iterations=iteration * config.robot_count,
            covered_cells=environment_coverage(belief),
            coverage_m3=environment_coverage(belief) * self._cell_volume,
            objective_value=report.value,
            online_bound=report.online_bound,
            oblivious_bound=report.oblivious_bound,
            online_ratio=report.online_ratio,
            oblivious_ratio=report.oblivious_ratio,
            best_ratio=report.best_ratio if config.bounds_mode != "none" else 0.0,
            plan_wall_ms=0.0 if config.zero_timing else wall_ms,
        )
        self.records.append(record)
        return record


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    records: tuple
    completed: bool
    completion_robot_iterations: int | None
    explorable_cells: int
    environment_hash: str

    @property
    def final_covered_cells(self):
        return self.records[-1].covered_cells


def run_experiment(config, env=None):
    """Run to completion or budget; returns the full metrics series."""
    sim = Simulation(config, env)
    while not sim.completed and sim.iteration < config.max_iterations:
        sim.step()
    threshold = sim.completion_threshold
    completion = next(
        (r.robot_iterations for r in sim.records
         if r.covered_cells >= threshold), None)
    return RunResult(
        config=config,
        records=tuple(sim.records),
        completed=sim.completed,
        completion_robot_iterations=completion,
        explorable_cells=sim.explorable_cells,
        environment_hash=environment_hash(sim.env),
    )


# --------------------------------------------------------------------------
# Serialization: CSV series + JSON manifest
# --------------------------------------------------------------------------

def _fmt(x):
    return repr(float(x))


def write_metrics_csv(records, path):
    """One row per iteration; floats keep full round-trip precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in records:
            writer.writerow([
                r.iteration, r.robot_iterations, r.covered_cells,
                _fmt(r.coverage_m3), _fmt(r.objective_value),
                _fmt(r.online_bound), _fmt(r.oblivious_bound),
                _fmt(r.online_ratio), _fmt(r.oblivious_ratio),
                _fmt(r.best_ratio), _fmt(r.plan_wall_ms),
            ])


def read_metrics_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise ConfigurationError(f"unexpected CSV header in {path}")
        for row in reader:
            records.append(MetricsRecord(
                iteration=int(row["iter"]),
                robot_iterations=int(row["robot_iters"]),
                covered_cells=int(row["covered_cells"]),
                coverage_m3=float(row["coverage_m3"]),
                objective_value=float(row["objective_value"]),
                online_bound=float(row["online_bound"]),
                oblivious_bound=float(row["oblivious_bound"]),
                online_ratio=float(row["online_ratio"]),
                oblivious_ratio=float(row["oblivious_ratio"]),
                best_ratio=float(row["best_ratio"]),
                plan_wall_ms=float(row["plan_wall_ms"]),
            ))
    return records


def config_to_dict(config):
    return asdict(config)


def config_from_dict(data):
    data = dict(data)
    planner = PlannerConfig(**data.pop("planner"))
    objective = ObjectiveSpec(**data.pop("objective"))
    camera_raw = dict(data.pop("camera"))
    camera = CameraModel(
        max_range=camera_raw["max_range"],
        resolution=tuple(camera_raw["resolution"]),
        fov_deg=tuple(camera_raw["fov_deg"]),
    )
    for key in ("extent", "box_size_range", "start"):
        data[key] = tuple(data[key])
    return ExperimentConfig(planner=planner, objective=objective,
                            camera=camera, **data)


def run_id_for(config):
    blob = json.dumps(config_to_dict(config), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_manifest(result, csv_path):
    """Everything needed to reproduce and audit the run, minus wall-clock."""
    return {
        "schema": "volex-run/1",
        "run_id": run_id_for(result.config),
        "config": config_to_dict(result.config),
        "environment_hash": result.environment_hash,
        "explorable_cells": result.explorable_cells,
        "metrics_csv": str(csv_path),
        "result": {
            "completed": result.completed,
            "completion_robot_iterations": result.completion_robot_iterations,
            "iterations": result.records[-1].iteration,
            "final_covered_cells": result.final_covered_cells,
        },
    }


def write_manifest(manifest, path):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path):
    with open(path) as fh:
        return json.load(fh)