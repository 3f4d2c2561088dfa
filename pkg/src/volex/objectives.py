"""Exploration objectives over candidate trajectories.

The central quantity is expected discounted weighted coverage: which cells
would the cameras observe along planned trajectories, weighted per cell and
averaged over worlds consistent with the belief. A cell first coverable at
trajectory step ``l`` contributes ``weight * discount**l``, with the earliest
step taken across all selected trajectories, so the objective is a weighted
coverage function (normalized, monotone, submodular) in the set of selected
trajectories.

Worlds enter in one of three ways:

* optimistic - unknown cells are assumed free (a single degenerate world);
* Monte Carlo - average over worlds drawn from the belief prior;
* exact enumeration - sum over all instantiations of the unknown cells a
  query can reach (used by oracles and verification suites).

``noiseless_mutual_information`` computes the information between the map
and future measurements by direct enumeration of posterior entropies; for
independent-cell beliefs it coincides with entropy-weighted expected
coverage, which the test suites exercise. ``ray_sum_information`` is the
per-ray independent baseline: the same expectation taken one camera ray at
a time, double-counting overlap.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EnumerationLimitError
from .grid import FREE, OCCUPIED, UNKNOWN, sample_environment
from .seeding import DOMAIN_SAMPLES, seed_sequence
from .sensing import RobotState, _ray_table, max_ray_steps, visible_set_on_occupancy

WEIGHT_UNIT = "unit"
WEIGHT_ENTROPY = "entropy"
WEIGHT_SCALED_ENTROPY = "scaled-entropy"
WEIGHTINGS = (WEIGHT_UNIT, WEIGHT_ENTROPY, WEIGHT_SCALED_ENTROPY)

ENV_OPTIMISTIC = "optimistic"
ENV_MONTE_CARLO = "monte-carlo"
ENV_MODES = (ENV_OPTIMISTIC, ENV_MONTE_CARLO)

# Sentinel step for "cell not covered"; trajectories are far shorter.
_NO_STEP = 255


def binary_entropy(p):
    """Entropy of a Bernoulli(p) cell in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to reward and under which worlds to evaluate it.

    ``weighting`` sets the per-cell reward of newly observed cells; known
    cells always weigh zero. ``ray_sum_mode`` switches to the per-ray
    independent baseline, which ignores ``env_mode``.
    """

    weighting: str = WEIGHT_SCALED_ENTROPY
    env_mode: str = ENV_OPTIMISTIC
    mc_samples: int = 64
    mc_seed: int = 0
    discount: float = 1.0
    ray_sum_mode: bool = False

    def __post_init__(self):
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.env_mode not in ENV_MODES:
            raise ValueError(f"unknown env mode {self.env_mode!r}")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError(f"discount must be in (0, 1], got {self.discount}")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be positive")


@dataclass(frozen=True)
class DistanceRewardConfig:
    """Scale of the travel-toward-informative-views shaping term."""

    factor: float = 0.0


@dataclass(frozen=True)
class TrajectoryAction:
    """A control sequence for one robot together with the states it visits.

    ``states`` has one more entry than ``controls``; states[0] is where the
    robot currently is and only states[1:] contribute camera views.
    """

    robot: int
    controls: tuple
    states: tuple

    def __post_init__(self):
        if len(self.states) != len(self.controls) + 1:
            raise ValueError("need exactly one state per control plus the start")

    @property
    def future_states(self):
        return self.states[1:]

    def __len__(self):
        return len(self.controls)


class Assignment:
    """A set of trajectories with at most one per robot."""

    __slots__ = ("_by_robot",)

    def __init__(self, actions=()):
        by_robot = {}
        for action in actions:
            if action.robot in by_robot:
                raise ValueError(f"robot {action.robot} assigned twice")
            by_robot[action.robot] = action
        self._by_robot = dict(sorted(by_robot.items()))

    @property
    def actions(self):
        return tuple(self._by_robot.values())

    def robots(self):
        return tuple(self._by_robot.keys())

    def get(self, robot):
        return self._by_robot.get(robot)

    def with_action(self, action):
        if action.robot in self._by_robot:
            raise ValueError(f"robot {action.robot} already assigned")
        return Assignment(self.actions + (action,))

    def __iter__(self):
        return iter(self._by_robot.values())

    def __len__(self):
        return len(self._by_robot)

    def __eq__(self, other):
        return isinstance(other, Assignment) and self.actions == other.actions

    def __hash__(self):
        return hash(self.actions)

    def __repr__(self):
        return f"Assignment({list(self._by_robot)})"


def _as_actions(actions):
    if isinstance(actions, Assignment):
        return actions.actions
    if isinstance(actions, TrajectoryAction):
        return (actions,)
    return tuple(actions)


def weight_array(belief, weighting):
    """Per-cell reward weights. Known cells weigh zero under every scheme."""
    if isinstance(weighting, np.ndarray):
        return weighting.astype(np.float64, copy=False)
    unknown = belief.cells == UNKNOWN
    if weighting == WEIGHT_UNIT:
        per_cell = 1.0
    elif weighting == WEIGHT_ENTROPY:
        per_cell = binary_entropy(belief.occupancy_prior)
    elif weighting == WEIGHT_SCALED_ENTROPY:
        # Entropy normalized by the prior's entropy: exactly 1 per unknown
        # cell, with the degenerate-prior limit also defined as 1.
        per_cell = 1.0
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    return np.where(unknown, per_cell, 0.0)


def _discount_powers(discount):
    powers = discount ** np.arange(_NO_STEP + 1, dtype=np.float64)
    powers[_NO_STEP] = 0.0
    return powers


def covered_cells(actions, env, cam):
    """Union of camera footprints over all future states, as sorted ids."""
    actions = _as_actions(actions)
    sets = []
    for action in actions:
        for state in action.future_states:
            sets.append(visible_set_on_occupancy(
                state.position, state.yaw_index, env.occupancy, env.grid, cam))
    if not sets:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate(sets))


class PlanningObjective:
    """Evaluator of the combined exploration reward against a frozen belief.

    Built once per planning round; caches camera footprints per (world,
    state) so tree search can re-evaluate trajectories cheaply. The total
    reward of an assignment is expected discounted weighted coverage plus
    the per-robot distance shaping term.

    Monte-Carlo worlds are drawn lazily per (robot, query) from seeds
    derived from ``seed_ctx = (master_seed, iteration)``, so every candidate
    evaluated within one planning query sees the same worlds.
    """

    def __init__(self, belief, spec, cam, dist_factor=0.0, dist_field=None,
                 seed_ctx=(0, 0)):
        self.belief = belief
        self.spec = spec
        self.cam = cam
        self.grid = belief.grid
        self.dist_factor = float(dist_factor)
        self.dist_field = dist_field
        self.seed_ctx = tuple(seed_ctx)
        self.weights = weight_array(belief, spec.weighting)
        self.gamma_pow = _discount_powers(spec.discount)
        self._occ_optimistic = belief.known_occupancy()
        self._belief_cells = belief.cells
        self._worlds = {}      # (robot, query) -> list of occupancy arrays
        self._views = {}       # (world key, pos, yaw) -> visible ids
        self._ray_scalars = {} # (pos, yaw) -> per-ray-sum scalar
        self._minstep = np.full(self.grid.n_cells, _NO_STEP, dtype=np.uint8)

    # -- worlds ---------------------------------------------------------

    def _world_list(self, robot, query):
        if self.spec.env_mode == ENV_OPTIMISTIC:
            return ((-1, self._occ_optimistic),)
        key = (robot, query)
        worlds = self._worlds.get(key)
        if worlds is None:
            master, iteration = self.seed_ctx
            base = seed_sequence(master, DOMAIN_SAMPLES, iteration,
                                 robot + 1, query, self.spec.mc_seed)
            worlds = tuple(
                (key + (s,), sample_environment(self.belief, child).occupancy)
                for s, child in enumerate(base.spawn(self.spec.mc_samples))
            )
            self._worlds[key] = worlds
        return worlds

    # -- per-state footprints -------------------------------------------

    def _state_key(self, state):
        p = state.position
        return (round(p[0], 6), round(p[1], 6), round(p[2], 6), state.yaw_index)

    def _view(self, world_key, occ, state):
        key = (world_key, self._state_key(state))
        cells = self._views.get(key)
        if cells is None:
            cells = visible_set_on_occupancy(
                state.position, state.yaw_index, occ, self.grid, self.cam)
            self._views[key] = cells
        return cells

    def _step_views(self, actions, world_key, occ):
        """(step, cells) pairs for all future states, sorted by step."""
        pairs = []
        for action in actions:
            for step, state in enumerate(action.future_states, start=1):
                pairs.append((step, self._view(world_key, occ, state)))
        pairs.sort(key=lambda p: p[0])
        return pairs

    # -- ray-sum path ----------------------------------------------------

    def _ray_scalar(self, state):
        key = self._state_key(state)
        val = self._ray_scalars.get(key)
        if val is None:
            nx, ny, nz = self.grid.dims
            # Scratch is allocated per call so concurrent planner threads
            # never share it; duplicated cache fills are identical.
            scratch = np.empty(
                max_ray_steps(self.cam.max_range, self.grid.resolution),
                dtype=np.int64)
            val = _kernels.ray_chain_scalar(
                self._occ_optimistic, nx, ny, nz, self.grid.resolution,
                state.position[0], state.position[1], state.position[2],
                _ray_table(self.cam, state.yaw_index), self.cam.max_range,
                self._belief_cells, self.weights, self.belief.occupancy_prior,
                scratch,
            )
            self._ray_scalars[key] = val
        return val

    def _ray_sum_value(self, action):
        total = 0.0
        for step, state in enumerate(action.future_states, start=1):
            total += self.gamma_pow[step] * self._ray_scalar(state)
        return total

    # -- evaluation -------------------------------------------------------

    def distance_term(self, action):
        if self.dist_factor <= 0.0 or self.dist_field is None:
            return 0.0
        return distance_reward(action, self.dist_field, self.dist_factor)

    def _coverage_value(self, actions, robot, query):
        total = 0.0
        worlds = self._world_list(robot, query)
        minstep = self._minstep
        weights = self.weights
        gamma = self.gamma_pow
        for world_key, occ in worlds:
            value = 0.0
            touched = []
            for step, cells in self._step_views(actions, world_key, occ):
                fresh = cells[minstep[cells] == _NO_STEP]
                if fresh.size:
                    minstep[fresh] = step
                    touched.append(fresh)
                    value += gamma[step] * weights[fresh].sum()
            for fresh in touched:
                minstep[fresh] = _NO_STEP
            total += value
        return total / len(worlds)

    def value(self, actions, robot=-1, query=0):
        """Combined reward of a set of trajectories."""
        actions = _as_actions(actions)
        if self.spec.ray_sum_mode:
            coverage = sum(self._ray_sum_value(a) for a in actions)
        else:
            coverage = self._coverage_value(actions, robot, query)
        return coverage + sum(self.distance_term(a) for a in actions)

    def conditioned(self, base_actions, robot=-1, query=0):
        """Marginal-gain evaluator against a fixed set of already-chosen
        trajectories; used by per-robot search."""
        return _ConditionedObjective(self, _as_actions(base_actions), robot, query)

    def marginal(self, action, base_actions, robot=-1, query=0):
        """One-off marginal gain; prefer :meth:`conditioned` in loops."""
        return self.conditioned(base_actions, robot, query).marginal(action)

    def single_view_coverage(self, state):
        """Optimistic count of unknown cells one camera view would observe."""
        cells = self._view(-1, self._occ_optimistic, state)
        return int(np.count_nonzero(self._belief_cells[cells] == UNKNOWN))


class _ConditionedObjective:
    """Marginal gains f(a | base) with the base coverage precomputed."""

    def __init__(self, parent, base_actions, robot, query):
        self.parent = parent
        self.base_actions = base_actions
        self.robot = robot
        self.query = query
        if not parent.spec.ray_sum_mode:
            self._base = []
            for world_key, occ in parent._world_list(robot, query):
                minstep = np.full(parent.grid.n_cells, _NO_STEP, dtype=np.uint8)
                for step, cells in parent._step_views(base_actions, world_key, occ):
                    sel = cells[minstep[cells] == _NO_STEP]
                    minstep[sel] = step
                self._base.append((world_key, occ, minstep))

    def marginal(self, action):
        parent = self.parent
        if parent.spec.ray_sum_mode:
            gain = parent._ray_sum_value(action)
        else:
            gamma = parent.gamma_pow
            weights = parent.weights
            gain = 0.0
            for world_key, occ, base_minstep in self._base:
                step_views = [
                    (step, parent._view(world_key, occ, state))
                    for step, state in enumerate(action.future_states, start=1)
                ]
                overlay = None
                for step, cells in step_views:
                    ref = base_minstep if overlay is None else overlay
                    prev = ref[cells]
                    better = prev > step
                    if better.any():
                        idx = cells[better]
                        gain += (gamma[step] - gamma[prev[better]]) @ weights[idx]
                        if overlay is None:
                            overlay = base_minstep.copy()
                        overlay[idx] = step
            gain /= len(self._base)
        return gain + parent.distance_term(action)


def expected_coverage(actions, belief, spec, cam):
    """Expected discounted weighted coverage of a set of trajectories."""
    return PlanningObjective(belief, spec, cam).value(actions)


def combined_objective(actions, belief, spec, cam, distance_cfg=None, dist_field=None):
    """Coverage reward plus the per-robot distance shaping term."""
    factor = distance_cfg.factor if distance_cfg is not None else 0.0
    return PlanningObjective(belief, spec, cam, factor, dist_field).value(actions)


# --------------------------------------------------------------------------
# Exact expectation by enumeration
# --------------------------------------------------------------------------

class ExactExpectationEvaluator:
    """Exact expected discounted weighted coverage over a fixed action set.

    The candidate trajectories' camera rays are traced once with unknown
    cells transparent; every unknown cell any ray can touch becomes an
    enumeration bit. Values are then exact sums over all 2**bits worlds.
    Only feasible for small queries; raises EnumerationLimitError beyond
    ``limit`` bits.
    """

    def __init__(self, belief, cam, actions, weighting=WEIGHT_UNIT,
                 discount=1.0, limit=20, bonuses=None):
        self.belief = belief
        self.cam = cam
        self.actions = tuple(actions)
        self._index = {a: i for i, a in enumerate(self.actions)}
        self.weights = weight_array(belief, weighting)
        self.gamma_pow = _discount_powers(discount)
        self.bonuses = dict(bonuses or {})

        grid = belief.grid
        occ = belief.known_occupancy()
        nx, ny, nz = grid.dims
        scratch = np.empty(max_ray_steps(cam.max_range, grid.resolution),
                           dtype=np.int64)
        cells_parts = []
        offsets = [0]
        steps = []
        owners = []
        for aid, action in enumerate(self.actions):
            for step, state in enumerate(action.future_states, start=1):
                if not grid.contains_point(state.position):
                    raise ValueError(
                        f"trajectory state {state.position} outside grid")
                dirs = _ray_table(cam, state.yaw_index)
                for r in range(dirs.shape[0]):
                    n, _hit = _kernels.walk_ray(
                        occ, nx, ny, nz, grid.resolution,
                        state.position[0], state.position[1], state.position[2],
                        dirs[r, 0], dirs[r, 1], dirs[r, 2], cam.max_range,
                        scratch)
                    cells_parts.append(scratch[:n].copy())
                    offsets.append(offsets[-1] + n)
                    steps.append(step)
                    owners.append(aid)

        self._ray_cells = (np.concatenate(cells_parts) if cells_parts
                           else np.empty(0, dtype=np.int64))
        self._ray_offsets = np.asarray(offsets, dtype=np.int64)
        self._ray_step = np.asarray(steps, dtype=np.int64)
        self._ray_owner = np.asarray(owners, dtype=np.int64)

        cell_bit = np.full(grid.n_cells, -1, dtype=np.int64)
        cell_bit[belief.cells == OCCUPIED] = -2
        touched_unknown = np.unique(self._ray_cells[
            belief.cells[self._ray_cells] == UNKNOWN]) if self._ray_cells.size else []
        self.enumerated_cells = np.asarray(touched_unknown, dtype=np.int64)
        if self.enumerated_cells.size > limit:
            raise EnumerationLimitError(
                f"query reaches {self.enumerated_cells.size} unknown cells, "
                f"limit is {limit}")
        for b, f in enumerate(self.enumerated_cells):
            cell_bit[f] = b
        self._cell_bit = cell_bit
        self._n_bits = int(self.enumerated_cells.size)
        self._minstep = np.full(grid.n_cells, _kernels.NO_STEP, dtype=np.int64)
        self._touch = np.empty(grid.n_cells, dtype=np.int64)

    def _mask(self, actions):
        mask = np.zeros(max(len(self.actions), 1), dtype=np.uint8)
        for a in _as_actions(actions):
            mask[self._index[a]] = 1
        return mask

    def value(self, actions):
        actions = _as_actions(actions)
        total = _kernels.enum_expectation(
            self._ray_cells, self._ray_offsets, self._ray_step,
            self._ray_owner, self._mask(actions), self._cell_bit,
            self.weights, self._n_bits, self.belief.occupancy_prior,
            self.gamma_pow, self._minstep, self._touch)
        return total + sum(self.bonuses.get(a, 0.0) for a in actions)

    def marginal(self, action, base):
        base = _as_actions(base)
        return self.value(base + (action,)) - self.value(base)

    def conditioned(self, base_actions):
        """Protocol shim matching :meth:`PlanningObjective.conditioned`."""
        return _FrozenBaseMarginal(self, _as_actions(base_actions))

    def sampled_value(self, actions, n_samples, seed):
        """Monte-Carlo counterpart over the same enumerated cells."""
        rng = np.random.default_rng(seed)
        worlds = (rng.random((n_samples, max(self._n_bits, 1)))
                  < self.belief.occupancy_prior).astype(np.uint8)
        actions = _as_actions(actions)
        total = _kernels.sampled_expectation(
            self._ray_cells, self._ray_offsets, self._ray_step,
            self._ray_owner, self._mask(actions), self._cell_bit,
            self.weights, worlds, self.gamma_pow, self._minstep, self._touch)
        return total + sum(self.bonuses.get(a, 0.0) for a in actions)


class _FrozenBaseMarginal:
    __slots__ = ("evaluator", "base", "base_value")

    def __init__(self, evaluator, base):
        self.evaluator = evaluator
        self.base = base
        self.base_value = evaluator.value(base)

    def marginal(self, action):
        return self.evaluator.value(self.base + (action,)) - self.base_value


def enumerated_expected_coverage(actions, belief, cam, weighting=WEIGHT_UNIT,
                                 discount=1.0, limit=20):
    """Exact expected discounted weighted coverage (enumeration, no sampling)."""
    actions = _as_actions(actions)
    ev = ExactExpectationEvaluator(belief, cam, actions, weighting, discount, limit)
    return ev.value(actions)


def noiseless_mutual_information(actions, belief, cam, limit=20):
    """Information (bits) future measurements carry about the map.

    Computed from first principles as prior entropy minus expected posterior
    entropy: enumerate every instantiation of the unknown cells the views
    can reach, take the camera footprints in that world, and total the
    entropy of the unknown cells left unobserved. Cells no ray can ever
    reach cancel out and are skipped.
    """
    actions = _as_actions(actions)
    grid = belief.grid
    occ_opt = belief.known_occupancy()
    states = [s for a in actions for s in a.future_states]
    reach_sets = [
        visible_set_on_occupancy(s.position, s.yaw_index, occ_opt, grid, cam)
        for s in states
    ]
    reachable = (np.unique(np.concatenate(reach_sets)) if reach_sets
                 else np.empty(0, dtype=np.int64))
    cells = reachable[belief.cells[reachable] == UNKNOWN]
    u = int(cells.size)
    if u > limit:
        raise EnumerationLimitError(
            f"views reach {u} unknown cells, limit is {limit}")
    h_cell = binary_entropy(belief.occupancy_prior)
    if u == 0 or h_cell == 0.0:
        return 0.0

    p = belief.occupancy_prior
    is_enum = np.zeros(grid.n_cells, dtype=bool)
    is_enum[cells] = True
    expected_posterior = 0.0
    for world in range(1 << u):
        bits = (world >> np.arange(u)) & 1
        prob = float(np.prod(np.where(bits, p, 1.0 - p)))
        occ = occ_opt.copy()
        occ[cells[bits == 1]] = 1
        observed_sets = [
            visible_set_on_occupancy(s.position, s.yaw_index, occ, grid, cam)
            for s in states
        ]
        observed = np.unique(np.concatenate(observed_sets))
        n_seen = int(np.count_nonzero(is_enum[observed]))
        expected_posterior += prob * (u - n_seen) * h_cell
    return u * h_cell - expected_posterior


def ray_sum_information(actions, belief, spec, cam):
    """Per-ray independent expected weighted coverage, summed over all rays.

    Every camera ray of every future view is scored on its own: a cell
    contributes its weight times the probability the ray reaches it under
    the belief prior, so cells shared between rays or views are counted
    multiple times. This upper-bounds the joint expected coverage under the
    same weighting. ``spec.env_mode`` plays no role; the per-ray expectation
    is always exact.
    """
    actions = _as_actions(actions)
    grid = belief.grid
    occ = belief.known_occupancy()
    nx, ny, nz = grid.dims
    weights = weight_array(belief, spec.weighting)
    gamma_pow = _discount_powers(spec.discount)
    scratch = np.empty(max_ray_steps(cam.max_range, grid.resolution), dtype=np.int64)
    total = 0.0
    for action in actions:
        for step, state in enumerate(action.future_states, start=1):
            total += gamma_pow[step] * _kernels.ray_chain_scalar(
                occ, nx, ny, nz, grid.resolution,
                state.position[0], state.position[1], state.position[2],
                _ray_table(cam, state.yaw_index), cam.max_range,
                belief.cells, weights, belief.occupancy_prior, scratch)
    return total


# --------------------------------------------------------------------------
# Distance shaping
# --------------------------------------------------------------------------

@dataclass
class DistanceField:
    """Geodesic meters to the nearest goal view through known-free space."""

    grid: object
    meters: np.ndarray

    def at_state(self, state):
        if not self.grid.contains_point(state.position):
            return np.inf
        return float(self.meters[self.grid.index(
            *self.grid.world_to_cell(state.position))])


def distance_field(belief, goal_states):
    """Multi-source BFS over the 6-connected known-free lattice.

    Distances are hop counts times the cell size; +inf where unreachable,
    not known free, or when there are no goals at all.
    """
    grid = belief.grid
    meters = np.full(grid.n_cells, np.inf)
    if goal_states:
        free = belief.known_free_mask()
        sources = np.unique(np.asarray(
            [grid.index(*grid.world_to_cell(s.position)) for s in goal_states],
            dtype=np.int64))
        hops = np.empty(grid.n_cells, dtype=np.int32)
        queue = np.empty(grid.n_cells, dtype=np.int64)
        nx, ny, nz = grid.dims
        _kernels.bfs_hops(free, nx, ny, nz, sources, hops, queue)
        reached = hops >= 0
        meters[reached] = hops[reached] * grid.resolution
    return DistanceField(grid, meters)


def distance_reward(action, field, factor):
    """Reward for moving toward the nearest informative view.

    Normalized progress along the distance field: 0 when the trajectory
    gets no closer, ``factor`` when it ends on a goal cell. Zero whenever
    the start is off the field or no goal is reachable.
    """
    if factor <= 0.0 or field is None:
        return 0.0
    d0 = field.at_state(action.states[0])
    if not np.isfinite(d0):
        return 0.0
    d_best = min(field.at_state(s) for s in action.future_states)
    if not np.isfinite(d_best):
        return 0.0
    progress = max(0.0, d0 - d_best)
    return factor * progress / max(d0, field.grid.resolution)


def sample_informative_views(belief, cam, sample_count, min_coverage, seed):
    """Candidate camera poses worth traveling to.

    Draws ``sample_count`` (cell center, heading) poses uniformly over the
    known-free cells and keeps those whose single optimistic view would
    observe at least ``min_coverage`` unknown cells. Deterministic in
    ``seed``; duplicates are dropped.
    """
    grid = belief.grid
    free = np.flatnonzero(belief.cells == FREE)
    if free.size == 0 or sample_count <= 0:
        return []
    rng = np.random.default_rng(seed)
    picks = free[rng.integers(0, free.size, size=sample_count)]
    yaws = rng.integers(0, 4, size=sample_count)
    occ_opt = belief.known_occupancy()
    kept = []
    seen = set()
    for flat, yaw in zip(picks, yaws):
        key = (int(flat), int(yaw))
        if key in seen:
            continue
        seen.add(key)
        state = RobotState(grid.cell_center(*grid.unflatten(int(flat))), int(yaw))
        cells = visible_set_on_occupancy(state.position, state.yaw_index,
                                         occ_opt, grid, cam)
        if int(np.count_nonzero(belief.cells[cells] == UNKNOWN)) >= min_coverage:
            kept.append(state)
    return kept
