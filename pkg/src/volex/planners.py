"""Trajectory planning: dynamics, safety, tree search, and coordination.

Robots move by fixed-length body-frame translations and quarter-turn yaw
steps. Per-robot planning is UCT tree search over the safe control
sequences of a fixed horizon; multi-robot coordination wraps that search
myopically, sequentially, or in randomized sequential partitions. All
randomness is seeded, and robots planning within the same round never read
each other's results, so threaded and serial planning are bit-identical.
"""

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import FREE
from .objectives import Assignment, TrajectoryAction
from .seeding import DOMAIN_ROUNDS, derive_rng, derive_seed
from .sensing import _YAW_COS, _YAW_SIN, RobotState, max_ray_steps

# Control ids. Tuple order below doubles as the deterministic tie-break
# order for tree expansion and final action extraction.
FORWARD, BACK, LEFT, RIGHT, UP, DOWN, YAW_LEFT, YAW_RIGHT = range(8)

TRANSLATION_STEP = 0.3

CONTROL_NAMES = {
    FORWARD: "forward", BACK: "back", LEFT: "left", RIGHT: "right",
    UP: "up", DOWN: "down", YAW_LEFT: "yaw+", YAW_RIGHT: "yaw-",
}

_BODY_OFFSET = {
    FORWARD: (TRANSLATION_STEP, 0.0, 0.0),
    BACK: (-TRANSLATION_STEP, 0.0, 0.0),
    LEFT: (0.0, TRANSLATION_STEP, 0.0),
    RIGHT: (0.0, -TRANSLATION_STEP, 0.0),
    UP: (0.0, 0.0, TRANSLATION_STEP),
    DOWN: (0.0, 0.0, -TRANSLATION_STEP),
}


def control_set(include_lateral=False):
    """The planning control set; laterals are off by default."""
    if include_lateral:
        return (FORWARD, BACK, LEFT, RIGHT, UP, DOWN, YAW_LEFT, YAW_RIGHT)
    return (FORWARD, BACK, UP, DOWN, YAW_LEFT, YAW_RIGHT)


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int = 10
    mcts_samples: int = 200
    exploration_weight: float = 1500.0
    rsp_rounds: int = 3
    include_lateral: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.mcts_samples < 1:
            raise ValueError("mcts_samples must be at least 1")
        if self.rsp_rounds < 1:
            raise ValueError("rsp_rounds must be at least 1")


def apply_dynamics(state, control):
    """Deterministic one-step motion model.

    Yaw steps rotate the heading a quarter turn in place; translations move
    the body-frame offset rotated into the world frame. Quarter-turn trig
    is exact, so rotated offsets carry no rounding error.
    """
    if control == YAW_LEFT:
        return RobotState(state.position, state.yaw_index + 1)
    if control == YAW_RIGHT:
        return RobotState(state.position, state.yaw_index - 1)
    bx, by, bz = _BODY_OFFSET[control]
    c = _YAW_COS[state.yaw_index]
    s = _YAW_SIN[state.yaw_index]
    x, y, z = state.position
    return RobotState((x + c * bx - s * by, y + s * bx + c * by, z + bz),
                      state.yaw_index)


def rollout_action(robot, start, controls):
    """Build a trajectory by applying a control sequence from a start state."""
    states = [start]
    for control in controls:
        states.append(apply_dynamics(states[-1], control))
    return TrajectoryAction(robot, tuple(controls), tuple(states))


def idle_action(robot, start, horizon):
    """Stay in place, spinning: always safe inside known-free space."""
    return rollout_action(robot, start, (YAW_LEFT,) * horizon)


def swept_cells(grid, a, b):
    """Cells swept by the straight segment from position a to position b.

    Returns ``(cells, inside)``; ``inside`` is False when the segment is
    not fully contained in the grid.
    """
    out = np.empty(max_ray_steps(TRANSLATION_STEP + grid.resolution,
                                 grid.resolution), dtype=np.int64)
    nx, ny, nz = grid.dims
    n, inside = _kernels.segment_sweep(
        nx, ny, nz, grid.resolution,
        float(a[0]), float(a[1]), float(a[2]),
        float(b[0]), float(b[1]), float(b[2]), out)
    return out[:n], bool(inside)


def _segment_safe(belief, a, b):
    cells, inside = swept_cells(belief.grid, a, b)
    if not inside:
        return False
    return bool((belief.cells[cells] == FREE).all())


def is_safe(action, belief):
    """A trajectory is safe iff every motion segment stays inside the grid
    and sweeps only known-free cells."""
    states = action.states
    for prev, nxt in zip(states[:-1], states[1:]):
        if not _segment_safe(belief, prev.position, nxt.position):
            return False
    return True


class _Node:
    __slots__ = ("state", "depth", "untried", "children", "visits", "total")

    def __init__(self, state, depth):
        self.state = state
        self.depth = depth
        self.untried = None  # safe controls not yet expanded (lazy)
        self.children = []   # list of (control, _Node)
        self.visits = 0
        self.total = 0.0


def mcts_plan(robot, start, belief, conditioning, objective, cfg, seed):
    """UCT search for one robot's best trajectory given others' choices.

    Rewards are the raw marginal gain of the full horizon-length trajectory
    on top of ``conditioning``; node scores add the usual exploration bonus
    ``exploration_weight * sqrt(2 ln N / n)``. Rollouts pick uniformly among
    safe controls. The returned trajectory follows the most-visited child
    chain, with unvisited branches resolved in fixed control order. When no
    sampled trajectory gained anything (or the root has no safe control),
    the robot stays in place and spins.
    """
    horizon = cfg.horizon
    controls = control_set(cfg.include_lateral)
    safe_cache = {}

    def safe_from(state):
        key = (round(state.position[0], 6), round(state.position[1], 6),
               round(state.position[2], 6), state.yaw_index)
        hit = safe_cache.get(key)
        if hit is None:
            hit = tuple(
                c for c in controls
                if _segment_safe(belief, state.position,
                                 apply_dynamics(state, c).position)
            )
            safe_cache[key] = hit
        return hit

    if not safe_from(start):
        return idle_action(robot, start, horizon)

    cond = objective.conditioned(conditioning, robot=robot)
    rng = random.Random(seed)
    root = _Node(start, 0)

    for _ in range(cfg.mcts_samples):
        node = root
        path = [root]
        chosen = []
        while node.depth < horizon:
            if node.untried is None:
                node.untried = list(safe_from(node.state))
            if node.untried:
                control = node.untried.pop(0)
                child = _Node(apply_dynamics(node.state, control), node.depth + 1)
                node.children.append((control, child))
                chosen.append(control)
                path.append(child)
                node = child
                break
            if not node.children:
                break
            log_n = math.log(node.visits)
            best_score = -math.inf
            best = None
            for control, child in node.children:
                score = (child.total / child.visits
                         + cfg.exploration_weight
                         * math.sqrt(2.0 * log_n / child.visits))
                if score > best_score:
                    best_score = score
                    best = (control, child)
            chosen.append(best[0])
            node = best[1]
            path.append(node)

        state = node.state
        depth = node.depth
        tail = []
        while depth < horizon:
            options = safe_from(state)
            if not options:
                break
            control = options[rng.randrange(len(options))]
            state = apply_dynamics(state, control)
            tail.append(control)
            depth += 1
        trajectory = rollout_action(robot, start, tuple(chosen + tail))
        reward = cond.marginal(trajectory)
        for visited in path:
            visited.visits += 1
            visited.total += reward

    if not root.children:
        return idle_action(robot, start, horizon)
    best_mean = max(child.total / child.visits for _, child in root.children)
    if best_mean <= 1e-12:
        return idle_action(robot, start, horizon)

    # Follow the most-visited chain (visit ties broken by mean reward, then
    # control order); pad with the first safe control where the tree runs out.
    node = root
    state = start
    sequence = []
    while len(sequence) < horizon:
        if node is not None and node.children:
            control, nxt = max(
                node.children,
                key=lambda item: (item[1].visits,
                                  item[1].total / item[1].visits))
            node = nxt
        else:
            node = None
            options = safe_from(state)
            if not options:
                break
            control = options[0]
        sequence.append(control)
        state = apply_dynamics(state, control)
    if len(sequence) < horizon:
        return idle_action(robot, start, horizon)
    return rollout_action(robot, start, tuple(sequence))


def _plan_group(group, robots, belief, conditioning, objective, cfg, seed):
    """Plan several robots against the same conditioning, maybe threaded.

    Each robot's search depends only on its own seed and the shared frozen
    inputs, so the thread count cannot change any result.
    """
    if cfg.threads > 1 and len(group) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            futures = [
                pool.submit(mcts_plan, rid, robots[rid], belief, conditioning,
                            objective, cfg, derive_seed(seed, rid))
                for rid in group
            ]
            return [f.result() for f in futures]
    return [
        mcts_plan(rid, robots[rid], belief, conditioning, objective, cfg,
                  derive_seed(seed, rid))
        for rid in group
    ]


def myopic_plan(robots, belief, objective, cfg, seed):
    """Every robot plans as if alone (conditioning on nothing)."""
    order = sorted(robots)
    empty = Assignment()
    return Assignment(_plan_group(order, robots, belief, empty, objective,
                                  cfg, seed))


def sequential_greedy(robots, belief, objective, cfg, seed, order=None):
    """Robots plan one at a time, each conditioned on all earlier choices."""
    if order is None:
        order = sorted(robots)
    chosen = Assignment()
    for rid in order:
        action = mcts_plan(rid, robots[rid], belief, chosen, objective, cfg,
                           derive_seed(seed, rid))
        chosen = chosen.with_action(action)
    return chosen


def rsp_plan(robots, belief, objective, cfg, seed):
    """Randomized sequential partitions.

    Every robot draws one of ``cfg.rsp_rounds`` rounds uniformly. Rounds run
    in order; robots in a round plan in parallel, conditioned only on the
    decisions of strictly earlier rounds. One round reduces to the myopic
    planner; all-distinct rounds reduce to sequential planning in round
    order.
    """
    order = sorted(robots)
    draw_rng = derive_rng(seed, DOMAIN_ROUNDS)
    draws = draw_rng.integers(1, cfg.rsp_rounds + 1, size=len(order))
    chosen = Assignment()
    for round_no in range(1, cfg.rsp_rounds + 1):
        group = [rid for rid, d in zip(order, draws) if d == round_no]
        if not group:
            continue
        for action in _plan_group(group, robots, belief, chosen, objective,
                                  cfg, seed):
            chosen = chosen.with_action(action)
    return chosen


def rsp_round_draws(robots, cfg, seed):
    """The round each robot would draw in ``rsp_plan`` (for analysis/tests)."""
    order = sorted(robots)
    draw_rng = derive_rng(seed, DOMAIN_ROUNDS)
    draws = draw_rng.integers(1, cfg.rsp_rounds + 1, size=len(order))
    return dict(zip(order, (int(d) for d in draws)))


# --------------------------------------------------------------------------
# Exhaustive planning over explicit menus (small instances, oracles, bounds)
# --------------------------------------------------------------------------

def best_menu_action(menu, objective, base):
    """Exhaustive argmax of marginal gain over a menu; ties keep the first."""
    best = None
    best_gain = -math.inf
    for action in menu:
        gain = objective.marginal(action, base)
        if gain > best_gain:
            best_gain = gain
            best = action
    return best, best_gain


def greedy_over_menus(menus, objective, order=None):
    """Sequential greedy with exact per-robot maximization over menus."""
    if order is None:
        order = sorted(menus)
    chosen = Assignment()
    for rid in order:
        action, _gain = best_menu_action(menus[rid], objective, chosen)
        if action is not None:
            chosen = chosen.with_action(action)
    return chosen


def brute_force_assignment(menus, objective):
    """The true best joint assignment by full enumeration (tiny menus only)."""
    order = sorted(menus)
    best = Assignment()
    best_value = objective.value(best)

    def recurse(idx, current):
        nonlocal best, best_value
        if idx == len(order):
            value = objective.value(current)
            if value > best_value + 1e-15:
                best, best_value = current, value
            return
        for action in menus[order[idx]]:
            recurse(idx + 1, current.with_action(action))

    recurse(0, Assignment())
    return best, best_value