"""Suboptimality certificates for committed multi-robot assignments.

Because the objective is normalized, monotone, and submodular, and each
robot contributes at most one trajectory, the optimum is bounded by

* online:    f(X) + sum_r max_a f(a | X)   (marginals on top of the result)
* oblivious: sum_r max_a f(a | empty)      (no coordination at all)

Dividing the achieved value by a bound certifies a fraction of optimal
without ever knowing the optimum. The per-robot maxima are exact when an
explicit menu of candidate trajectories is enumerated, and approximate
(flagged) when a search planner stands in for the maximization.
"""

import math
from dataclasses import dataclass

import numpy as np

from .objectives import Assignment


@dataclass(frozen=True)
class BoundReport:
    value: float
    online_bound: float
    oblivious_bound: float
    online_ratio: float
    oblivious_ratio: float
    exact: bool

    @property
    def best_ratio(self):
        return max(self.online_ratio, self.oblivious_ratio)


def _ratio(value, bound):
    # A zero bound certifies a zero optimum: anything achieves it.
    return value / bound if bound > 0.0 else 1.0


def certificate(assignment, objective, menus=None, planner=None):
    """Certify how close an assignment is to the (unknown) optimum.

    Supply either explicit per-robot candidate ``menus`` (exact per-robot
    maxima) or a ``planner(robot, conditioning)`` callable returning a
    trajectory (approximate maxima, result flagged ``exact=False``). Robots
    appearing in the assignment but missing from the menus/planner simply
    contribute no slack, matching a robot whose search found nothing.
    """
    if (menus is None) == (planner is None):
        raise ValueError("provide exactly one of menus or planner")

    value = objective.value(assignment)
    empty = Assignment()
    base_cond = objective.conditioned(assignment)
    empty_cond = objective.conditioned(empty)

    online = value
    oblivious = 0.0
    robots = sorted(menus) if menus is not None else sorted(
        a.robot for a in assignment)
    for rid in robots:
        if menus is not None:
            candidates = list(menus[rid])
        else:
            candidates = [planner(rid, assignment), planner(rid, empty)]
        best_online = 0.0
        best_oblivious = 0.0
        for action in candidates:
            if action is None:
                continue
            best_online = max(best_online, base_cond.marginal(action))
            best_oblivious = max(best_oblivious, empty_cond.marginal(action))
        online += best_online
        oblivious += best_oblivious

    return BoundReport(
        value=value,
        online_bound=online,
        oblivious_bound=oblivious,
        online_ratio=_ratio(value, online),
        oblivious_ratio=_ratio(value, oblivious),
        exact=menus is not None,
    )


def best_ratio_series(reports):
    """Mean and standard error of best ratios across repeated trials."""
    ratios = np.array([r.best_ratio for r in reports], dtype=np.float64)
    if ratios.size == 0:
        return math.nan, math.nan
    if ratios.size == 1:
        return float(ratios[0]), 0.0
    return (float(ratios.mean()),
            float(ratios.std(ddof=1) / math.sqrt(ratios.size)))