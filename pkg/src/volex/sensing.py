"""Depth-camera sensing: robot states, ray casting, visible sets, fusion.

Robot yaw is quantized to quarter turns and stored as an integer index so
that heading rotations are exact (the rotation matrix entries are exactly
0 and +-1). Camera rays are one per pixel center, spread uniformly in angle
across the field of view; the camera faces forward along the heading with
its long image axis mounted vertically.
"""

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ObservationConflictError
from .grid import FREE, OCCUPIED, UNKNOWN

# Exact quarter-turn cosines/sines indexed by yaw_index.
_YAW_COS = (1.0, 0.0, -1.0, 0.0)
_YAW_SIN = (0.0, 1.0, 0.0, -1.0)


@dataclass(frozen=True)
class RobotState:
    """Continuous position plus a quantized heading (yaw_index * pi/2)."""

    position: tuple
    yaw_index: int

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        object.__setattr__(self, "yaw_index", int(self.yaw_index) % 4)

    @property
    def yaw(self):
        return self.yaw_index * (math.pi / 2.0)


@dataclass(frozen=True)
class CameraModel:
    """Forward-facing depth camera.

    ``resolution`` is (columns, rows) = (horizontal, vertical) pixel counts
    and ``fov_deg`` the matching full opening angles in degrees. The default
    is a 12x19 pixel, 34.6 x 43.6 degree camera with 2.4 m range (long axis
    vertical).
    """

    max_range: float = 2.4
    resolution: tuple = (12, 19)
    fov_deg: tuple = (34.6, 43.6)

    @property
    def ray_count(self):
        return self.resolution[0] * self.resolution[1]


@lru_cache(maxsize=None)
def _ray_table(cam, yaw_index):
    """Unit ray directions for a camera at a given heading, (n, 3)."""
    cols, rows = cam.resolution
    fov_h = math.radians(cam.fov_deg[0])
    fov_v = math.radians(cam.fov_deg[1])
    az = -fov_h / 2.0 + (np.arange(cols) + 0.5) * (fov_h / cols)
    el = -fov_v / 2.0 + (np.arange(rows) + 0.5) * (fov_v / rows)
    az_g, el_g = np.meshgrid(az, el, indexing="ij")
    x = np.cos(el_g) * np.cos(az_g)
    y = np.cos(el_g) * np.sin(az_g)
    z = np.sin(el_g)
    c = _YAW_COS[yaw_index % 4]
    s = _YAW_SIN[yaw_index % 4]
    dirs = np.stack([c * x - s * y, s * x + c * y, z], axis=-1).reshape(-1, 3)
    return np.ascontiguousarray(dirs)


def max_ray_steps(max_range, resolution):
    """Safe upper bound on cells one ray of given length can visit."""
    return 3 * (int(max_range / resolution) + 2) + 2


_local = threading.local()


def _buffers(n_cells, ray_steps, n_rays):
    """Per-thread scratch for the visible-set kernel."""
    buf = getattr(_local, "buf", None)
    need_out = n_rays * ray_steps
    if buf is None or buf[0].size < n_cells or buf[1].size < ray_steps or buf[2].size < need_out:
        buf = (
            np.zeros(n_cells, dtype=np.uint8),
            np.empty(max(ray_steps, 64), dtype=np.int64),
            np.empty(max(need_out, 1024), dtype=np.int64),
        )
        _local.buf = buf
    return buf


def cast_ray(env, origin, direction, max_range):
    """Cells visited by one ray through an environment, in visit order.

    Returns ``(cells, hit)``: flat cell ids and whether the walk ended by
    entering an occupied cell (which is included). The direction must be
    unit length. An origin outside the grid yields an empty list.
    """
    d = np.asarray(direction, dtype=float)
    norm = math.sqrt(float(d @ d))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"direction must be normalized, |d| = {norm}")
    grid = env.grid
    nx, ny, nz = grid.dims
    out = np.empty(max_ray_steps(max_range, grid.resolution), dtype=np.int64)
    n, hit = _kernels.walk_ray(
        env.occupancy, nx, ny, nz, grid.resolution,
        float(origin[0]), float(origin[1]), float(origin[2]),
        float(d[0]), float(d[1]), float(d[2]), float(max_range), out,
    )
    return out[:n].copy(), bool(hit)


def visible_set_on_occupancy(position, yaw_index, occupancy, grid, cam):
    """Visible-set core on a raw occupancy array; returns sorted flat ids."""
    nx, ny, nz = grid.dims
    if not grid.contains_point(position):
        raise ValueError(f"camera position {tuple(position)} outside grid")
    dirs = _ray_table(cam, yaw_index)
    steps = max_ray_steps(cam.max_range, grid.resolution)
    seen, scratch, out = _buffers(grid.n_cells, steps, dirs.shape[0])
    n = _kernels.visible_cells(
        occupancy, nx, ny, nz, grid.resolution,
        float(position[0]), float(position[1]), float(position[2]),
        dirs, float(cam.max_range), seen, scratch, out,
    )
    return np.sort(out[:n])


def camera_visible_set(state, env, cam):
    """All cells any camera ray touches from a state, as sorted flat ids.

    Rays stop at occupied cells (included) and at ``cam.max_range``, so the
    result is contained in a ball of radius range + cell diagonal.
    """
    return visible_set_on_occupancy(state.position, state.yaw_index,
                                    env.occupancy, env.grid, cam)


@dataclass(frozen=True)
class Observation:
    """Noiseless depth readings: which cells were seen, and their occupancy."""

    cells: np.ndarray
    occupied: np.ndarray

    def __len__(self):
        return self.cells.size


def observe(state, env, cam):
    """Take a camera measurement of the true environment."""
    cells = camera_visible_set(state, env, cam)
    return Observation(cells, env.occupancy[cells] != 0)


def fuse_observation(belief, obs):
    """Write an observation into the belief map.

    Unknown cells become known; known cells must agree with the observation
    (sensing is noiseless), otherwise ObservationConflictError is raised and
    the belief is left untouched. Returns the mutated belief.
    """
    current = belief.cells[obs.cells]
    incoming = np.where(obs.occupied, OCCUPIED, FREE).astype(np.uint8)
    conflict = (current != UNKNOWN) & (current != incoming)
    if conflict.any():
        where = int(obs.cells[np.flatnonzero(conflict)[0]])
        raise ObservationConflictError(
            f"observation flips known cell {where} "
            f"({int(current[np.flatnonzero(conflict)[0]])} -> "
            f"{int(incoming[np.flatnonzero(conflict)[0]])})"
        )
    changed = current == UNKNOWN
    if changed.any():
        belief.cells[obs.cells[changed]] = incoming[changed]
        belief.version += 1
    return belief
